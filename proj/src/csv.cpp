#include "gbsde/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace gbsde {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string value_field_csv(const ValueField& field, const Lattice& lattice) {
    std::string out = "t,x,value\n";
    for (int i = 0; i < field.n_slices(); ++i)
        for (int j = -field.halfwidth(); j <= field.halfwidth(); ++j) {
            out += format_double(lattice.time(i));
            out += ',';
            out += format_double(lattice.x(j));
            out += ',';
            out += format_double(field.at(i, j));
            out += '\n';
        }
    return out;
}

std::string solution_y_csv(const GBSDESolution& sol) {
    return value_field_csv(sol.Y, sol.lattice);
}

std::string solution_z_csv(const GBSDESolution& sol) {
    return value_field_csv(sol.Z, sol.lattice);
}

std::string solution_sigma_csv(const GBSDESolution& sol) {
    std::string out = "t,x,sigma\n";
    const auto& lat = sol.lattice;
    for (int i = 0; i < sol.sigma_star.n_slices(); ++i)
        for (int j = -lat.halfwidth; j <= lat.halfwidth; ++j) {
            out += format_double(lat.time(i));
            out += ',';
            out += format_double(lat.x(j));
            out += ',';
            out += format_double(sol.sigma_star.at(i, j));
            out += '\n';
        }
    return out;
}

std::string solution_k_csv(const GBSDESolution& sol) {
    std::string out = "t,x,sigma,delta_k\n";
    const auto& lat = sol.lattice;
    for (int i = 0; i < lat.steps; ++i)
        for (int j = -lat.halfwidth; j <= lat.halfwidth; ++j)
            for (std::size_t k = 0; k < lat.vol_set.size(); ++k) {
                out += format_double(lat.time(i));
                out += ',';
                out += format_double(lat.x(j));
                out += ',';
                out += format_double(lat.vol_set[k]);
                out += ',';
                out += format_double(sol.k_increments.at(i, j, int(k)));
                out += '\n';
            }
    return out;
}

std::string path_csv(const PathRecord& rec) {
    std::string out = "step,t,x,sigma,shock,Y,Z,K_cum\n";
    const std::size_t n = rec.sigmas.size();
    for (std::size_t i = 0; i <= n; ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(rec.times[i]);
        out += ',';
        out += format_double(rec.states[i]);
        out += ',';
        if (i < n) out += format_double(rec.sigmas[i]);
        out += ',';
        if (i < n) out += std::to_string(rec.shocks[i]);
        out += ',';
        out += format_double(rec.y[i]);
        out += ',';
        if (i < n) out += format_double(rec.z[i]);
        out += ',';
        out += format_double(rec.k_cum[i]);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace gbsde
