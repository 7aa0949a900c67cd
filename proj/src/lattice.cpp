#include "gbsde/lattice.hpp"

#include <cmath>
#include <string>

#include "gbsde/errors.hpp"

namespace gbsde {

double Lattice::sqrt_dt() const { return std::sqrt(dt); }

Lattice build_lattice(double T, int N, const GConfig& g, int m_vol,
                      double truncation_factor, std::size_t memory_cap) {
    g.validate();
    if (!(T > 0.0) || !std::isfinite(T))
        throw config_error("horizon T must be positive and finite", "T");
    if (N < 1) throw config_error("steps N must be >= 1", "N");
    if (m_vol < 2 && !g.degenerate())
        throw config_error("vol_points must be >= 2", "m_vol");
    if (!(truncation_factor >= 1.0))
        throw config_error("truncation_factor must be >= 1", "truncation_factor");

    Lattice lat;
    lat.horizon = T;
    lat.steps = N;
    lat.dt = T / N;
    lat.spacing = g.sigma_hi * std::sqrt(lat.dt);
    lat.vol_bounds = g;

    // J * spacing >= factor * sigma_hi * sqrt(T)  <=>  J >= factor * sqrt(N).
    lat.halfwidth = static_cast<int>(std::ceil(truncation_factor * std::sqrt(double(N))));

    const std::size_t entries =
        (std::size_t(N) + 1) * (2 * std::size_t(lat.halfwidth) + 1);
    if (entries > memory_cap)
        throw config_error("lattice needs " + std::to_string(entries) +
                               " entries, above the cap of " +
                               std::to_string(memory_cap),
                           "memory_cap");

    if (g.degenerate()) {
        lat.vol_set = {g.sigma_hi};
    } else {
        lat.vol_set.resize(m_vol);
        const double step = (g.sigma_hi - g.sigma_lo) / (m_vol - 1);
        for (int k = 0; k < m_vol; ++k) lat.vol_set[k] = g.sigma_lo + k * step;
        lat.vol_set.front() = g.sigma_lo;  // endpoints exact
        lat.vol_set.back() = g.sigma_hi;
    }
    return lat;
}

}  // namespace gbsde
