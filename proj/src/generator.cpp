#include "gbsde/generator.hpp"

#include <algorithm>
#include <cmath>

#include "gbsde/errors.hpp"
#include "gbsde/numerics.hpp"

namespace gbsde {

namespace {

double param_or(const std::map<std::string, double>& params,
                const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double sign_sqrt(double y) {
    return y >= 0.0 ? std::sqrt(y) : -std::sqrt(-y);
}

}  // namespace

GeneratorSpec make_generator(const std::string& id,
                             const std::map<std::string, double>& params,
                             double horizon) {
    GeneratorSpec spec;
    spec.id = id;
    spec.params = params;
    const double T = horizon;

    if (id == "zero") {
        spec.f = [](double, double, double) { return 0.0; };
        spec.u = [](double) { return 0.0; };
        spec.h = [](double) { return 0.0; };
        spec.L = 0.0;
        spec.M = 0.0;
        spec.lipschitz_y = 0.0;
    } else if (id == "linear_decay") {
        const double k = param_or(params, "k", 1.0);
        if (k < 0.0) throw config_error("linear_decay needs k >= 0", "generator.params.k");
        spec.params["k"] = k;
        spec.f = [k](double, double y, double) { return -k * y; };
        spec.u = [k](double) { return k; };  // |f(t,y,0)| = k|y| <= u|y|
        spec.h = [](double) { return 0.0; };
        spec.L = 0.0;
        spec.M = k * k * T;
        spec.lipschitz_y = k;
    } else if (id == "signed_sqrt") {
        const double L = param_or(params, "L", 1.0);
        const double scale = param_or(params, "u_scale", 1.0);
        if (L < 0.0 || scale < 0.0)
            throw config_error("signed_sqrt needs L >= 0 and u_scale >= 0",
                               "generator.params");
        spec.params["L"] = L;
        spec.params["u_scale"] = scale;
        // (T-t)^(-1/4): square-integrable rate that blows up at the horizon.
        auto rate = [scale, T](double t) {
            const double gap = std::max(T - t, 1e-16);
            return scale / std::sqrt(std::sqrt(gap));
        };
        spec.u = rate;
        spec.f = [rate, L](double t, double y, double z) {
            return -rate(t) * sign_sqrt(y) + L * std::sin(z);
        };
        // |f(t,y,0)| = u(t) sqrt(|y|) <= u(t) (1 + |y|), so phi = u and
        // h = |f(.,0,0)| v phi = u.
        spec.h = rate;
        spec.L = L;
        spec.lambda = 1.0;
        spec.M = scale * scale * 2.0 * std::sqrt(T);  // exact integral of u^2
    } else if (id == "piecewise_kink") {
        const double k = param_or(params, "k", 1.0);
        const double k_neg = param_or(params, "k_neg", 2.0);
        const double L = param_or(params, "L", 0.5);
        if (k < 0.0 || k_neg < 0.0 || L < 0.0)
            throw config_error("piecewise_kink needs k, k_neg, L >= 0",
                               "generator.params");
        spec.params["k"] = k;
        spec.params["k_neg"] = k_neg;
        spec.params["L"] = L;
        spec.f = [k, k_neg, L](double, double y, double z) {
            return -k * std::max(y, 0.0) - k_neg * std::min(y, 0.0) + L * z;
        };
        const double rate = std::max(k, k_neg);
        spec.u = [rate](double) { return rate; };
        spec.h = [](double) { return 0.0; };
        spec.L = L;
        spec.M = rate * rate * T;
        spec.lipschitz_y = rate;
    } else {
        throw config_error("unknown generator identifier '" + id + "'",
                           "generator.id");
    }
    return spec;
}

double u_square_integral(const GeneratorSpec& spec, double horizon, int n_points) {
    auto u = spec.u;
    return midpoint_integral([&u](double t) { const double v = u(t); return v * v; },
                             0.0, horizon, n_points);
}

}  // namespace gbsde
