#ifndef GBSDE_GENERATOR_HPP
#define GBSDE_GENERATOR_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace gbsde {

// Generator f(t, y, z) together with its assumption data: the time-varying
// monotonicity rate u, the z-Lipschitz constant L, the dominating process h,
// the integrability margin lambda and the bound M on the integral of u^2.
//
// Contract on the pieces:
//   (y1-y2)(f(t,y1,z) - f(t,y2,z)) <= u(t) |y1-y2|^2
//   |f(t,y,0)| <= h(t) + u(t)|y|        (h = |f(.,0,0)| v phi)
//   |f(t,y,z1) - f(t,y,z2)| <= L |z1-z2|
struct GeneratorSpec {
    std::string id;
    std::map<std::string, double> params;

    std::function<double(double, double, double)> f;  // f(t, y, z)
    std::function<double(double)> u;                  // monotonicity rate, >= 0
    double L = 0.0;
    std::function<double(double)> h;
    double lambda = 0.0;
    double M = 0.0;  // integral of u^2 over [0, T] is <= M

    // Global Lipschitz bound in y when one exists (enables the Picard oracle).
    std::optional<double> lipschitz_y;
};

// Known identifiers and parameters (defaults in parentheses):
//   "zero"
//   "linear_decay"   k (1):              f = -k*y,  u = k, h = 0
//   "signed_sqrt"    L (1), u_scale (1): f = -u(t)*sign(y)*sqrt(|y|) + L*sin(z)
//                                        with u(t) = u_scale*(T-t)^(-1/4), h = u
//   "piecewise_kink" k (1), k_neg (2), L (0.5):
//                                        f = -k*max(y,0) - k_neg*min(y,0) + L*z,
//                                        u = max(k, k_neg), h = 0
// The horizon T fixes u, h and M for the time-varying rates.
GeneratorSpec make_generator(const std::string& id,
                             const std::map<std::string, double>& params,
                             double horizon);

// Midpoint quadrature of u^2 over [0, T]; the declared M must dominate it.
double u_square_integral(const GeneratorSpec& spec, double horizon,
                         int n_points = 4096);

}  // namespace gbsde

#endif
