#include "gbsde/gconfig.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gbsde/errors.hpp"

namespace gbsde {

void GConfig::validate() const {
    if (!(sigma_lo > 0.0) || !std::isfinite(sigma_lo))
        throw config_error("sigma_lo must be positive and finite, got " +
                               std::to_string(sigma_lo),
                           "sigma_lo");
    if (!(sigma_hi >= sigma_lo) || !std::isfinite(sigma_hi))
        throw config_error("sigma_hi must satisfy sigma_lo <= sigma_hi < inf",
                           "sigma_hi");
}

double g_coefficient(double a, const GConfig& g) {
    const double pos = std::max(a, 0.0);
    const double neg = std::max(-a, 0.0);
    return 0.5 * (g.sigma_hi * g.sigma_hi * pos - g.sigma_lo * g.sigma_lo * neg);
}

}  // namespace gbsde
