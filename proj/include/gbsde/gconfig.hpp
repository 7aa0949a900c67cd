#ifndef GBSDE_GCONFIG_HPP
#define GBSDE_GCONFIG_HPP

namespace gbsde {

// Volatility-uncertainty interval [sigma_lo, sigma_hi], 0 < sigma_lo <= sigma_hi.
struct GConfig {
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;

    void validate() const;  // throws config_error on a bad interval
    bool degenerate() const { return sigma_lo == sigma_hi; }
};

// G(a) = 1/2 * (sigma_hi^2 * a^+ - sigma_lo^2 * a^-).
// Positively homogeneous of degree 1; total on all of R.
double g_coefficient(double a, const GConfig& g);

}  // namespace gbsde

#endif
