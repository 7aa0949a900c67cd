#ifndef GBSDE_TERMINAL_HPP
#define GBSDE_TERMINAL_HPP

#include <functional>
#include <map>
#include <string>

namespace gbsde {

// Terminal payoff xi as a function of the terminal coordinate, carrying its
// identifier and parameters so configs and manifests can round-trip it.
struct TerminalSpec {
    std::string id;
    std::map<std::string, double> params;
    std::function<double(double)> payoff;

    double operator()(double x) const { return payoff(x); }
};

// Known identifiers: "quadratic" (x^2), "neg_quadratic" (-x^2),
// "identity" (x), "call" (max(x - strike, 0)), "constant" (value).
// Throws config_error for unknown ids or missing parameters.
TerminalSpec make_terminal(const std::string& id,
                           const std::map<std::string, double>& params = {});

// Pointwise square of a payoff; used by the norm audit for E_t[xi^2].
TerminalSpec squared(const TerminalSpec& base);

}  // namespace gbsde

#endif
