#include "gbsde/terminal.hpp"

#include <algorithm>
#include <cmath>

#include "gbsde/errors.hpp"

namespace gbsde {

namespace {

double require_param(const std::map<std::string, double>& params,
                     const std::string& key, const std::string& id) {
    auto it = params.find(key);
    if (it == params.end())
        throw config_error("terminal '" + id + "' needs parameter '" + key + "'",
                           "terminal.params." + key);
    return it->second;
}

}  // namespace

TerminalSpec make_terminal(const std::string& id,
                           const std::map<std::string, double>& params) {
    TerminalSpec spec;
    spec.id = id;
    spec.params = params;
    if (id == "quadratic") {
        spec.payoff = [](double x) { return x * x; };
    } else if (id == "neg_quadratic") {
        spec.payoff = [](double x) { return -x * x; };
    } else if (id == "identity") {
        spec.payoff = [](double x) { return x; };
    } else if (id == "call") {
        const double strike = require_param(params, "strike", id);
        spec.payoff = [strike](double x) { return std::max(x - strike, 0.0); };
    } else if (id == "constant") {
        const double value = require_param(params, "value", id);
        spec.payoff = [value](double) { return value; };
    } else {
        throw config_error("unknown terminal identifier '" + id + "'",
                           "terminal.id");
    }
    return spec;
}

TerminalSpec squared(const TerminalSpec& base) {
    TerminalSpec spec;
    spec.id = base.id + "_squared";
    spec.params = base.params;
    auto f = base.payoff;
    spec.payoff = [f](double x) {
        const double v = f(x);
        return v * v;
    };
    return spec;
}

}  // namespace gbsde
