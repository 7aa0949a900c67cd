#ifndef GBSDE_ERRORS_HPP
#define GBSDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gbsde {

// Base for everything thrown by the numerical layer.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bracket expansion ran out of room; the residual map never changed sign.
// Signals a generator violating the monotonicity assumption or a
// non-finite evaluator.
struct bracket_failure : numerical_error {
    using numerical_error::numerical_error;
};

// Safeguarded iteration hit its cap before reaching the residual tolerance.
struct tolerance_failure : numerical_error {
    using numerical_error::numerical_error;
};

// dt * u(t) >= 1: the implicit one-step map is not guaranteed increasing.
struct step_condition_violation : numerical_error {
    step_condition_violation(const std::string& msg, int minimal_steps)
        : numerical_error(msg), minimal_steps(minimal_steps) {}
    int minimal_steps;
};

// dt * Lipschitz(y) >= 1 in the Picard fixed-point solver.
struct contraction_violation : numerical_error {
    using numerical_error::numerical_error;
};

// A payoff or generator produced a non-finite value on the lattice.
struct non_finite_value : numerical_error {
    non_finite_value(const std::string& msg, int slice, int node)
        : numerical_error(msg), slice(slice), node(node) {}
    int slice;
    int node;
};

// Brute-force control enumeration would exceed the configured cap.
struct enumeration_cap_exceeded : numerical_error {
    using numerical_error::numerical_error;
};

// Invalid configuration (bad field value, unknown field, bad file).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg, std::string field = "")
        : std::runtime_error(msg), field(std::move(field)) {}
    std::string field;
};

}  // namespace gbsde

#endif
