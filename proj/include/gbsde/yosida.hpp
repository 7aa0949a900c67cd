#ifndef GBSDE_YOSIDA_HPP
#define GBSDE_YOSIDA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbsde/generator.hpp"

namespace gbsde {

// F(t, y, z) = f(t, y, z) - u(t) * y. Dissipative in y:
// (y1 - y2)(F(y1) - F(y2)) <= 0.
double dissipative_part(const GeneratorSpec& spec, double t, double y, double z);

struct ResolventResult {
    double x = 0.0;        // J_alpha(t, y, z)
    double residual = 0.0; // x - alpha F(t, x, z) - y
    int iterations = 0;
};

// Unique solution of x - alpha F(t, x, z) = y, found by bracket expansion
// around y (initial radius max(1, alpha|F(t,y,z)|)) plus safeguarded
// bisection/secant. Deterministic for fixed inputs.
ResolventResult resolvent(const GeneratorSpec& spec, double alpha, double t,
                          double y, double z, double tol = 1e-12);

// F_alpha = (J_alpha - y) / alpha = F(t, J_alpha, z).
double yosida_approximant(const GeneratorSpec& spec, double alpha, double t,
                          double y, double z, double tol = 1e-12);

// f_alpha = F_alpha + u(t) * y: Lipschitz in y with constant 2/alpha + u(t),
// same monotonicity rate u and z-Lipschitz constant L as f.
double regularized_generator(const GeneratorSpec& spec, double alpha, double t,
                             double y, double z, double tol = 1e-12);

// Sampling ranges for the randomized checks.
struct SampleBox {
    double t_lo = 0.0, t_hi = 1.0;    // t_hi exclusive
    double y_lo = -10.0, y_hi = 10.0;
    double z_lo = -10.0, z_hi = 10.0;
    double alpha_lo = 1e-4, alpha_hi = 1.0;

    static SampleBox defaults(double horizon);
};

struct Witness {
    double t = 0, y1 = 0, y2 = 0, z1 = 0, z2 = 0, alpha = 0, beta = 0;
    double lhs = 0, rhs = 0;
};

struct ConditionReport {
    std::string name;
    bool pass = true;
    long violations = 0;
    // max of lhs - rhs seen across samples; <= 0 when the condition passes
    double worst_margin = -1.7976931348623157e308;
    std::optional<Witness> counterexample;
};

struct ValidationReport {
    std::vector<ConditionReport> conditions;
    long samples = 0;
    std::uint64_t seed = 0;
    bool all_pass() const;
    std::string to_json() const;
};

// Randomized probe of (H2), (H3), (H4) on the box. Violations are data, not
// errors: the report carries the first counterexample per condition.
ValidationReport validate_assumptions(const GeneratorSpec& spec, int n_samples,
                                      std::uint64_t seed, const SampleBox& box,
                                      double slack = 1e-9);

struct AuditOptions {
    int samples = 10000;
    std::uint64_t seed = 1;
    double tol = 1e-12;       // resolvent residual tolerance
    SampleBox box;            // also supplies the alpha/beta range
};

struct AuditReport {
    std::vector<ConditionReport> inequalities;  // resolvent/approximant battery
    ConditionReport pointwise_limit;            // f_alpha -> f along alpha | 0
    long samples = 0;
    std::uint64_t seed = 0;
    bool all_pass() const;
    std::string to_json() const;
};

// Randomized battery over the twelve resolvent/approximant inequalities, with
// slack 4*tol/alpha wherever an F_alpha or f_alpha value enters (those are
// quotients by alpha of tol-accurate quantities), plus the pointwise limit
// |f_alpha - f| checked on a deterministic probe grid.
AuditReport yosida_audit(const GeneratorSpec& spec, const AuditOptions& opts);

}  // namespace gbsde

#endif
