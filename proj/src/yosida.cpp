#include "gbsde/yosida.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gbsde/errors.hpp"
#include "gbsde/numerics.hpp"
#include "gbsde/rng.hpp"
#include "gbsde/root_find.hpp"

namespace gbsde {

double dissipative_part(const GeneratorSpec& spec, double t, double y, double z) {
    return spec.f(t, y, z) - spec.u(t) * y;
}

ResolventResult resolvent(const GeneratorSpec& spec, double alpha, double t,
                          double y, double z, double tol) {
    if (!(alpha > 0.0)) throw config_error("resolvent needs alpha > 0", "alpha");
    if (!(tol > 0.0)) throw config_error("resolvent needs tol > 0", "tol");

    const double f_at_y = dissipative_part(spec, t, y, z);
    auto phi = [&](double x) {
        return x - alpha * dissipative_part(spec, t, x, z) - y;
    };
    RootOptions opts;
    opts.tol = tol;
    const RootResult r =
        solve_increasing(phi, y, std::max(1.0, alpha * std::abs(f_at_y)), opts);
    return {r.x, r.residual, r.iterations};
}

double yosida_approximant(const GeneratorSpec& spec, double alpha, double t,
                          double y, double z, double tol) {
    return (resolvent(spec, alpha, t, y, z, tol).x - y) / alpha;
}

double regularized_generator(const GeneratorSpec& spec, double alpha, double t,
                             double y, double z, double tol) {
    return yosida_approximant(spec, alpha, t, y, z, tol) + spec.u(t) * y;
}

SampleBox SampleBox::defaults(double horizon) {
    SampleBox box;
    box.t_hi = horizon;
    return box;
}

namespace {

void record(ConditionReport& report, double lhs, double rhs, const Witness& w) {
    const double margin = lhs - rhs;
    report.worst_margin = std::max(report.worst_margin, margin);
    if (margin > 0.0) {
        ++report.violations;
        report.pass = false;
        if (!report.counterexample) {
            Witness full = w;
            full.lhs = lhs;
            full.rhs = rhs;
            report.counterexample = full;
        }
    }
}

nlohmann::json witness_json(const Witness& w) {
    return {{"t", w.t},         {"y1", w.y1},   {"y2", w.y2}, {"z1", w.z1},
            {"z2", w.z2},       {"alpha", w.alpha}, {"beta", w.beta},
            {"lhs", w.lhs},     {"rhs", w.rhs}};
}

nlohmann::json condition_json(const ConditionReport& c) {
    nlohmann::json j{{"name", c.name},
                     {"pass", c.pass},
                     {"violations", c.violations},
                     {"worst_margin", c.worst_margin}};
    if (c.counterexample) j["counterexample"] = witness_json(*c.counterexample);
    return j;
}

}  // namespace

bool ValidationReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionReport& c) { return c.pass; });
}

std::string ValidationReport::to_json() const {
    nlohmann::json j;
    j["samples"] = samples;
    j["seed"] = seed;
    j["all_pass"] = all_pass();
    j["conditions"] = nlohmann::json::array();
    for (const auto& c : conditions) j["conditions"].push_back(condition_json(c));
    return j.dump(2);
}

ValidationReport validate_assumptions(const GeneratorSpec& spec, int n_samples,
                                      std::uint64_t seed, const SampleBox& box,
                                      double slack) {
    ValidationReport report;
    report.samples = n_samples;
    report.seed = seed;
    for (const char* name : {"H2_monotonicity", "H3_domination", "H4_z_lipschitz",
                             "u_nonnegative", "u_square_integrable"}) {
        ConditionReport c;
        c.name = name;
        report.conditions.push_back(std::move(c));
    }
    auto& h2 = report.conditions[0];
    auto& h3 = report.conditions[1];
    auto& h4 = report.conditions[2];
    auto& upos = report.conditions[3];
    auto& uint2 = report.conditions[4];

    Rng rng(seed);
    for (int i = 0; i < n_samples; ++i) {
        Witness w;
        w.t = rng.uniform(box.t_lo, box.t_hi);
        w.y1 = rng.uniform(box.y_lo, box.y_hi);
        w.y2 = rng.uniform(box.y_lo, box.y_hi);
        w.z1 = rng.uniform(box.z_lo, box.z_hi);
        w.z2 = rng.uniform(box.z_lo, box.z_hi);
        const double u_t = spec.u(w.t);
        const double dy = w.y1 - w.y2;

        record(h2, dy * (spec.f(w.t, w.y1, w.z1) - spec.f(w.t, w.y2, w.z1)),
               u_t * dy * dy + slack, w);
        record(h3, std::abs(spec.f(w.t, w.y1, 0.0)),
               spec.h(w.t) + u_t * std::abs(w.y1) + slack, w);
        record(h4, std::abs(spec.f(w.t, w.y1, w.z1) - spec.f(w.t, w.y1, w.z2)),
               spec.L * std::abs(w.z1 - w.z2) + slack, w);
        record(upos, -u_t, 0.0, w);
    }

    const double integral = u_square_integral(spec, box.t_hi);
    record(uint2, integral, spec.M * (1.0 + 1e-6), Witness{});

    return report;
}

bool AuditReport::all_pass() const {
    return pointwise_limit.pass &&
           std::all_of(inequalities.begin(), inequalities.end(),
                       [](const ConditionReport& c) { return c.pass; });
}

std::string AuditReport::to_json() const {
    nlohmann::json j;
    j["samples"] = samples;
    j["seed"] = seed;
    j["all_pass"] = all_pass();
    j["inequalities"] = nlohmann::json::array();
    for (const auto& c : inequalities) j["inequalities"].push_back(condition_json(c));
    j["pointwise_limit"] = condition_json(pointwise_limit);
    return j.dump(2);
}

AuditReport yosida_audit(const GeneratorSpec& spec, const AuditOptions& opts) {
    AuditReport report;
    report.samples = opts.samples;
    report.seed = opts.seed;
    for (const char* name :
         {"J_contraction", "F_alpha_lipschitz", "F_alpha_dissipative",
          "F_alpha_dominated", "resolvent_convergence", "F_cross_alpha",
          "J_z_lipschitz", "F_alpha_z_lipschitz", "f_alpha_lipschitz",
          "f_alpha_monotone", "f_alpha_growth", "f_alpha_cross_alpha"}) {
        ConditionReport c;
        c.name = name;
        report.inequalities.push_back(std::move(c));
    }
    auto& ineq = report.inequalities;
    const double tol = opts.tol;
    const SampleBox& box = opts.box;

    Rng rng(opts.seed);
    const double log_lo = std::log(box.alpha_lo);
    const double log_hi = std::log(box.alpha_hi);

    for (int i = 0; i < opts.samples; ++i) {
        Witness w;
        w.t = rng.uniform(box.t_lo, box.t_hi);
        w.y1 = rng.uniform(box.y_lo, box.y_hi);
        w.y2 = rng.uniform(box.y_lo, box.y_hi);
        const double z = rng.uniform(box.z_lo, box.z_hi);
        w.z1 = rng.uniform(box.z_lo, box.z_hi);
        w.z2 = rng.uniform(box.z_lo, box.z_hi);
        w.alpha = std::exp(rng.uniform(log_lo, log_hi));
        w.beta = std::exp(rng.uniform(log_lo, log_hi));
        const double a = w.alpha, b = w.beta;
        const double u_t = spec.u(w.t);
        const double slack_a = 4.0 * tol / a;
        const double slack_ab = slack_a + 4.0 * tol / b;

        const double Ja1 = resolvent(spec, a, w.t, w.y1, z, tol).x;
        const double Ja2 = resolvent(spec, a, w.t, w.y2, z, tol).x;
        const double Jb2 = resolvent(spec, b, w.t, w.y2, z, tol).x;
        const double Jz1 = resolvent(spec, a, w.t, w.y1, w.z1, tol).x;
        const double Jz2 = resolvent(spec, a, w.t, w.y1, w.z2, tol).x;
        const double J0 = resolvent(spec, a, w.t, w.y1, 0.0, tol).x;

        const double Fa1 = (Ja1 - w.y1) / a;
        const double Fa2 = (Ja2 - w.y2) / a;
        const double Fb2 = (Jb2 - w.y2) / b;
        const double Faz1 = (Jz1 - w.y1) / a;
        const double Faz2 = (Jz2 - w.y1) / a;
        const double Fa0 = (J0 - w.y1) / a;

        const double fa1 = Fa1 + u_t * w.y1;
        const double fa2 = Fa2 + u_t * w.y2;
        const double fb2 = Fb2 + u_t * w.y2;
        const double fa0 = Fa0 + u_t * w.y1;

        const double F_y1 = dissipative_part(spec, w.t, w.y1, z);
        const double f_y1 = spec.f(w.t, w.y1, z);
        const double dy = w.y1 - w.y2;
        const double dz = w.z1 - w.z2;

        record(ineq[0], std::abs(Ja1 - Ja2), std::abs(dy) + slack_a, w);
        record(ineq[1], std::abs(Fa1 - Fa2), 2.0 / a * std::abs(dy) + slack_a, w);
        record(ineq[2], (Fa1 - Fa2) * dy, slack_a, w);
        record(ineq[3], std::abs(Fa1), std::abs(F_y1) + slack_a, w);
        record(ineq[4], std::abs(w.y1 - Ja1), a * std::abs(F_y1) + tol, w);
        record(ineq[5], (Fa1 - Fb2) * dy,
               (a + b) * std::pow(std::abs(Fa1) + std::abs(Fb2), 2) + slack_ab, w);
        record(ineq[6], std::abs(Jz1 - Jz2),
               a * spec.L * std::abs(dz) + slack_a, w);
        record(ineq[7], std::abs(Faz1 - Faz2), spec.L * std::abs(dz) + slack_a, w);
        record(ineq[8], std::abs(fa1 - fa2),
               (2.0 / a + u_t) * std::abs(dy) + slack_a, w);
        record(ineq[9], (fa1 - fa2) * dy, u_t * dy * dy + slack_a, w);
        const double growth_a =
            std::abs(fa1) - (std::abs(f_y1) + 2.0 * u_t * std::abs(w.y1));
        const double growth_b =
            std::abs(fa0) - (spec.h(w.t) + 3.0 * u_t * std::abs(w.y1));
        record(ineq[10], std::max(growth_a, growth_b), slack_a, w);
        record(ineq[11], (fa1 - fb2) * dy,
               (a + b) * std::pow(std::abs(fa1) + std::abs(fb2) +
                                      u_t * (std::abs(w.y1) + std::abs(w.y2)),
                                  2) +
                   u_t * dy * dy + slack_ab,
               w);
    }

    // Pointwise limit on a deterministic probe grid: |f_alpha - f| must be
    // non-increasing from the second alpha on and below 1e-3 at the smallest.
    report.pointwise_limit.name = "f_alpha_pointwise_limit";
    const double alphas[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    const double T = box.t_hi;
    const double probe_t[] = {0.0, 0.5 * T, 0.9 * T};
    const double probe_y[] = {-5.0, -2.0, -0.5, 0.3, 1.0, 5.0};
    const double probe_z[] = {-3.0, 0.0, 2.0};
    for (double t : probe_t)
        for (double y : probe_y)
            for (double z : probe_z) {
                double diffs[5];
                for (int k = 0; k < 5; ++k)
                    diffs[k] = std::abs(
                        regularized_generator(spec, alphas[k], t, y, z, tol) -
                        spec.f(t, y, z));
                Witness w;
                w.t = t;
                w.y1 = y;
                w.z1 = z;
                for (int k = 1; k + 1 < 5; ++k)
                    record(report.pointwise_limit, diffs[k + 1],
                           diffs[k] * (1.0 + 1e-9) + 1e-12, w);
                record(report.pointwise_limit, diffs[4], 1e-3, w);
            }

    return report;
}

}  // namespace gbsde
