#ifndef GBSDE_ORACLES_HPP
#define GBSDE_ORACLES_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbsde/gconfig.hpp"
#include "gbsde/solver.hpp"

namespace gbsde {

// Exact sup over all adapted volatility controls on a tiny non-recombining
// binary tree: enumerates every map from partial shock histories to sigma
// choices, evaluates the plain binomial expectation under each, and returns
// the maximum. By dynamic-programming optimality this equals
// g_expectation_exact_tree on the same tree.
// Throws enumeration_cap_exceeded when m^(2^N - 1) exceeds the cap.
double brute_force_g_expectation(const TerminalSpec& terminal, double T, int N,
                                 std::span<const double> vol_set,
                                 std::size_t cap = 20'000'000);

// Classical binomial expectation under a single volatility, computed as a
// direct forward sum over terminal nodes.
double binomial_expectation(const TerminalSpec& terminal, double T, int N,
                            double sigma);

// E[B_T^2] = sigma_hi^2 T (sign +1) and E[-B_T^2] = -sigma_lo^2 T (sign -1).
double quadratic_closed_form(const GConfig& g, double T, int sign);

// Independent per-step solver: fixed-point iteration y <- S + dt f(t, y, z)
// instead of root-finding. Needs dt * Lip_y < 1; Lip_y is 2/alpha + u(t) for
// a regularized generator and spec.lipschitz_y otherwise.
// Throws contraction_violation when the iteration is not a contraction.
GBSDESolution picard_lipschitz_solve(const GeneratorSpec& spec,
                                     const TerminalSpec& terminal,
                                     const Lattice& lattice,
                                     std::optional<double> alpha = {},
                                     double tol = 1e-12);

struct OracleReport {
    std::string instance;
    double oracle_value = 0.0;
    double engine_value = 0.0;
    double gap = 0.0;  // |oracle_value - engine_value|
    double tolerance = 0.0;
    bool pass = false;
};

// The full battery run by `oracle-check`: brute force vs the exact-tree
// engine, closed forms and the degenerate binomial check against the lattice
// engine, and Picard vs the implicit solver.
std::vector<OracleReport> run_oracle_battery(bool include_heavy = false);

std::string oracle_reports_json(const std::vector<OracleReport>& reports);

}  // namespace gbsde

#endif
