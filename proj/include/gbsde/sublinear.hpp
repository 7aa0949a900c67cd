#ifndef GBSDE_SUBLINEAR_HPP
#define GBSDE_SUBLINEAR_HPP

#include <span>
#include <vector>

#include "gbsde/lattice.hpp"
#include "gbsde/terminal.hpp"
#include "gbsde/value_field.hpp"

namespace gbsde {

struct OneStepResult {
    double value = 0.0;
    double sigma_star = 0.0;
};

// One-step candidate value under volatility sigma from state x against the
// next time slice. The chain stays at x with probability 1 - q and jumps to
// x +- sigma_hi*sqrt(dt) (grid neighbours) with probability q/2 each, where
// q = (sigma/sigma_hi)^2. The step has mean zero and variance sigma^2*dt, so
// every admissible volatility is resolved exactly on-grid; evaluating
// children at x +- sigma*sqrt(dt) through linear interpolation instead would
// inflate the effective variance to sigma*sigma_hi*dt.
double one_step_candidate(std::span<const double> next_slice, double x,
                          double sigma, const Lattice& lattice);

// All candidates in vol_set order; out.size() must equal vol_set.size().
void one_step_candidates(std::span<const double> next_slice, double x,
                         const Lattice& lattice, std::span<double> out);

// Adversarial one-step expectation: max over vol_set, ties broken by the
// largest sigma.
OneStepResult one_step_sup(std::span<const double> next_slice, double x,
                           const Lattice& lattice);

// Full backward induction for the discrete conditional G-expectation of the
// terminal payoff. Slice N holds the payoff on the grid; slice i is computed
// from slice i+1 by one_step_sup at every node. The root value at (0, 0) is
// the discrete sublinear expectation.
// Throws non_finite_value if the payoff is not finite at some node.
ValueField conditional_g_expectation(const TerminalSpec& terminal,
                                     const Lattice& lattice);

// Interpolation-free engine path used for oracle comparisons: dynamic
// programming on the exact non-recombining binary tree with children at
// x +- sigma*sqrt(T/N) evaluated exactly. Same maximisation and tie-break
// as one_step_sup.
double g_expectation_exact_tree(const TerminalSpec& terminal, double T, int N,
                                std::span<const double> vol_set);

}  // namespace gbsde

#endif
