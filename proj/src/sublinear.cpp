#include "gbsde/sublinear.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gbsde/errors.hpp"

namespace gbsde {

namespace {

struct StencilValues {
    double here, pair;
};

StencilValues stencil(std::span<const double> next_slice, double x,
                      const Lattice& lattice) {
    const double here = interpolate(next_slice, x, lattice);
    const double up = interpolate(next_slice, x + lattice.spacing, lattice);
    const double down = interpolate(next_slice, x - lattice.spacing, lattice);
    return {here, 0.5 * (up + down)};
}

double candidate_from_stencil(const StencilValues& s, double sigma,
                              const Lattice& lattice) {
    const double ratio = sigma / lattice.vol_bounds.sigma_hi;
    const double q = ratio * ratio;
    if (q >= 1.0) return s.pair;
    // here + q*(pair - here) keeps constants exact and stays monotone in
    // both stencil values for q in [0, 1].
    return s.here + q * (s.pair - s.here);
}

}  // namespace

double one_step_candidate(std::span<const double> next_slice, double x,
                          double sigma, const Lattice& lattice) {
    return candidate_from_stencil(stencil(next_slice, x, lattice), sigma, lattice);
}

void one_step_candidates(std::span<const double> next_slice, double x,
                         const Lattice& lattice, std::span<double> out) {
    const StencilValues s = stencil(next_slice, x, lattice);
    for (std::size_t k = 0; k < lattice.vol_set.size(); ++k)
        out[k] = candidate_from_stencil(s, lattice.vol_set[k], lattice);
}

OneStepResult one_step_sup(std::span<const double> next_slice, double x,
                           const Lattice& lattice) {
    const StencilValues s = stencil(next_slice, x, lattice);
    OneStepResult best{-std::numeric_limits<double>::infinity(), 0.0};
    for (double sigma : lattice.vol_set) {
        const double cand = candidate_from_stencil(s, sigma, lattice);
        if (cand >= best.value) {  // >= : largest sigma wins ties
            best.value = cand;
            best.sigma_star = sigma;
        }
    }
    return best;
}

ValueField conditional_g_expectation(const TerminalSpec& terminal,
                                     const Lattice& lattice) {
    const int N = lattice.steps;
    const int J = lattice.halfwidth;
    ValueField field(N + 1, J);

    for (int j = -J; j <= J; ++j) {
        const double v = terminal(lattice.x(j));
        if (!std::isfinite(v))
            throw non_finite_value("terminal payoff '" + terminal.id +
                                       "' is not finite at slice " +
                                       std::to_string(N) + ", node " +
                                       std::to_string(j),
                                   N, j);
        field.at(N, j) = v;
    }

    for (int i = N - 1; i >= 0; --i) {
        const auto next = field.slice(i + 1);
        for (int j = -J; j <= J; ++j)
            field.at(i, j) = one_step_sup(next, lattice.x(j), lattice).value;
    }
    return field;
}

namespace {

double exact_tree_value(const TerminalSpec& terminal, double x, int remaining,
                        double sqrt_dt, std::span<const double> vol_set) {
    if (remaining == 0) return terminal(x);
    double best = -std::numeric_limits<double>::infinity();
    for (double sigma : vol_set) {
        const double move = sigma * sqrt_dt;
        const double cand =
            0.5 * (exact_tree_value(terminal, x + move, remaining - 1, sqrt_dt,
                                    vol_set) +
                   exact_tree_value(terminal, x - move, remaining - 1, sqrt_dt,
                                    vol_set));
        if (cand >= best) best = cand;
    }
    return best;
}

}  // namespace

double g_expectation_exact_tree(const TerminalSpec& terminal, double T, int N,
                                std::span<const double> vol_set) {
    return exact_tree_value(terminal, 0.0, N, std::sqrt(T / N), vol_set);
}

}  // namespace gbsde
