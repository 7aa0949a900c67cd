#ifndef GBSDE_ROOT_FIND_HPP
#define GBSDE_ROOT_FIND_HPP

#include <functional>

namespace gbsde {

struct RootOptions {
    double tol = 1e-12;     // absolute residual tolerance
    int max_expansions = 128;
    int max_iterations = 256;
};

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Solves phi(x) = 0 for a strictly increasing phi. A bracket is grown around
// x0 by doubling the radius (initially max(r0, 1e-3)); then bisection with a
// secant step that is accepted only inside the current bracket, and a forced
// bisection every other iteration so the bracket provably shrinks.
// Throws bracket_failure when no sign change is found (a non-monotone or
// non-finite residual map) and tolerance_failure on the iteration cap.
RootResult solve_increasing(const std::function<double(double)>& phi, double x0,
                            double r0, const RootOptions& opts = {});

}  // namespace gbsde

#endif
