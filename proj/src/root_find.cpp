#include "gbsde/root_find.hpp"

#include <cmath>
#include <string>

#include "gbsde/errors.hpp"

namespace gbsde {

RootResult solve_increasing(const std::function<double(double)>& phi, double x0,
                            double r0, const RootOptions& opts) {
    int evals = 0;
    auto eval = [&](double x) {
        ++evals;
        const double v = phi(x);
        if (std::isnan(v))
            throw bracket_failure("residual map returned NaN at x = " +
                                  std::to_string(x));
        return v;
    };

    const double p0 = eval(x0);
    if (std::abs(p0) <= opts.tol) return {x0, p0, evals};

    // Grow the bracket on the deficient side only.
    double radius = std::max(r0, 1e-3);
    double lo = x0, hi = x0, plo = p0, phi_hi = p0;
    if (p0 > 0.0) {
        for (int k = 0;; ++k) {
            if (k >= opts.max_expansions)
                throw bracket_failure(
                    "no sign change after " + std::to_string(k) +
                    " expansions; residual map does not look increasing");
            lo = x0 - radius;
            plo = eval(lo);
            if (std::abs(plo) <= opts.tol) return {lo, plo, evals};
            if (plo < 0.0) break;
            radius *= 2.0;
        }
    } else {
        for (int k = 0;; ++k) {
            if (k >= opts.max_expansions)
                throw bracket_failure(
                    "no sign change after " + std::to_string(k) +
                    " expansions; residual map does not look increasing");
            hi = x0 + radius;
            phi_hi = eval(hi);
            if (std::abs(phi_hi) <= opts.tol) return {hi, phi_hi, evals};
            if (phi_hi > 0.0) break;
            radius *= 2.0;
        }
    }

    // Safeguarded bisection: phi(lo) < 0 < phi(hi) throughout.
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        double cand = mid;
        if (iter % 2 != 0) {
            const double denom = phi_hi - plo;
            if (denom > 0.0) {
                const double secant = hi - phi_hi * (hi - lo) / denom;
                if (secant > lo && secant < hi) cand = secant;
            }
        }
        if (!(cand > lo && cand < hi)) cand = mid;
        if (cand == lo || cand == hi) {
            // Bracket exhausted at machine resolution; take the better end.
            const double best_x = std::abs(plo) <= std::abs(phi_hi) ? lo : hi;
            const double best_p = std::abs(plo) <= std::abs(phi_hi) ? plo : phi_hi;
            if (std::abs(best_p) <= opts.tol) return {best_x, best_p, evals};
            throw tolerance_failure(
                "bracket collapsed with residual " + std::to_string(best_p) +
                " above tolerance " + std::to_string(opts.tol));
        }
        const double pc = eval(cand);
        if (std::abs(pc) <= opts.tol) return {cand, pc, evals};
        if (pc < 0.0) {
            lo = cand;
            plo = pc;
        } else {
            hi = cand;
            phi_hi = pc;
        }
    }
    throw tolerance_failure("no convergence within " +
                            std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace gbsde
