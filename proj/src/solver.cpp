#include "gbsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gbsde/errors.hpp"
#include "gbsde/rng.hpp"
#include "gbsde/root_find.hpp"
#include "gbsde/yosida.hpp"

namespace gbsde {

namespace {

using GenFn = std::function<double(double, double, double)>;

void check_step_condition(double dt, double u_t, double t, int minimal_hint) {
    if (dt * u_t < 1.0) return;
    std::string msg = "dt * u(t) = " + std::to_string(dt * u_t) +
                      " >= 1 at t = " + std::to_string(t) +
                      "; the implicit map needs dt < " + std::to_string(1.0 / u_t);
    if (minimal_hint > 0)
        msg += "; refine the time grid to at least N = " + std::to_string(minimal_hint);
    throw step_condition_violation(msg, minimal_hint);
}

double implicit_step_fn(double S, double t, double z, const GenFn& f, double dt,
                        double tol) {
    auto psi = [&](double y) { return y - dt * f(t, y, z) - S; };
    RootOptions opts;
    opts.tol = tol;
    const double f_at_S = f(t, S, z);
    return solve_increasing(psi, S, std::max(1.0, dt * std::abs(f_at_S)), opts).x;
}

}  // namespace

double implicit_step(double S, double t, double z, const GeneratorSpec& spec,
                     double dt, double tol) {
    check_step_condition(dt, spec.u(t), t, 0);
    return implicit_step_fn(S, t, z, spec.f, dt, tol);
}

double extract_z(std::span<const double> next_slice, double x, double sigma_star,
                 const Lattice& lattice) {
    const double move = sigma_star * lattice.sqrt_dt();
    const double up = interpolate(next_slice, x + move, lattice);
    const double down = interpolate(next_slice, x - move, lattice);
    return (up - down) / (2.0 * move);
}

double k_increment(std::span<const double> next_slice, double x, double sigma,
                   double S, const Lattice& lattice) {
    return one_step_candidate(next_slice, x, sigma, lattice) - S;
}

GBSDESolution solve(const GeneratorSpec& spec, const TerminalSpec& terminal,
                    const Lattice& lattice, const SolveOptions& opts) {
    const int N = lattice.steps;
    const int J = lattice.halfwidth;
    const int m = static_cast<int>(lattice.vol_set.size());
    const double dt = lattice.dt;

    // Guard the whole grid up front so the failure names the minimal N.
    double u_max = 0.0;
    for (int i = 0; i < N; ++i) u_max = std::max(u_max, spec.u(lattice.time(i)));
    const int minimal_hint =
        static_cast<int>(std::floor(lattice.horizon * u_max)) + 1;
    for (int i = 0; i < N; ++i)
        check_step_condition(dt, spec.u(lattice.time(i)), lattice.time(i),
                             minimal_hint);

    GenFn gen;
    if (opts.alpha) {
        const double alpha = *opts.alpha;
        if (!(alpha > 0.0))
            throw config_error("regularization alpha must be positive", "alpha");
        // Inner resolvent tolerance budgeted so the dt * f_alpha noise stays
        // below a quarter of the outer residual tolerance.
        const double inner =
            std::clamp(opts.tol * alpha / (4.0 * dt), 1e-15, opts.tol);
        const GeneratorSpec& base = spec;
        gen = [&base, alpha, inner](double t, double y, double z) {
            return regularized_generator(base, alpha, t, y, z, inner);
        };
    } else {
        gen = spec.f;
    }

    GBSDESolution sol;
    sol.lattice = lattice;
    sol.Y = ValueField(N + 1, J);
    sol.Z = ValueField(N, J);
    sol.sigma_star = ValueField(N, J);
    sol.k_increments = KTable(N, J, m);

    for (int j = -J; j <= J; ++j) {
        const double v = terminal(lattice.x(j));
        if (!std::isfinite(v))
            throw non_finite_value("terminal payoff '" + terminal.id +
                                       "' is not finite at node " +
                                       std::to_string(j),
                                   N, j);
        sol.Y.at(N, j) = v;
    }

    std::vector<double> cand(m);
    for (int i = N - 1; i >= 0; --i) {
        const double t = lattice.time(i);
        const auto next = sol.Y.slice(i + 1);
        for (int j = -J; j <= J; ++j) {
            const double x = lattice.x(j);
            one_step_candidates(next, x, lattice, cand);
            double S = -std::numeric_limits<double>::infinity();
            double sigma_star = 0.0;
            for (int k = 0; k < m; ++k) {
                if (cand[k] >= S) {
                    S = cand[k];
                    sigma_star = lattice.vol_set[k];
                }
            }
            const double z = extract_z(next, x, sigma_star, lattice);
            double y;
            try {
                y = implicit_step_fn(S, t, z, gen, dt, opts.tol);
            } catch (const bracket_failure& e) {
                throw bracket_failure(std::string(e.what()) + " (slice " +
                                      std::to_string(i) + ", node " +
                                      std::to_string(j) + ")");
            } catch (const tolerance_failure& e) {
                throw tolerance_failure(std::string(e.what()) + " (slice " +
                                        std::to_string(i) + ", node " +
                                        std::to_string(j) + ")");
            }
            sol.Y.at(i, j) = y;
            sol.Z.at(i, j) = z;
            sol.sigma_star.at(i, j) = sigma_star;
            for (int k = 0; k < m; ++k)
                sol.k_increments.at(i, j, k) = cand[k] - S;
        }
    }
    return sol;
}

PathRecord simulate_path(const GBSDESolution& solution, const Lattice& lattice,
                         const PathControl& control) {
    const int N = lattice.steps;
    const int m = static_cast<int>(lattice.vol_set.size());
    if (control.kind == PathControl::Kind::Explicit &&
        static_cast<int>(control.sigmas.size()) != N)
        throw config_error("control sequence has " +
                               std::to_string(control.sigmas.size()) +
                               " entries, lattice has " + std::to_string(N) +
                               " steps",
                           "control");

    Rng rng(control.seed);
    PathRecord rec;
    rec.times.resize(N + 1);
    rec.states.resize(N + 1);
    rec.sigmas.resize(N);
    rec.shocks.resize(N);
    rec.y.resize(N + 1);
    rec.z.resize(N);
    rec.k_cum.assign(N + 1, 0.0);

    double x = 0.0;
    for (int i = 0; i < N; ++i) {
        rec.times[i] = lattice.time(i);
        rec.states[i] = x;
        rec.y[i] = interpolate(solution.Y.slice(i), x, lattice);

        const auto next = solution.Y.slice(i + 1);
        const OneStepResult sup = one_step_sup(next, x, lattice);

        double sigma;
        switch (control.kind) {
            case PathControl::Kind::WorstCase:
                sigma = sup.sigma_star;
                break;
            case PathControl::Kind::Explicit:
                sigma = control.sigmas[std::size_t(i)];
                if (sigma < lattice.vol_bounds.sigma_lo ||
                    sigma > lattice.vol_bounds.sigma_hi)
                    throw config_error("control sigma " + std::to_string(sigma) +
                                           " outside [sigma_lo, sigma_hi]",
                                       "control");
                break;
            case PathControl::Kind::Random:
            default:
                sigma = lattice.vol_set[rng.uniform_index(std::size_t(m))];
                break;
        }

        rec.sigmas[i] = sigma;
        rec.z[i] = extract_z(next, x, sigma, lattice);
        rec.k_cum[i + 1] =
            rec.k_cum[i] + k_increment(next, x, sigma, sup.value, lattice);

        const double ratio = sigma / lattice.vol_bounds.sigma_hi;
        const double q = ratio * ratio;
        const double udraw = rng.uniform01();
        int shock = 0;
        if (udraw < 0.5 * q)
            shock = 1;
        else if (udraw < q)
            shock = -1;
        rec.shocks[i] = shock;
        x += shock * lattice.spacing;
    }
    rec.times[N] = lattice.horizon;
    rec.states[N] = x;
    rec.y[N] = interpolate(solution.Y.slice(N), x, lattice);
    return rec;
}

}  // namespace gbsde
