#ifndef GBSDE_SOLVER_HPP
#define GBSDE_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gbsde/generator.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/sublinear.hpp"
#include "gbsde/terminal.hpp"
#include "gbsde/value_field.hpp"

namespace gbsde {

// Per-node table of K-increments, one entry per admissible volatility:
// delta_k(i, j, sigma_k) <= 0 with equality at the node's maximiser.
class KTable {
public:
    KTable() = default;
    KTable(int steps, int halfwidth, int n_vol)
        : halfwidth_(halfwidth),
          n_vol_(n_vol),
          values_(std::size_t(steps) * (2 * std::size_t(halfwidth) + 1) * n_vol, 0.0) {}

    double& at(int i, int j, int k) { return values_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
    int n_vol() const { return n_vol_; }

private:
    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * (2 * std::size_t(halfwidth_) + 1) +
                std::size_t(j + halfwidth_)) * n_vol_ + std::size_t(k);
    }
    int halfwidth_ = 0, n_vol_ = 0;
    std::vector<double> values_;
};

struct GBSDESolution {
    Lattice lattice;
    ValueField Y;           // slices 0..N
    ValueField Z;           // slices 0..N-1
    ValueField sigma_star;  // slices 0..N-1
    KTable k_increments;    // (i, j, vol index) for i in 0..N-1

    double root() const { return Y.at(0, 0); }
};

// Unique y with y - dt * f(t, y, z) = S, by the same safeguarded bracketing
// as the resolvent. Requires dt * u(t) < 1 so the map has slope
// >= 1 - dt*u > 0 (u is evaluated at t, the point where f is evaluated).
double implicit_step(double S, double t, double z, const GeneratorSpec& spec,
                     double dt, double tol = 1e-12);

// Discrete martingale-representation gradient:
// [v(x + sigma*sqrt(dt)) - v(x - sigma*sqrt(dt))] / (2 sigma sqrt(dt)).
double extract_z(std::span<const double> next_slice, double x, double sigma_star,
                 const Lattice& lattice);

// delta K under volatility sigma at state x, given the node's one-step sup S:
// candidate(sigma) - S. Non-positive; zero at the maximiser.
double k_increment(std::span<const double> next_slice, double x, double sigma,
                   double S, const Lattice& lattice);

struct SolveOptions {
    std::optional<double> alpha;  // when set, the generator is f_alpha
    double tol = 1e-12;           // implicit-step residual tolerance
};

// Full backward sweep producing (Y, Z, K) with per-node maximising
// volatility. Deterministic for fixed inputs.
GBSDESolution solve(const GeneratorSpec& spec, const TerminalSpec& terminal,
                    const Lattice& lattice, const SolveOptions& opts = {});

struct PathControl {
    enum class Kind { WorstCase, Explicit, Random };
    Kind kind = Kind::WorstCase;
    std::vector<double> sigmas;  // Explicit: one entry per step
    std::uint64_t seed = 0;      // drives shocks (and sigma draws for Random)

    static PathControl worst_case(std::uint64_t seed) { return {Kind::WorstCase, {}, seed}; }
    static PathControl constant(double sigma, int steps, std::uint64_t seed) {
        return {Kind::Explicit, std::vector<double>(std::size_t(steps), sigma), seed};
    }
    static PathControl random(std::uint64_t seed) { return {Kind::Random, {}, seed}; }
};

struct PathRecord {
    std::vector<double> times;   // N+1
    std::vector<double> states;  // N+1
    std::vector<double> sigmas;  // N
    std::vector<int> shocks;     // N, in {-1, 0, +1}
    std::vector<double> y;       // N+1
    std::vector<double> z;       // N
    std::vector<double> k_cum;   // N+1, starts at 0, non-increasing
};

// Forward walk from the root. Each step draws the shock from the seeded
// generator: +-1 with probability q/2 each and 0 otherwise, q = (sigma/sigma_hi)^2,
// moving the state by shock * sigma_hi * sqrt(dt) (variance sigma^2 dt).
// K accumulates the increment of the visited state under the chosen sigma,
// recomputed from the Y field at the exact state.
PathRecord simulate_path(const GBSDESolution& solution, const Lattice& lattice,
                         const PathControl& control);

}  // namespace gbsde

#endif
