#ifndef GBSDE_LATTICE_HPP
#define GBSDE_LATTICE_HPP

#include <cstddef>
#include <vector>

#include "gbsde/gconfig.hpp"

namespace gbsde {

// Discrete state space for the G-Brownian motion: uniform time grid of N
// steps on [0, T], spatial grid x_j = j * spacing for j in [-J, J] with
// spacing = sigma_hi * sqrt(dt), and a finite sorted volatility set
// containing both endpoints of [sigma_lo, sigma_hi].
struct Lattice {
    double horizon = 0.0;   // T
    int steps = 0;          // N
    double dt = 0.0;        // T / N
    double spacing = 0.0;   // sigma_hi * sqrt(dt)
    int halfwidth = 0;      // J
    GConfig vol_bounds;
    std::vector<double> vol_set;

    int nodes_per_slice() const { return 2 * halfwidth + 1; }
    double x(int j) const { return j * spacing; }
    double time(int i) const { return i * dt; }
    double sqrt_dt() const;
};

// Builds the lattice; J is the smallest halfwidth with
// J * spacing >= truncation_factor * sigma_hi * sqrt(T).
// Throws config_error on invalid inputs or when (N+1)*(2J+1) exceeds
// memory_cap entries.
Lattice build_lattice(double T, int N, const GConfig& g, int m_vol,
                      double truncation_factor,
                      std::size_t memory_cap = std::size_t{1} << 26);

}  // namespace gbsde

#endif
