#ifndef GBSDE_VALUE_FIELD_HPP
#define GBSDE_VALUE_FIELD_HPP

#include <span>
#include <vector>

#include "gbsde/lattice.hpp"

namespace gbsde {

// Real-valued function on lattice nodes: n_slices time slices, each holding
// 2J+1 spatial values indexed by j in [-J, J].
class ValueField {
public:
    ValueField() = default;
    ValueField(int n_slices, int halfwidth)
        : n_slices_(n_slices),
          halfwidth_(halfwidth),
          values_(std::size_t(n_slices) * (2 * std::size_t(halfwidth) + 1), 0.0) {}

    int n_slices() const { return n_slices_; }
    int halfwidth() const { return halfwidth_; }
    int nodes_per_slice() const { return 2 * halfwidth_ + 1; }

    double& at(int i, int j) { return values_[index(i, j)]; }
    double at(int i, int j) const { return values_[index(i, j)]; }

    std::span<double> slice(int i) {
        return {values_.data() + index(i, -halfwidth_),
                std::size_t(nodes_per_slice())};
    }
    std::span<const double> slice(int i) const {
        return {values_.data() + index(i, -halfwidth_),
                std::size_t(nodes_per_slice())};
    }

    bool all_finite() const;

private:
    std::size_t index(int i, int j) const {
        return std::size_t(i) * nodes_per_slice() + std::size_t(j + halfwidth_);
    }

    int n_slices_ = 0;
    int halfwidth_ = 0;
    std::vector<double> values_;
};

// Piecewise-linear interpolation of one time slice, clamped to the boundary
// values outside [-J*spacing, J*spacing]. Reproduces grid values exactly and
// is monotone: pointwise-ordered slices give ordered interpolants.
double interpolate(std::span<const double> slice, double x, const Lattice& lattice);

}  // namespace gbsde

#endif
