#include "gbsde/value_field.hpp"

#include <algorithm>
#include <cmath>

namespace gbsde {

bool ValueField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

double interpolate(std::span<const double> slice, double x, const Lattice& lattice) {
    const int J = lattice.halfwidth;
    const double s = lattice.spacing;
    auto v = [&](int j) { return slice[std::size_t(j + J)]; };

    if (x <= lattice.x(-J)) return v(-J);
    if (x >= lattice.x(J)) return v(J);

    int j0 = static_cast<int>(std::floor(x / s));
    // floor(x/s) can land one cell off after rounding; settle against the
    // actual grid coordinates so grid points reproduce exactly.
    if (x < lattice.x(j0))
        --j0;
    else if (x >= lattice.x(j0 + 1))
        ++j0;
    j0 = std::clamp(j0, -J, J - 1);

    if (x == lattice.x(j0)) return v(j0);
    if (x == lattice.x(j0 + 1)) return v(j0 + 1);

    double theta = (x - lattice.x(j0)) / s;
    theta = std::clamp(theta, 0.0, 1.0);
    return (1.0 - theta) * v(j0) + theta * v(j0 + 1);
}

}  // namespace gbsde
