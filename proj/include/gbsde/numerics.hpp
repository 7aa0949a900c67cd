#ifndef GBSDE_NUMERICS_HPP
#define GBSDE_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>

namespace gbsde {

// Composite midpoint rule. The midpoint rule never evaluates the endpoints,
// which matters for rates like (T-t)^(-1/4) that blow up at the horizon, and
// it under-estimates convex integrands so declared integral bounds stay valid.
inline double midpoint_integral(const std::function<double(double)>& f,
                                double a, double b, int n = 4096) {
    if (!(b > a) || n <= 0) return 0.0;
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += f(a + (i + 0.5) * h);
    return sum * h;
}

// Least-squares slope of y against x. Returns {slope, intercept}.
inline std::pair<double, double> fit_line(std::span<const double> x,
                                          std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return {0.0, n ? sy / n : 0.0};
    const double slope = (n * sxy - sx * sy) / denom;
    return {slope, (sy - slope * sx) / n};
}

}  // namespace gbsde

#endif
