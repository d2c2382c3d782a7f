#ifndef GNM_QUADRATURE_HPP
#define GNM_QUADRATURE_HPP

#include <functional>

#include "gnm/types.hpp"

namespace gnm {

struct QuadratureCurve {
    Vector grid;
    Vector density;
};

/// Evaluates exp(log_density) on a uniform grid of n_points over [lo, hi]
/// and normalizes it to unit trapezoid integral.
QuadratureCurve quadrature_1d(const std::function<double(double)>& log_density, double lo,
                              double hi, int n_points);

/// Mean of the curve over [a, b] by exact integration of its linear
/// interpolant, taken as zero off the grid.
double curve_average(const QuadratureCurve& curve, double a, double b);

} // namespace gnm

#endif // GNM_QUADRATURE_HPP
