#include "gnm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnm/errors.hpp"

namespace gnm {

QuadratureCurve quadrature_1d(const std::function<double(double)>& log_density, double lo,
                              double hi, int n_points)
{
    if (n_points < 101)
        throw InvalidArgument("quadrature needs at least 101 points");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidArgument("quadrature interval must be finite and non-empty");

    QuadratureCurve q;
    q.grid = Vector::LinSpaced(n_points, lo, hi);
    Vector logd(n_points);
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_points; ++i) {
        const double v = log_density(q.grid(i));
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
            throw NonFiniteDensity("log density is not finite at x = " + std::to_string(q.grid(i)));
        logd(i) = v;
        top = std::max(top, v);
    }
    if (!std::isfinite(top))
        throw NonFiniteDensity("density vanishes on the whole interval");

    q.density = (logd.array() - top).exp();
    const double h = (hi - lo) / (n_points - 1);
    const double integral = h * (q.density.sum() - 0.5 * (q.density(0) + q.density(n_points - 1)));
    q.density /= integral;
    return q;
}

double curve_average(const QuadratureCurve& curve, double a, double b)
{
    if (!(a < b))
        throw InvalidArgument("curve_average needs a < b");
    const Vector& g = curve.grid;
    const Vector& f = curve.density;
    auto value = [&](double x) {
        if (x >= g(g.size() - 1))
            return f(f.size() - 1);
        const auto it = std::upper_bound(g.data(), g.data() + g.size(), x);
        const Index i = static_cast<Index>(it - g.data()) - 1;
        const double s = (x - g(i)) / (g(i + 1) - g(i));
        return (1.0 - s) * f(i) + s * f(i + 1);
    };

    // The curve is zero off its grid; integrate the interpolant exactly
    // between knots over the overlap.
    const double lo = std::max(a, g(0));
    const double hi = std::min(b, g(g.size() - 1));
    if (!(lo < hi))
        return 0.0;
    double prev_x = lo;
    double prev_f = value(lo);
    double area = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        if (g(i) <= lo)
            continue;
        if (g(i) >= hi)
            break;
        area += 0.5 * (prev_f + f(i)) * (g(i) - prev_x);
        prev_x = g(i);
        prev_f = f(i);
    }
    area += 0.5 * (prev_f + value(hi)) * (hi - prev_x);
    return area / (b - a);
}

} // namespace gnm
