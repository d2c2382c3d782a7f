#ifndef GNM_JTEST_HPP
#define GNM_JTEST_HPP

#include "gnm/model.hpp"
#include "gnm/rng.hpp"

namespace gnm {

struct JtestOptions {
    double dx = 2e-4;       // initial perturbation, relative to the box width
    int N = 1000;           // test points
    double eps_max = 1e-4;  // pass threshold
    double p = 2.0;         // entrywise norm order; +inf allowed
    int l_max = 50;         // shrink stages per point
    double r = 0.5;         // shrink ratio

    void validate() const;
};

/// Open box x_min < x < x_max.
struct JtestDomain {
    Vector x_min;
    Vector x_max;

    void validate(Index n) const;
};

/// Checks the model's Jacobian against symmetric difference quotients at N
/// uniform points of the box, shrinking the step by r up to l_max times per
/// point. Returns 0 when every point converges below eps_max, otherwise the
/// final error of the first failing point (in point order).
///
/// Points are checked concurrently; the result matches jtest_serial for the
/// same seed. On failure, calls made for points after the failing one are
/// still counted.
double jtest(ModelHandle& model, const JtestDomain& domain, const JtestOptions& options, Rng& rng);

/// Single-threaded reference with early exit on the first failure.
double jtest_serial(ModelHandle& model, const JtestDomain& domain, const JtestOptions& options,
                    Rng& rng);

/// Entrywise p-norm of a matrix.
double entrywise_norm(const Matrix& m, double p);

} // namespace gnm

#endif // GNM_JTEST_HPP
