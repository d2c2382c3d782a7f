#ifndef GNM_TEST_SUPPORT_HPP
#define GNM_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gnm/examples.hpp"
#include "gnm/model.hpp"
#include "gnm/posterior.hpp"

namespace testsupport {

inline gnm::Vector vec(std::initializer_list<double> v)
{
    gnm::Vector out(static_cast<gnm::Index>(v.size()));
    std::copy(v.begin(), v.end(), out.data());
    return out;
}

inline gnm::Matrix mat(gnm::Index rows, gnm::Index cols, std::initializer_list<double> v)
{
    gnm::Matrix out(rows, cols);
    auto it = v.begin();
    for (gnm::Index i = 0; i < rows; ++i)
        for (gnm::Index j = 0; j < cols; ++j)
            out(i, j) = *it++;
    return out;
}

inline bool rel_close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max({1e-300, std::abs(a), std::abs(b)});
}

inline double normal_logpdf(double x, double mean, double var)
{
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * (x - mean) * (x - mean) / var;
}

/// Unit Gaussian prior at zero in n dimensions.
inline gnm::GaussianPrior unit_prior(gnm::Index n)
{
    return {gnm::Vector::Zero(n), gnm::Matrix::Identity(n, n)};
}

/// f(x) = x - c in 1D; the posterior under a Gaussian prior is Gaussian.
inline gnm::ModelHandle shifted_identity(double c)
{
    return gnm::ModelHandle(
        [c](const gnm::Vector& x) {
            return gnm::ModelEval{true, x.array() - c, gnm::Matrix::Identity(1, 1)};
        },
        1);
}

/// Standard normal CDF.
inline double phi_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

} // namespace testsupport

#endif
