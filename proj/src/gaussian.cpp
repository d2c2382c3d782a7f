#include "gnm/gaussian.hpp"

#include <cmath>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

constexpr double log_two_pi = 1.8378770664093454835606594728112;

} // namespace

PrecisionGaussian PrecisionGaussian::from_precision(Vector mean, const Matrix& precision)
{
    const Index n = mean.size();
    if (precision.rows() != n || precision.cols() != n)
        throw DimensionMismatch("precision must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!precision.allFinite() || !mean.allFinite())
        throw NotPositiveDefinite("precision or mean has non-finite entries");

    PrecisionGaussian g;
    g.mean_ = std::move(mean);
    g.precision_ = 0.5 * (precision + precision.transpose());
    Eigen::LLT<Matrix> llt(g.precision_);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("precision matrix is not positive definite");
    g.chol_ = llt.matrixL();
    const Vector diag = g.chol_.diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite())
        throw NotPositiveDefinite("precision matrix is not positive definite");
    g.log_norm_ = diag.array().log().sum() - 0.5 * static_cast<double>(n) * log_two_pi;
    return g;
}

double PrecisionGaussian::log_pdf(const Vector& x) const
{
    if (x.size() != mean_.size())
        throw DimensionMismatch("log_pdf: point has the wrong dimension");
    // (x - mu)^T P (x - mu) = |L^T (x - mu)|^2
    const Vector d = x - mean_;
    const Vector u = chol_.transpose().triangularView<Eigen::Upper>() * d;
    return log_norm_ - 0.5 * u.squaredNorm();
}

Vector PrecisionGaussian::sample(const Vector& std_normals) const
{
    if (std_normals.size() != mean_.size())
        throw DimensionMismatch("sample: wrong number of standard normals");
    return mean_ + chol_.transpose().triangularView<Eigen::Upper>().solve(std_normals);
}

PrecisionGaussian PrecisionGaussian::dilate(const Vector& center, double gamma) const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw InvalidDilation("dilation factor must be positive");
    if (center.size() != mean_.size())
        throw DimensionMismatch("dilate: center has the wrong dimension");
    PrecisionGaussian g;
    g.mean_ = center + gamma * (mean_ - center);
    g.precision_ = precision_ / (gamma * gamma);
    g.chol_ = chol_ / gamma;
    g.log_norm_ = log_norm_ - static_cast<double>(mean_.size()) * std::log(gamma);
    return g;
}

PrecisionGaussian PrecisionGaussian::contract(const Vector& center, double t) const
{
    if (!(t > 0.0 && t <= 1.0))
        throw InvalidDilation("back-off step must lie in (0, 1]");
    if (center.size() != mean_.size())
        throw DimensionMismatch("contract: center has the wrong dimension");
    const double var_scale = t * (2.0 - t);
    PrecisionGaussian g;
    g.mean_ = center + t * (mean_ - center);
    g.precision_ = precision_ / var_scale;
    g.chol_ = chol_ / std::sqrt(var_scale);
    g.log_norm_ = log_norm_ - 0.5 * static_cast<double>(mean_.size()) * std::log(var_scale);
    return g;
}

PrecisionGaussian PrecisionGaussian::with_mean(Vector mean) const
{
    if (mean.size() != mean_.size())
        throw DimensionMismatch("with_mean: wrong dimension");
    PrecisionGaussian g = *this;
    g.mean_ = std::move(mean);
    return g;
}

Vector PrecisionGaussian::solve(const Vector& rhs) const
{
    const Vector y = chol_.triangularView<Eigen::Lower>().solve(rhs);
    return chol_.transpose().triangularView<Eigen::Upper>().solve(y);
}

} // namespace gnm
