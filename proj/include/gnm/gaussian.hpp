#ifndef GNM_GAUSSIAN_HPP
#define GNM_GAUSSIAN_HPP

#include "gnm/types.hpp"

namespace gnm {

/// Multivariate normal stored in precision form.
///
/// Keeps the mean, the precision P, its lower Cholesky factor L (L L^T = P)
/// and the exact log normalization 1/2 log det P - n/2 log(2 pi), so that
/// densities of kernels with different determinants can be compared.
/// Immutable once built.
class PrecisionGaussian {
  public:
    /// Symmetrizes `precision` as (P + P^T)/2 and factors it.
    /// Throws NotPositiveDefinite when the factorization fails.
    static PrecisionGaussian from_precision(Vector mean, const Matrix& precision);

    double log_pdf(const Vector& x) const;

    /// mean + L^{-T} z; the result has covariance P^{-1}.
    Vector sample(const Vector& std_normals) const;

    /// Contracts the mean toward `center` by gamma and the covariance by
    /// gamma^2. gamma = 1 returns an identical distribution.
    PrecisionGaussian dilate(const Vector& center, double gamma) const;

    /// Back-off kernel of step t in (0, 1]: mean center + t (mean - center),
    /// covariance (2t - t^2) P^{-1}. When center is drawn from this Gaussian
    /// the result is the law of the Ornstein-Uhlenbeck flow that keeps it
    /// invariant, so the contracted kernel stays reversible with respect to
    /// it. t = 1 returns an identical distribution.
    PrecisionGaussian contract(const Vector& center, double t) const;

    /// Same precision, different mean.
    PrecisionGaussian with_mean(Vector mean) const;

    /// Solves P u = rhs with the cached factor.
    Vector solve(const Vector& rhs) const;

    const Vector& mean() const { return mean_; }
    const Matrix& precision() const { return precision_; }
    const Matrix& chol() const { return chol_; }
    double log_norm() const { return log_norm_; }
    Index dim() const { return mean_.size(); }

  private:
    PrecisionGaussian() = default;

    Vector mean_;
    Matrix precision_;
    Matrix chol_;
    double log_norm_ = 0.0;
};

} // namespace gnm

#endif // GNM_GAUSSIAN_HPP
