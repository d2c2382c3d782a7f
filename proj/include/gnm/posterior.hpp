#ifndef GNM_POSTERIOR_HPP
#define GNM_POSTERIOR_HPP

#include <optional>

#include "gnm/gaussian.hpp"
#include "gnm/model.hpp"

namespace gnm {

/// Gaussian prior with mean m and precision H. H = 0 is the flat prior.
struct GaussianPrior {
    Vector mean;
    Matrix precision;

    static GaussianPrior flat(const Vector& mean);

    /// Throws DimensionMismatch or NotPSD.
    void validate(Index n) const;
};

/// Unnormalized log posterior: -1/2 (x-m)^T H (x-m) - 1/2 |f(x)|^2, or
/// -infinity outside the domain.
double log_posterior(const GaussianPrior& prior, const ModelEval& eval, const Vector& x);

/// Gauss-Newton proposal at x: precision H + J^T J and mean
/// P^{-1} (H m - J^T f + J^T J x). Throws SingularProposal when P is not
/// positive definite.
PrecisionGaussian gn_proposal(const GaussianPrior& prior, const ModelEval& eval, const Vector& x);

/// A point together with everything the sampler derives from its single
/// model evaluation.
struct PointState {
    Vector x;
    ModelEval eval;
    double log_post = 0.0;
    /// Present iff the point is inside the domain and H + J^T J is positive
    /// definite there.
    std::optional<PrecisionGaussian> proposal;

    bool inside() const { return eval.inside; }
    bool has_proposal() const { return proposal.has_value(); }
};

/// Builds a PointState from an existing evaluation. A singular proposal is
/// recorded as an absent one rather than thrown.
PointState make_point_state(const GaussianPrior& prior, Vector x, ModelEval eval);

/// Evaluates the model once at x and builds the PointState.
PointState make_point_state(const GaussianPrior& prior, ModelHandle& model, Vector x);

} // namespace gnm

#endif // GNM_POSTERIOR_HPP
