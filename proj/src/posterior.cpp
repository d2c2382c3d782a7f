#include "gnm/posterior.hpp"

#include <limits>

#include "gnm/errors.hpp"

namespace gnm {

GaussianPrior GaussianPrior::flat(const Vector& mean)
{
    return {mean, Matrix::Zero(mean.size(), mean.size())};
}

void GaussianPrior::validate(Index n) const
{
    if (mean.size() != n || precision.rows() != n || precision.cols() != n)
        throw DimensionMismatch("prior mean/precision do not match the parameter dimension " +
                                std::to_string(n));
    if (!mean.allFinite() || !precision.allFinite())
        throw InvalidArgument("prior has non-finite entries");
    const double scale = std::max(1.0, precision.cwiseAbs().maxCoeff());
    if ((precision - precision.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NotPSD("prior precision is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (precision + precision.transpose()),
                                              Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
        throw NotPSD("prior precision has a negative eigenvalue");
}

double log_posterior(const GaussianPrior& prior, const ModelEval& eval, const Vector& x)
{
    if (!eval.inside)
        return -std::numeric_limits<double>::infinity();
    const Vector d = x - prior.mean;
    return -0.5 * d.dot(prior.precision * d) - 0.5 * eval.residual.squaredNorm();
}

PrecisionGaussian gn_proposal(const GaussianPrior& prior, const ModelEval& eval, const Vector& x)
{
    if (!eval.inside)
        throw InvalidArgument("Gauss-Newton proposal requested outside the domain");
    const Matrix& J = eval.jacobian;
    const Matrix JtJ = J.transpose() * J;
    const Matrix P = prior.precision + JtJ;
    const Vector rhs = prior.precision * prior.mean - J.transpose() * eval.residual + JtJ * x;

    PrecisionGaussian g = [&] {
        try {
            return PrecisionGaussian::from_precision(Vector::Zero(x.size()), P);
        } catch (const NotPositiveDefinite&) {
            throw SingularProposal("H + J^T J is not positive definite");
        }
    }();
    Vector mu = g.solve(rhs);
    if (!mu.allFinite())
        throw SingularProposal("Gauss-Newton mean is not finite");
    return g.with_mean(std::move(mu));
}

PointState make_point_state(const GaussianPrior& prior, Vector x, ModelEval eval)
{
    PointState s;
    s.x = std::move(x);
    s.eval = std::move(eval);
    s.log_post = log_posterior(prior, s.eval, s.x);
    if (s.eval.inside) {
        try {
            s.proposal = gn_proposal(prior, s.eval, s.x);
        } catch (const SingularProposal&) {
            s.proposal.reset();
        }
    }
    return s;
}

PointState make_point_state(const GaussianPrior& prior, ModelHandle& model, Vector x)
{
    ModelEval eval = model.evaluate(x);
    return make_point_state(prior, std::move(x), std::move(eval));
}

} // namespace gnm
