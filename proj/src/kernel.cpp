#include "gnm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

} // namespace

std::string to_string(BackoffMode mode)
{
    switch (mode) {
    case BackoffMode::None:
        return "none";
    case BackoffMode::Static:
        return "static";
    case BackoffMode::Dynamic:
        return "dynamic";
    }
    return "none";
}

BackoffMode backoff_mode_from_string(const std::string& name)
{
    if (name == "none")
        return BackoffMode::None;
    if (name == "static")
        return BackoffMode::Static;
    if (name == "dynamic")
        return BackoffMode::Dynamic;
    throw InvalidPolicy("unknown back-off mode '" + name + "'");
}

BackoffPolicy BackoffPolicy::none()
{
    return {};
}

BackoffPolicy BackoffPolicy::fixed(int max_steps, double factor)
{
    BackoffPolicy p;
    p.mode = max_steps == 0 ? BackoffMode::None : BackoffMode::Static;
    p.max_steps = max_steps;
    p.factor = factor;
    p.validate();
    return p;
}

BackoffPolicy BackoffPolicy::dynamic(int max_steps, double t_lo, double t_hi)
{
    BackoffPolicy p;
    p.mode = max_steps == 0 ? BackoffMode::None : BackoffMode::Dynamic;
    p.max_steps = max_steps;
    p.t_lo = t_lo;
    p.t_hi = t_hi;
    p.factor = 0.5 * (t_lo + t_hi);
    p.validate();
    return p;
}

void BackoffPolicy::validate() const
{
    if (max_steps < 0)
        throw InvalidPolicy("max_steps must be non-negative");
    if ((mode == BackoffMode::None) != (max_steps == 0))
        throw InvalidPolicy("mode 'none' goes with max_steps = 0 and only then");
    if (!(factor > 0.0 && factor < 1.0))
        throw InvalidPolicy("dilation factor must lie in (0, 1)");
    if (!(t_lo > 0.0 && t_lo < t_hi && t_hi < 1.0))
        throw InvalidPolicy("dynamic clamp needs 0 < t_lo < t_hi < 1");
}

std::optional<double> cubic_minimizer(const CubicData& c)
{
    const double d1 = c.dphi0 + c.dphi1 - 3.0 * (c.phi1 - c.phi0);
    const double disc = d1 * d1 - c.dphi0 * c.dphi1;
    if (!std::isfinite(disc) || disc < 0.0)
        return std::nullopt;
    const double d2 = std::sqrt(disc);
    const double denom = c.dphi1 - c.dphi0 + 2.0 * d2;
    if (denom == 0.0)
        return std::nullopt;
    const double t = 1.0 - (c.dphi1 + d2 - d1) / denom;
    if (!(t > 0.0 && t < 1.0))
        return std::nullopt;
    return t;
}

double cubic_interpolant(const CubicData& c, double t)
{
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * c.phi0 + h10 * c.dphi0 + h01 * c.phi1 + h11 * c.dphi1;
}

double dynamic_gamma(const PointState& x, const PointState& z, const BackoffPolicy& policy)
{
    const double fallback = policy.mode == BackoffMode::Dynamic ? policy.factor
                                                                : 0.5 * (policy.t_lo + policy.t_hi);
    if (!x.inside() || !z.inside())
        return fallback;

    // phi(t) = |f(x + t (z - x))|^2
    const Vector dir = z.x - x.x;
    CubicData c;
    c.phi0 = x.eval.residual.squaredNorm();
    c.phi1 = z.eval.residual.squaredNorm();
    c.dphi0 = 2.0 * x.eval.residual.dot(x.eval.jacobian * dir);
    c.dphi1 = 2.0 * z.eval.residual.dot(z.eval.jacobian * dir);
    if (!std::isfinite(c.phi0) || !std::isfinite(c.phi1) || !std::isfinite(c.dphi0) ||
        !std::isfinite(c.dphi1))
        return fallback;

    const auto t = cubic_minimizer(c);
    if (!t)
        return fallback;
    return std::clamp(*t, policy.t_lo, policy.t_hi);
}

// Trajectory ----------------------------------------------------------------

Trajectory::Trajectory(BackoffPolicy policy, PointState origin) : policy_(policy)
{
    points_.push_back(std::move(origin));
}

void Trajectory::push(PointState candidate)
{
    if (static_cast<int>(stages()) >= policy_.max_stages())
        throw std::logic_error("trajectory already has max_steps + 1 stages");
    points_.push_back(std::move(candidate));
}

double Trajectory::scale(std::size_t origin, std::size_t stage)
{
    if (stage <= 1)
        return 1.0;
    const auto key = std::make_pair(origin, stage);
    if (auto it = scales_.find(key); it != scales_.end())
        return it->second;

    double s = 1.0;
    switch (policy_.mode) {
    case BackoffMode::None:
        throw std::logic_error("no back-off stages without a back-off policy");
    case BackoffMode::Static:
        s = std::pow(policy_.factor, static_cast<double>(stage - 1));
        break;
    case BackoffMode::Dynamic:
        s = scale(origin, stage - 1) * dynamic_gamma(point(origin), point(stage - 1), policy_);
        break;
    }
    scales_.emplace(key, s);
    return s;
}

const PrecisionGaussian* Trajectory::kernel(std::size_t origin, std::size_t stage)
{
    const auto key = std::make_pair(origin, stage);
    auto it = kernels_.find(key);
    if (it == kernels_.end()) {
        const PointState& o = point(origin);
        std::optional<PrecisionGaussian> k;
        if (o.proposal)
            k = stage == 1 ? *o.proposal : o.proposal->contract(o.x, scale(origin, stage));
        else if (o.inside() && stage == 1)
            ++warnings_;
        it = kernels_.emplace(key, std::move(k)).first;
    }
    return it->second ? &*it->second : nullptr;
}

double Trajectory::log_path(std::size_t origin, std::size_t candidate, std::size_t stage)
{
    double lp = point(origin).log_post;
    if (lp == neg_inf)
        return neg_inf;
    for (std::size_t i = 1; i < stage; ++i) {
        if (i == origin || i == candidate)
            throw std::logic_error("path endpoints may not be intermediate proposals");
        const PrecisionGaussian* k = kernel(origin, i);
        if (!k)
            return neg_inf;
        lp += k->log_pdf(point(i).x);
        const double a = accept(origin, i, i);
        if (a >= 1.0)
            return neg_inf;
        lp += std::log1p(-a);
    }
    const PrecisionGaussian* k = kernel(origin, stage);
    if (!k)
        return neg_inf;
    return lp + k->log_pdf(point(candidate).x);
}

double Trajectory::accept(std::size_t origin, std::size_t candidate, std::size_t stage)
{
    const auto key = std::make_tuple(origin, candidate, stage);
    if (auto it = accepts_.find(key); it != accepts_.end())
        return it->second;

    double a = 0.0;
    if (point(candidate).log_post != neg_inf) {
        const double forward = log_path(origin, candidate, stage);
        const double reverse = log_path(candidate, origin, stage);
        if (reverse == neg_inf)
            a = 0.0;
        else if (forward == neg_inf)
            a = 1.0;
        else
            a = std::exp(std::min(0.0, reverse - forward));
        if (std::isnan(a))
            a = 0.0;
    }
    accepts_.emplace(key, a);
    return a;
}

double accept_prob(Trajectory& trajectory)
{
    const std::size_t k = trajectory.stages();
    if (k == 0)
        throw std::logic_error("accept_prob needs at least one proposal");
    return trajectory.accept(0, k, k);
}

StepResult step(const PointState& current, const BackoffPolicy& policy, const GaussianPrior& prior,
                ModelHandle& model, Rng& rng)
{
    if (!current.inside())
        throw InvalidArgument("step: current point is outside the domain");
    if (!current.proposal)
        throw SingularProposal("step: no Gauss-Newton proposal at the current point");

    Trajectory traj(policy, current);
    const std::size_t stages = static_cast<std::size_t>(policy.max_stages());
    for (std::size_t s = 1; s <= stages; ++s) {
        const PrecisionGaussian* k = traj.kernel(0, s);
        Vector z = k->sample(rng.normals(current.x.size()));
        traj.push(make_point_state(prior, model, std::move(z)));
        const double a = traj.accept(0, s, s);
        const double u = rng.uniform();
        if (u < a)
            return {traj.point(s), static_cast<int>(s), traj.warnings()};
    }
    return {current, -1, traj.warnings()};
}

} // namespace gnm
