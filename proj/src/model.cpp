#include "gnm/model.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "gnm/errors.hpp"

namespace gnm {

ModelHandle::ModelHandle(ModelFn fn, Index dim_in, std::optional<Index> dim_out)
    : fn_(std::move(fn)), dim_in_(dim_in), dim_out_(dim_out)
{
    if (!fn_)
        throw InvalidArgument("model function is empty");
    if (dim_in_ <= 0)
        throw DimensionMismatch("model input dimension must be positive");
}

ModelEval ModelHandle::checked_call(const Vector& x, std::optional<Index> m) const
{
    if (x.size() != dim_in_)
        throw DimensionMismatch("model expects " + std::to_string(dim_in_) + " parameters, got " +
                                std::to_string(x.size()));
    ModelEval out;
    try {
        out = fn_(x);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw UserFunctionFailure(std::string("user model failed: ") + e.what());
    } catch (...) {
        throw UserFunctionFailure("user model failed with a non-standard exception");
    }
    if (!out.inside)
        return out;

    const Index rows = out.residual.size();
    if (out.jacobian.rows() != rows || out.jacobian.cols() != dim_in_)
        throw DimensionMismatch("Jacobian is " + std::to_string(out.jacobian.rows()) + "x" +
                                std::to_string(out.jacobian.cols()) + ", expected " +
                                std::to_string(rows) + "x" + std::to_string(dim_in_));
    if (m && rows != *m)
        throw DimensionMismatch("residual has length " + std::to_string(rows) + ", expected " +
                                std::to_string(*m));
    return out;
}

ModelEval ModelHandle::evaluate(const Vector& x)
{
    ++call_count_;
    ModelEval out = checked_call(x, dim_out_);
    if (out.inside && !dim_out_)
        dim_out_ = out.residual.size();
    return out;
}

ModelEval ModelHandle::evaluate_uncounted(const Vector& x) const
{
    return checked_call(x, dim_out_);
}

// Bundled models -----------------------------------------------------------

ModelEval quickstart_model(const Vector& x, const WellArgs& args)
{
    if (x.size() != 1)
        throw DimensionMismatch("quickstart model is one-dimensional");
    ModelEval out;
    out.inside = true;
    out.residual.resize(1);
    out.jacobian.resize(1, 1);
    out.residual(0) = (x(0) * x(0) - args.y) / args.sigma;
    out.jacobian(0, 0) = 2.0 * x(0) / args.sigma;
    return out;
}

void ExpSeriesArgs::validate() const
{
    if (data.size() != times.size() || noise_sd.size() != times.size())
        throw DimensionMismatch("times, data and noise_sd must share one length");
    if (times.size() == 0)
        throw DimensionMismatch("exp-series model needs at least one observation");
    if ((noise_sd.array() <= 0.0).any())
        throw InvalidArgument("noise standard deviations must be positive");
}

ModelEval exp_series_model(const Vector& x, const ExpSeriesArgs& args)
{
    if (x.size() % 2 != 0 || x.size() == 0)
        throw DimensionMismatch("exp-series parameters are (w_1..w_d, lambda_1..lambda_d)");
    if (args.data.size() != args.times.size() || args.noise_sd.size() != args.times.size())
        throw DimensionMismatch("times, data and noise_sd must share one length");

    const Index d = x.size() / 2;
    const Index m = args.times.size();
    ModelEval out;
    out.inside = true;
    out.residual.resize(m);
    out.jacobian.resize(m, 2 * d);
    for (Index k = 0; k < m; ++k) {
        const double t = args.times(k);
        const double inv_sd = 1.0 / args.noise_sd(k);
        double g = 0.0;
        for (Index i = 0; i < d; ++i) {
            const double w = x(i);
            const double e = std::exp(-x(d + i) * t);
            g += w * e;
            out.jacobian(k, i) = e * inv_sd;
            out.jacobian(k, d + i) = -w * t * e * inv_sd;
        }
        out.residual(k) = (g - args.data(k)) * inv_sd;
    }
    return out;
}

ModelEval linear_model(const Vector& x, const LinearArgs& args)
{
    if (args.A.cols() != x.size() || args.A.rows() != args.b.size())
        throw DimensionMismatch("linear model: A, b and x shapes disagree");
    ModelEval out;
    out.inside = true;
    out.residual = args.A * x - args.b;
    out.jacobian = args.A;
    return out;
}

ModelEval ring_model(const Vector& x, const RingArgs& args)
{
    if (x.size() != 2)
        throw DimensionMismatch("ring model is two-dimensional");
    ModelEval out;
    out.inside = true;
    out.residual.resize(1);
    out.jacobian.resize(1, 2);
    out.residual(0) = (x.squaredNorm() - args.radius * args.radius) / args.sigma;
    out.jacobian(0, 0) = 2.0 * x(0) / args.sigma;
    out.jacobian(0, 1) = 2.0 * x(1) / args.sigma;
    return out;
}

} // namespace gnm
