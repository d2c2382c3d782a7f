#include "gnm/examples.hpp"

#include <cmath>

#include "gnm/errors.hpp"
#include "gnm/rng.hpp"

namespace gnm {

Vector uniform_times(Index m, double window)
{
    if (m < 2)
        throw InvalidArgument("need at least two measurement times");
    return Vector::LinSpaced(m, 0.0, window);
}

ExpSeriesArgs exp_series_datagen(const Vector& true_params, const Vector& times, double noise_sd,
                                 std::uint64_t seed)
{
    if (true_params.size() == 0 || true_params.size() % 2 != 0)
        throw DimensionMismatch("exp-series parameters are (w_1..w_d, lambda_1..lambda_d)");
    if (noise_sd < 0.0)
        throw InvalidArgument("noise_sd must be non-negative");
    const Index d = true_params.size() / 2;
    const Index m = times.size();

    Rng rng(seed);
    const Vector noise = rng.normals(m);
    ExpSeriesArgs args;
    args.times = times;
    args.data.resize(m);
    for (Index k = 0; k < m; ++k) {
        double g = 0.0;
        for (Index i = 0; i < d; ++i)
            g += true_params(i) * std::exp(-true_params(d + i) * times(k));
        args.data(k) = g + noise_sd * noise(k);
    }
    // A noise-free data set still needs a positive scale for the residuals.
    args.noise_sd = Vector::Constant(m, noise_sd > 0.0 ? noise_sd : 1.0);
    return args;
}

Vector expseries_times()
{
    return uniform_times(10, 9.0);
}

Vector expseries_true_params()
{
    return (Vector(4) << 1.0, 2.5, 0.5, 3.1).finished();
}

Vector expseries_prior_mean()
{
    return (Vector(4) << 4.0, 2.0, 0.5, 1.0).finished();
}

std::vector<std::string> example_names()
{
    return {"quickstart", "well", "simple2d", "expseries", "linear", "badjac"};
}

namespace {

ExampleProblem well_problem(std::string name, double y, double sigma, double jac_offset)
{
    ExampleProblem p;
    p.name = std::move(name);
    const WellArgs args{y, sigma};
    p.model = ModelHandle(
        [args, jac_offset](const Vector& x) {
            ModelEval ev = quickstart_model(x, args);
            ev.jacobian(0, 0) += jac_offset;
            return ev;
        },
        1);
    const double root = std::sqrt(std::max(y, 0.0));
    p.x0 = Vector::Constant(1, root > 0.0 ? root : 1.0);
    p.prior = {Vector::Zero(1), Matrix::Identity(1, 1)};
    const double reach = std::max(2.0, root + 1.0);
    p.jtest_box = {Vector::Constant(1, -reach), Vector::Constant(1, reach)};
    p.plot_min = Vector::Constant(1, -(root + 2.0));
    p.plot_max = Vector::Constant(1, root + 2.0);
    return p;
}

} // namespace

ExampleProblem make_example(const std::string& name, const ExampleParams& params)
{
    if (name == "quickstart")
        return well_problem(name, params.y.value_or(1.0), params.sigma, 0.0);
    if (name == "well")
        return well_problem(name, params.y.value_or(4.0), params.sigma, 0.0);
    if (name == "badjac")
        return well_problem(name, params.y.value_or(1.0), params.sigma, params.jac_offset);

    ExampleProblem p;
    p.name = name;
    if (name == "simple2d") {
        p.model = make_model(ring_model, RingArgs{1.0, 0.2}, 2);
        p.x0 = (Vector(2) << 1.0, 0.0).finished();
        p.prior = {Vector::Zero(2), Matrix::Identity(2, 2)};
        p.jtest_box = {Vector::Constant(2, -2.0), Vector::Constant(2, 2.0)};
        p.plot_min = Vector::Constant(2, -2.0);
        p.plot_max = Vector::Constant(2, 2.0);
        return p;
    }
    if (name == "expseries") {
        const Vector times = params.times.size() > 0 ? params.times : expseries_times();
        ExpSeriesArgs args =
            exp_series_datagen(expseries_true_params(), times, expseries_noise_sd, params.data_seed);
        args.validate();
        p.model = make_model(exp_series_model, std::move(args), 4);
        p.prior = {expseries_prior_mean(), expseries_prior_precision * Matrix::Identity(4, 4)};
        p.x0 = p.prior.mean;
        p.jtest_box = {Vector::Constant(4, 0.1), Vector::Constant(4, 5.0)};
        p.plot_min = Vector::Constant(4, -2.0);
        p.plot_max = Vector::Constant(4, 8.0);
        return p;
    }
    if (name == "linear") {
        LinearArgs args;
        args.A = (Matrix(3, 2) << 2.0, 1.0, 1.0, 3.0, 0.0, 1.0).finished();
        args.b = (Vector(3) << 1.0, 2.0, 3.0).finished();
        p.model = make_model(linear_model, std::move(args), 2);
        p.x0 = Vector::Zero(2);
        p.prior = {Vector::Zero(2), 0.5 * Matrix::Identity(2, 2)};
        p.jtest_box = {Vector::Constant(2, -5.0), Vector::Constant(2, 5.0)};
        p.plot_min = Vector::Constant(2, -4.0);
        p.plot_max = Vector::Constant(2, 4.0);
        return p;
    }
    throw InvalidArgument("unknown example '" + name + "'");
}

} // namespace gnm
