#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gnm/errors.hpp"
#include "gnm/examples.hpp"
#include "gnm/quadrature.hpp"
#include "support.hpp"

using namespace gnm;
using testsupport::vec;

TEST_CASE("standard normal")
{
    const auto q = quadrature_1d([](double x) { return -0.5 * x * x; }, -8.0, 8.0, 10000);
    REQUIRE(q.grid.size() == 10000);
    CHECK(q.grid(0) == -8.0);
    CHECK(q.grid(9999) == 8.0);
    double worst = 0.0;
    for (Index i = 0; i < q.grid.size(); ++i) {
        const double exact = std::exp(-0.5 * q.grid(i) * q.grid(i)) / std::sqrt(2 * std::numbers::pi);
        worst = std::max(worst, std::abs(q.density(i) - exact));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("uniform density")
{
    const auto q = quadrature_1d([](double) { return 3.0; }, -1.0, 4.0, 101);
    for (Index i = 0; i < q.grid.size(); ++i)
        CHECK(q.density(i) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("large log values do not overflow")
{
    const auto q = quadrature_1d([](double x) { return 1e4 - x * x; }, -5.0, 5.0, 1001);
    CHECK(std::isfinite(q.density.maxCoeff()));
    CHECK(q.density(500) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-5));
}

TEST_CASE("argument checks")
{
    CHECK_THROWS_AS(quadrature_1d([](double) { return std::nan(""); }, 0.0, 1.0, 101),
                    NonFiniteDensity);
    CHECK_THROWS_AS(quadrature_1d([](double) { return std::numeric_limits<double>::infinity(); },
                                  0.0, 1.0, 101),
                    NonFiniteDensity);
    CHECK_THROWS_AS(
        quadrature_1d([](double) { return -std::numeric_limits<double>::infinity(); }, 0.0, 1.0, 101),
        NonFiniteDensity);
    CHECK_THROWS_AS(quadrature_1d([](double) { return 0.0; }, 0.0, 1.0, 100), InvalidArgument);
    CHECK_THROWS_AS(quadrature_1d([](double) { return 0.0; }, 1.0, 1.0, 101), InvalidArgument);
}

TEST_CASE("curve averages")
{
    // Linear density 2x on [0, 1] is reproduced exactly by its interpolant.
    const auto q = quadrature_1d([](double x) { return std::log(std::max(x, 1e-300)); }, 0.0, 1.0, 101);
    CHECK(curve_average(q, 0.2, 0.4) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(curve_average(q, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(curve_average(q, 0.333, 0.777) == doctest::Approx(2 * (0.333 + 0.777) / 2).epsilon(1e-12));
    // Outside the grid the curve is zero.
    CHECK(curve_average(q, 1.0, 2.0) == doctest::Approx(0.0));
    CHECK(curve_average(q, 0.5, 1.5) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("exp series data generation")
{
    const Vector truth = expseries_true_params();
    CHECK(truth == vec({1.0, 2.5, 0.5, 3.1}));
    const Vector t = uniform_times(10, 3.0);
    CHECK(t(0) == 0.0);
    CHECK(t(9) == 3.0);
    CHECK(t(3) == doctest::Approx(1.0));
    const Vector ints = expseries_times();
    CHECK(ints.size() == 10);
    CHECK(ints(9) == 9.0);
    CHECK(ints(4) == 4.0);

    const auto exact = exp_series_datagen(truth, t, 0.0, 1);
    for (Index k = 0; k < t.size(); ++k)
        CHECK(exact.data(k) == doctest::Approx(1.0 * std::exp(-0.5 * t(k)) + 2.5 * std::exp(-3.1 * t(k)))
                                   .epsilon(1e-15));
    CHECK(exact.data(0) == 3.5);

    const auto a = exp_series_datagen(truth, t, 0.1, 42);
    const auto b = exp_series_datagen(truth, t, 0.1, 42);
    const auto c = exp_series_datagen(truth, t, 0.1, 43);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
    CHECK(a.noise_sd == Vector::Constant(10, 0.1));
    CHECK((a.data - exact.data).cwiseAbs().maxCoeff() < 0.5);
}

TEST_CASE("bundled examples")
{
    for (const auto& name : example_names()) {
        auto p = make_example(name);
        CHECK(p.name == name);
        const Index n = p.model.dim_in();
        CHECK(p.x0.size() == n);
        CHECK_NOTHROW(p.prior.validate(n));
        CHECK_NOTHROW(p.jtest_box.validate(n));
        CHECK((p.plot_min.array() < p.plot_max.array()).all());
        CHECK(p.model.evaluate(p.x0).inside);
    }
    auto well = make_example("well");
    CHECK(well.x0(0) == 2.0);
    ExampleParams deep;
    deep.y = 9.0;
    CHECK(make_example("well", deep).x0(0) == 3.0);
    CHECK(make_example("expseries").x0 == expseries_prior_mean());
    CHECK(make_example("expseries").prior.precision == 0.5 * Matrix::Identity(4, 4));
    CHECK_THROWS_AS(make_example("nope"), InvalidArgument);
}
