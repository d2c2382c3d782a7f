#include <doctest.h>

#include <cmath>
#include <limits>

#include "gnm/errors.hpp"
#include "gnm/examples.hpp"
#include "gnm/jtest.hpp"
#include "support.hpp"

using namespace gnm;
using testsupport::vec;

namespace {

double run(const char* name, std::uint64_t seed = 1, const JtestOptions& opts = {},
           double offset = 0.0)
{
    ExampleParams params;
    params.jac_offset = offset;
    auto p = make_example(name, params);
    Rng rng(seed);
    return jtest(p.model, p.jtest_box, opts, rng);
}

} // namespace

TEST_CASE("options")
{
    const JtestOptions o;
    CHECK(o.dx == 2e-4);
    CHECK(o.N == 1000);
    CHECK(o.eps_max == 1e-4);
    CHECK(o.p == 2.0);
    CHECK(o.l_max == 50);
    CHECK(o.r == 0.5);
    JtestOptions bad;
    bad.r = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = {};
    bad.p = 0.5;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = {};
    bad.N = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("bundled models pass")
{
    for (const auto& name : {"quickstart", "well", "simple2d", "expseries", "linear"})
        CHECK(run(name) == 0.0);
}

TEST_CASE("quickstart on the stated box")
{
    auto p = make_example("quickstart");
    Rng rng(2);
    CHECK(jtest(p.model, JtestDomain{vec({-2.0}), vec({2.0})}, {}, rng) == 0.0);
}

TEST_CASE("exp series on the stated box")
{
    auto p = make_example("expseries");
    Rng rng(3);
    CHECK(jtest(p.model, JtestDomain{Vector::Constant(4, 0.1), Vector::Constant(4, 5.0)}, {}, rng) ==
          0.0);
}

TEST_CASE("a wrong Jacobian is caught")
{
    const double err = run("badjac", 1, {}, 0.01);
    CHECK(err >= 0.01 - 1e-4);
    CHECK(err >= 9e-3);
}

TEST_CASE("failures are never below the threshold")
{
    for (double offset : {1e-6, 5e-5, 9e-5, 2e-4, 1e-3, 0.1}) {
        JtestOptions opts;
        opts.N = 50;
        const double err = run("badjac", 4, opts, offset);
        CHECK((err == 0.0 || err > opts.eps_max));
        if (offset < 5e-5)
            CHECK(err == 0.0);
        if (offset >= 2e-4)
            CHECK(err > 0.0);
    }
}

TEST_CASE("call accounting when every point passes at the first stage")
{
    auto p = make_example("linear");
    JtestOptions opts;
    opts.N = 137;
    Rng a(5), b(5);
    CHECK(jtest(p.model, p.jtest_box, opts, a) == 0.0);
    CHECK(p.model.call_count() == 137u * (2 * 2 + 1));
    auto q = make_example("linear");
    CHECK(jtest_serial(q.model, q.jtest_box, opts, b) == 0.0);
    CHECK(q.model.call_count() == 137u * (2 * 2 + 1));
    CHECK(a == b);
}

TEST_CASE("deterministic and equal to the serial reference")
{
    for (double offset : {0.0, 0.01, 0.5}) {
        ExampleParams params;
        params.jac_offset = offset;
        auto p1 = make_example("badjac", params);
        auto p2 = make_example("badjac", params);
        auto p3 = make_example("badjac", params);
        Rng r1(6), r2(6), r3(6);
        const double e1 = jtest(p1.model, p1.jtest_box, {}, r1);
        const double e2 = jtest(p2.model, p2.jtest_box, {}, r2);
        const double e3 = jtest_serial(p3.model, p3.jtest_box, {}, r3);
        CHECK(e1 == e2);
        CHECK(e1 == e3);
        CHECK(p1.model.call_count() == p2.model.call_count());
        if (offset == 0.0)
            CHECK(p1.model.call_count() == p3.model.call_count());
        CHECK(r1 == r3);
    }
}

TEST_CASE("points near the domain edge are redrawn")
{
    // Defined for x < 0.5 only, checked on (0, 1).
    ModelHandle half(
        [](const Vector& x) {
            if (x(0) >= 0.5)
                return ModelEval::outside();
            return ModelEval{true, x.array().square(), (2.0 * x).asDiagonal().toDenseMatrix()};
        },
        1);
    Rng rng(7);
    JtestOptions opts;
    opts.N = 200;
    CHECK(jtest(half, JtestDomain{vec({0.0}), vec({1.0})}, opts, rng) == 0.0);

    ModelHandle nowhere([](const Vector&) { return ModelEval::outside(); }, 1);
    CHECK_THROWS_AS(jtest(nowhere, JtestDomain{vec({0.0}), vec({1.0})}, opts, rng),
                    PointOutsideDomain);
    CHECK_THROWS_AS(jtest_serial(nowhere, JtestDomain{vec({0.0}), vec({1.0})}, opts, rng),
                    PointOutsideDomain);
}

TEST_CASE("bad boxes")
{
    auto p = make_example("quickstart");
    Rng rng(8);
    CHECK_THROWS_AS(jtest(p.model, JtestDomain{vec({1.0}), vec({1.0})}, {}, rng), InvalidArgument);
    CHECK_THROWS_AS(jtest(p.model, JtestDomain{vec({0.0, 0.0}), vec({1.0, 1.0})}, {}, rng),
                    DimensionMismatch);
}

TEST_CASE("entrywise norm")
{
    const Matrix m = testsupport::mat(2, 2, {3.0, 0.0, 0.0, -4.0});
    CHECK(entrywise_norm(m, 2.0) == doctest::Approx(5.0));
    CHECK(entrywise_norm(m, 1.0) == doctest::Approx(7.0));
    CHECK(entrywise_norm(m, std::numeric_limits<double>::infinity()) == 4.0);
    CHECK(entrywise_norm(m, 3.0) == doctest::Approx(std::cbrt(27.0 + 64.0)));
}

TEST_CASE("norm order changes the verdict scale")
{
    JtestOptions opts;
    opts.p = std::numeric_limits<double>::infinity();
    CHECK(run("expseries", 9, opts) == 0.0);
    opts.p = 1.0;
    CHECK(run("simple2d", 9, opts) == 0.0);
}
