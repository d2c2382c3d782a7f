// Serial reference vs OpenMP kernels. Each pair is run on identical input,
// checked for equal results, and timed as the best of a few repetitions.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "gnm/diagnostics.hpp"
#include "gnm/examples.hpp"
#include "gnm/jtest.hpp"
#include "gnm/rng.hpp"

using namespace gnm;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double best_of(int reps, const std::function<void()>& f)
{
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, bool same)
{
    std::printf("%-24s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                same ? "equal" : "MISMATCH");
}

std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed)
{
    Rng rng(seed);
    const Vector e = rng.normals(static_cast<Index>(n));
    std::vector<double> x(n);
    x[0] = e(0);
    for (std::size_t i = 1; i < n; ++i)
        x[i] = rho * x[i - 1] + e(static_cast<Index>(i));
    return x;
}

} // namespace

int main()
{
    constexpr int reps = 3;
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-24s %10s %10s %9s\n", "kernel", "serial s", "openmp s", "speedup");

    {
        JtestOptions opts;
        opts.N = 20000;
        double a = 0, b = 0;
        const double ts = best_of(reps, [&] {
            auto p = make_example("expseries");
            Rng rng(1);
            a = jtest_serial(p.model, p.jtest_box, opts, rng);
        });
        const double tp = best_of(reps, [&] {
            auto p = make_example("expseries");
            Rng rng(1);
            b = jtest(p.model, p.jtest_box, opts, rng);
        });
        row("jtest (expseries)", ts, tp, a == b);
    }

    {
        Rng rng(2);
        RowMatrix chain(2000000, 4);
        for (Index i = 0; i < chain.rows(); ++i)
            chain.row(i) = rng.normals(4).transpose();
        const Vector lo = Vector::Constant(4, -4.0), hi = Vector::Constant(4, 4.0);
        HistogramResult a, b;
        const double ts = best_of(reps, [&] { a = error_bars_serial(chain, 200, lo, hi); });
        const double tp = best_of(reps, [&] { b = error_bars(chain, 200, lo, hi); });
        row("error_bars", ts, tp, a.density == b.density && a.err == b.err);
    }

    const auto x = ar1(2000000, 0.95, 3);
    {
        Vector a, b;
        const double ts = best_of(reps, [&] { a = autocovariance_serial(x, 500); });
        const double tp = best_of(reps, [&] { b = autocovariance(x, 500); });
        row("autocovariance", ts, tp, (a - b).cwiseAbs().maxCoeff() <= 1e-12 * a(0));
    }
    {
        AcorResult a, b;
        const double ts = best_of(reps, [&] { a = acor_serial(x); });
        const double tp = best_of(reps, [&] { b = acor(x); });
        row("acor", ts, tp, a.tau == b.tau && a.sigma == b.sigma);
    }
    return 0;
}
