#include "gnm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

void check_box(const SampleMatrix& chain, int n_bins, const Vector& d_min, const Vector& d_max)
{
    if (chain.rows() == 0)
        throw EmptyChain("cannot bin an empty chain");
    if (d_min.size() != chain.cols() || d_max.size() != chain.cols())
        throw DimensionMismatch("histogram box must match the chain dimension");
    if (n_bins < 1)
        throw InvalidArgument("n_bins must be at least 1");
    if (!(d_min.array() < d_max.array()).all())
        throw InvalidArgument("histogram box is empty: need d_min < d_max");
}

/// Bin of v in [lo, hi] split into n bins of width w, or -1 outside.
/// The upper edge belongs to the last bin.
int bin_of(double v, double lo, double hi, double w, int n)
{
    if (!(v >= lo && v <= hi))
        return -1;
    const int b = static_cast<int>((v - lo) / w);
    return std::min(b, n - 1);
}

HistogramResult finish_histogram(const Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>& counts,
                                 Index total, const Vector& d_min, const Vector& d_max)
{
    const Index n = counts.rows();
    const Index bins = counts.cols();
    HistogramResult h{Matrix(n, bins), Matrix(n, bins), Matrix(n, bins)};
    const double N = static_cast<double>(total);
    for (Index j = 0; j < n; ++j) {
        const double w = (d_max(j) - d_min(j)) / static_cast<double>(bins);
        for (Index b = 0; b < bins; ++b) {
            const double c = static_cast<double>(counts(j, b));
            h.centers(j, b) = d_min(j) + (static_cast<double>(b) + 0.5) * w;
            h.density(j, b) = c / (N * w);
            h.err(j, b) = std::sqrt(c) / (N * w);
        }
    }
    return h;
}

using CountMatrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

double lag_sum(std::span<const double> x, double mean, std::size_t t)
{
    double s = 0.0;
    const std::size_t N = x.size();
    for (std::size_t i = 0; i + t < N; ++i)
        s += (x[i] - mean) * (x[i + t] - mean);
    return s / static_cast<double>(N - t);
}

double series_mean(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x)
        s += v;
    return s / static_cast<double>(x.size());
}

/// Shared window search; `fill` computes C(t) for t in [from, to).
template <typename Fill>
AcorResult acor_impl(std::span<const double> series, int k, Fill fill)
{
    if (k < 1)
        throw InvalidArgument("acor window parameter k must be at least 1");
    const std::size_t N = series.size();
    if (N < 100 * static_cast<std::size_t>(k))
        throw SeriesTooShort("acor needs at least " + std::to_string(100 * k) + " samples, got " +
                             std::to_string(N));
    AcorResult res;
    res.mean = series_mean(series);
    std::vector<double> cov(1);
    fill(series, res.mean, cov, 0, 1);
    const double c0 = cov[0];
    if (!(c0 > 0.0)) {
        res.tau = 1.0;
        res.sigma = 0.0;
        return res;
    }

    constexpr std::size_t block = 64;
    const std::size_t limit = N / 10;
    double tau = 1.0;
    for (std::size_t T = 1; T < limit; ++T) {
        if (T >= cov.size()) {
            const std::size_t to = std::min(limit, cov.size() + block);
            const std::size_t from = cov.size();
            cov.resize(to);
            fill(series, res.mean, cov, from, to);
        }
        tau += 2.0 * cov[T] / c0;
        if (static_cast<double>(T) >= static_cast<double>(k) * tau) {
            res.tau = tau;
            res.sigma = std::sqrt(tau * c0 / static_cast<double>(N));
            return res;
        }
    }
    throw NonConvergentWindow("no self-consistent acor window below N/10");
}

} // namespace

HistogramResult error_bars_serial(const SampleMatrix& chain, int n_bins, const Vector& d_min,
                                  const Vector& d_max)
{
    check_box(chain, n_bins, d_min, d_max);
    const Index n = chain.cols();
    CountMatrix counts = CountMatrix::Zero(n, n_bins);
    for (Index j = 0; j < n; ++j) {
        const double w = (d_max(j) - d_min(j)) / n_bins;
        for (Index s = 0; s < chain.rows(); ++s) {
            const int b = bin_of(chain(s, j), d_min(j), d_max(j), w, n_bins);
            if (b >= 0)
                ++counts(j, b);
        }
    }
    return finish_histogram(counts, chain.rows(), d_min, d_max);
}

HistogramResult error_bars(const SampleMatrix& chain, int n_bins, const Vector& d_min,
                           const Vector& d_max)
{
    check_box(chain, n_bins, d_min, d_max);
    const Index n = chain.cols();
    const Index rows = chain.rows();
    CountMatrix counts = CountMatrix::Zero(n, n_bins);

#pragma omp parallel
    {
        CountMatrix local = CountMatrix::Zero(n, n_bins);
#pragma omp for schedule(static)
        for (Index s = 0; s < rows; ++s) {
            for (Index j = 0; j < n; ++j) {
                const double w = (d_max(j) - d_min(j)) / n_bins;
                const int b = bin_of(chain(s, j), d_min(j), d_max(j), w, n_bins);
                if (b >= 0)
                    ++local(j, b);
            }
        }
#pragma omp critical
        counts += local;
    }
    return finish_histogram(counts, rows, d_min, d_max);
}

Histogram2D error_bars_2d(const SampleMatrix& chain, Index i, Index j, int n_bins,
                          const Vector& d_min, const Vector& d_max)
{
    check_box(chain, n_bins, d_min, d_max);
    if (i < 0 || j < 0 || i >= chain.cols() || j >= chain.cols() || i == j)
        throw InvalidArgument("marginal needs two distinct coordinates of the chain");
    const double wi = (d_max(i) - d_min(i)) / n_bins;
    const double wj = (d_max(j) - d_min(j)) / n_bins;
    CountMatrix counts = CountMatrix::Zero(n_bins, n_bins);
    for (Index s = 0; s < chain.rows(); ++s) {
        const int bi = bin_of(chain(s, i), d_min(i), d_max(i), wi, n_bins);
        const int bj = bin_of(chain(s, j), d_min(j), d_max(j), wj, n_bins);
        if (bi >= 0 && bj >= 0)
            ++counts(bi, bj);
    }
    Histogram2D h;
    h.centers_i.resize(n_bins);
    h.centers_j.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        h.centers_i(b) = d_min(i) + (b + 0.5) * wi;
        h.centers_j(b) = d_min(j) + (b + 0.5) * wj;
    }
    const double scale = static_cast<double>(chain.rows()) * wi * wj;
    h.density = counts.cast<double>() / scale;
    h.err = counts.cast<double>().cwiseSqrt() / scale;
    return h;
}

Vector autocovariance_serial(std::span<const double> series, Index max_lag)
{
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= series.size())
        throw LagTooLarge("max_lag must be below the series length");
    const double mean = series_mean(series);
    Vector c(max_lag + 1);
    for (Index t = 0; t <= max_lag; ++t)
        c(t) = lag_sum(series, mean, static_cast<std::size_t>(t));
    return c;
}

Vector autocovariance(std::span<const double> series, Index max_lag)
{
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= series.size())
        throw LagTooLarge("max_lag must be below the series length");
    const double mean = series_mean(series);
    Vector c(max_lag + 1);
#pragma omp parallel for schedule(dynamic)
    for (Index t = 0; t <= max_lag; ++t)
        c(t) = lag_sum(series, mean, static_cast<std::size_t>(t));
    return c;
}

AcorResult acor_serial(std::span<const double> series, int k)
{
    return acor_impl(series, k,
                     [](std::span<const double> x, double mean, std::vector<double>& cov,
                        std::size_t from, std::size_t to) {
                         for (std::size_t t = from; t < to; ++t)
                             cov[t] = lag_sum(x, mean, t);
                     });
}

AcorResult acor(std::span<const double> series, int k)
{
    return acor_impl(series, k,
                     [](std::span<const double> x, double mean, std::vector<double>& cov,
                        std::size_t from, std::size_t to) {
                         const auto lo = static_cast<std::int64_t>(from);
                         const auto hi = static_cast<std::int64_t>(to);
#pragma omp parallel for schedule(static)
                         for (std::int64_t t = lo; t < hi; ++t)
                             cov[static_cast<std::size_t>(t)] =
                                 lag_sum(x, mean, static_cast<std::size_t>(t));
                     });
}

std::map<int, double> step_percentages(const StepCount& counts)
{
    std::map<int, double> out;
    const double total = static_cast<double>(counts.total());
    for (const auto& [stage, c] : counts.as_map())
        out[stage] = total > 0.0 ? static_cast<double>(c) / total : 0.0;
    return out;
}

} // namespace gnm
