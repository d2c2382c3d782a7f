#ifndef GNM_DIAGNOSTICS_HPP
#define GNM_DIAGNOSTICS_HPP

#include <cstdint>
#include <map>
#include <span>

#include "gnm/sampler.hpp"
#include "gnm/types.hpp"

namespace gnm {

using SampleMatrix = Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// Per-dimension marginal histograms, all n x n_bins.
struct HistogramResult {
    Matrix centers;
    Matrix density;
    Matrix err;
};

/// Bins every coordinate over [d_min, d_max] with Poisson error bars:
/// density = c / (N w), err = sqrt(c) / (N w). Samples outside the box are
/// dropped, not clipped.
HistogramResult error_bars(const SampleMatrix& chain, int n_bins, const Vector& d_min,
                           const Vector& d_max);
HistogramResult error_bars_serial(const SampleMatrix& chain, int n_bins, const Vector& d_min,
                                  const Vector& d_max);

/// Joint histogram of coordinates (i, j); rows index bins of i.
struct Histogram2D {
    Vector centers_i;
    Vector centers_j;
    Matrix density;
    Matrix err;
};

Histogram2D error_bars_2d(const SampleMatrix& chain, Index i, Index j, int n_bins,
                          const Vector& d_min, const Vector& d_max);

struct AcorResult {
    double tau = 1.0;
    double mean = 0.0;
    double sigma = 0.0;   // standard error of the mean
};

/// Integrated autocorrelation time with the self-consistent window: the
/// smallest lag T with T >= k * tau(T). Needs at least 100 k samples.
AcorResult acor(std::span<const double> series, int k = 5);
AcorResult acor_serial(std::span<const double> series, int k = 5);

/// C(t) = 1/(N-t) sum (x_s - mean)(x_{s+t} - mean), t = 0..max_lag.
Vector autocovariance(std::span<const double> series, Index max_lag);
Vector autocovariance_serial(std::span<const double> series, Index max_lag);

/// Fraction of transitions per stage (-1 = rejected).
std::map<int, double> step_percentages(const StepCount& counts);

} // namespace gnm

#endif // GNM_DIAGNOSTICS_HPP
