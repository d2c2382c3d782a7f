#ifndef GNM_EXAMPLES_HPP
#define GNM_EXAMPLES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gnm/jtest.hpp"
#include "gnm/model.hpp"
#include "gnm/posterior.hpp"

namespace gnm {

/// Measurement times t_k = window * k / (m - 1).
Vector uniform_times(Index m, double window = 3.0);

/// y_k = sum_i w_i exp(-lambda_i t_k) + noise_sd * N(0,1), deterministic in seed.
ExpSeriesArgs exp_series_datagen(const Vector& true_params, const Vector& times, double noise_sd,
                                 std::uint64_t seed);

/// A ready-to-run bundled problem.
struct ExampleProblem {
    std::string name;
    ModelHandle model;
    Vector x0;
    GaussianPrior prior;
    JtestDomain jtest_box;
    Vector plot_min;
    Vector plot_max;
};

struct ExampleParams {
    std::optional<double> y; // well depth; quickstart 1, well 4
    double sigma = 0.5;
    std::uint64_t data_seed = 1;
    Vector times;            // expseries; empty means expseries_times()
    double jac_offset = 0.0; // badjac: added to the quickstart Jacobian
};

/// quickstart, well, simple2d, expseries, linear and badjac.
ExampleProblem make_example(const std::string& name, const ExampleParams& params = {});
std::vector<std::string> example_names();

// Exp-series reference setup.
/// Integer measurement times 0, 1, ..., 9.
Vector expseries_times();
Vector expseries_true_params();
Vector expseries_prior_mean();
inline constexpr double expseries_prior_precision = 0.5;
inline constexpr double expseries_noise_sd = 0.1;

} // namespace gnm

#endif // GNM_EXAMPLES_HPP
