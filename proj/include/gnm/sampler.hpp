#ifndef GNM_SAMPLER_HPP
#define GNM_SAMPLER_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "gnm/kernel.hpp"
#include "gnm/posterior.hpp"
#include "gnm/rng.hpp"

namespace gnm {

/// Acceptances per back-off stage plus a reject bucket (stage -1).
class StepCount {
  public:
    explicit StepCount(int max_steps = 0) : accepted_(static_cast<std::size_t>(max_steps) + 1, 0) {}

    void record(int stage);
    /// Grows to max_steps + 1 stages. Never drops a non-empty bucket.
    void resize(int max_steps);

    std::uint64_t rejects() const { return rejects_; }
    std::uint64_t at(int stage) const;
    int stages() const { return static_cast<int>(accepted_.size()); }
    std::uint64_t accepted() const;
    std::uint64_t total() const { return accepted() + rejects_; }

    /// Keys -1, 1, 2, ..., stages().
    std::map<int, std::uint64_t> as_map() const;
    static StepCount from_map(const std::map<int, std::uint64_t>& counts);

    friend bool operator==(const StepCount&, const StepCount&) = default;

  private:
    std::vector<std::uint64_t> accepted_;
    std::uint64_t rejects_ = 0;
};

class Sampler;

struct RunOptions {
    int divs = 1;
    /// Print the completed percentage after each division.
    bool visual = false;
    std::ostream* progress = nullptr;
    /// Safe mode: checkpoint after every division.
    std::optional<std::filesystem::path> safe;
    /// Called after each division (and its checkpoint); returning false stops
    /// the run early.
    std::function<bool(int division, const Sampler&)> on_division;
};

using ChainView = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// Drives one Markov chain.
///
/// The counters describe every transition ever made, including those whose
/// rows were later burned: n_accepted + rejects == n_samples + burned.
class Sampler {
  public:
    /// Flat prior centred on x0, no back-off. Throws InitialGuessOutsideDomain
    /// or SingularProposal.
    Sampler(Vector x0, ModelHandle model, std::uint64_t seed = 0);
    Sampler(Vector x0, ModelHandle model, GaussianPrior prior, std::uint64_t seed = 0);

    void set_prior(Vector mean, Matrix precision);
    void set_static(int max_steps, double factor);
    void set_dynamic(int max_steps, double t_lo = 0.05, double t_hi = 0.95);
    void set_policy(const BackoffPolicy& policy);
    void reseed(std::uint64_t seed) { rng_ = Rng(seed); }

    void run_sample(std::int64_t n_samples, const RunOptions& options = {});
    void burn(std::int64_t n_burned);

    /// Unnormalized posterior density at x; 0 outside the domain.
    double posterior_at(const Vector& x);

    void save_checkpoint(const std::filesystem::path& path) const;
    static Sampler load_checkpoint(const std::filesystem::path& path, ModelHandle model);

    ChainView chain() const;
    const std::vector<double>& chain_data() const { return chain_; }
    Index dim() const { return model_.dim_in(); }
    std::int64_t n_samples() const;
    std::uint64_t n_accepted() const { return step_count_.accepted(); }
    std::uint64_t n_steps() const { return step_count_.total(); }
    double accept_rate() const;
    std::uint64_t call_count() const { return model_.call_count(); }
    const StepCount& step_count() const { return step_count_; }
    std::int64_t burned() const { return burned_; }
    std::uint64_t warnings() const { return warnings_; }
    const PointState& current() const { return current_; }
    const GaussianPrior& prior() const { return prior_; }
    const BackoffPolicy& policy() const { return policy_; }
    const Rng& rng() const { return rng_; }

  private:
    Sampler() = default;

    ModelHandle model_;
    GaussianPrior prior_;
    BackoffPolicy policy_;
    Rng rng_;
    PointState current_;
    std::vector<double> chain_;
    StepCount step_count_;
    std::int64_t burned_ = 0;
    std::uint64_t warnings_ = 0;
};

} // namespace gnm

#endif // GNM_SAMPLER_HPP
