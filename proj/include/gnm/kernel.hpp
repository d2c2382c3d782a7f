#ifndef GNM_KERNEL_HPP
#define GNM_KERNEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gnm/posterior.hpp"
#include "gnm/rng.hpp"

namespace gnm {

enum class BackoffMode { None, Static, Dynamic };

std::string to_string(BackoffMode mode);
BackoffMode backoff_mode_from_string(const std::string& name);

/// How a rejected proposal is retried within one transition.
///
/// Every back-off contracts the Gauss-Newton kernel toward the current point
/// (PrecisionGaussian::contract) with a step that shrinks multiplicatively.
/// Static mode multiplies the step by `factor` at every back-off. Dynamic mode
/// takes the factor from a cubic fit of |f|^2 along the last rejected step,
/// clamped to [t_lo, t_hi]; `factor` is then the fallback used when the fit
/// has no interior minimum.
struct BackoffPolicy {
    BackoffMode mode = BackoffMode::None;
    int max_steps = 0;
    double factor = 0.5;
    double t_lo = 0.05;
    double t_hi = 0.95;

    static BackoffPolicy none();
    static BackoffPolicy fixed(int max_steps, double factor);
    static BackoffPolicy dynamic(int max_steps, double t_lo = 0.05, double t_hi = 0.95);

    /// Throws InvalidPolicy.
    void validate() const;
    int max_stages() const { return max_steps + 1; }
};

/// phi(0), phi(1), phi'(0), phi'(1) of a one-dimensional objective.
struct CubicData {
    double phi0 = 0.0;
    double phi1 = 0.0;
    double dphi0 = 0.0;
    double dphi1 = 0.0;
};

/// Local minimizer in the open interval (0, 1) of the cubic Hermite
/// interpolant of `c`, or nullopt when it has none there.
std::optional<double> cubic_minimizer(const CubicData& c);

/// Value of the cubic Hermite interpolant of `c` at t.
double cubic_interpolant(const CubicData& c, double t);

/// Dilation factor for the next back-off from x after rejecting z. Uses only
/// cached evaluations.
double dynamic_gamma(const PointState& x, const PointState& z, const BackoffPolicy& policy);

/// The points visited by one transition: index 0 is the origin x, index i
/// the i-th proposal z_i.
///
/// Kernels and acceptance probabilities are computed lazily for any
/// (origin, stage) and cached. The stage-s kernel from a point depends on
/// that point and on the intermediate proposals z_1..z_{s-1}, which is what
/// lets the reverse path out of z_k be evaluated with the same rule as the
/// forward one.
class Trajectory {
  public:
    Trajectory(BackoffPolicy policy, PointState origin);

    void push(PointState candidate);

    /// Number of proposals pushed so far.
    std::size_t stages() const { return points_.size() - 1; }
    const PointState& point(std::size_t i) const { return points_.at(i); }
    const BackoffPolicy& policy() const { return policy_; }

    /// Cumulative contraction step of the stage-`stage` kernel out of `origin`.
    double scale(std::size_t origin, std::size_t stage);

    /// Stage kernel out of `origin`, or nullptr when the point has no
    /// Gauss-Newton proposal.
    const PrecisionGaussian* kernel(std::size_t origin, std::size_t stage);

    /// A(origin, candidate | z_1..z_{stage-1}).
    double accept(std::size_t origin, std::size_t candidate, std::size_t stage);

    /// log of p(o) K_1(o,z_1)[1-A(o,z_1)] ... K_stage(o,c). May be -inf.
    double log_path(std::size_t origin, std::size_t candidate, std::size_t stage);

    /// Number of kernels that could not be built (singular proposals).
    std::uint64_t warnings() const { return warnings_; }

  private:
    BackoffPolicy policy_;
    std::vector<PointState> points_;
    std::map<std::pair<std::size_t, std::size_t>, double> scales_;
    std::map<std::pair<std::size_t, std::size_t>, std::optional<PrecisionGaussian>> kernels_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> accepts_;
    std::uint64_t warnings_ = 0;
};

/// Acceptance probability of the last proposal of `trajectory`.
double accept_prob(Trajectory& trajectory);

struct StepResult {
    PointState next;
    /// Stage at which a proposal was accepted (1 = undilated), -1 if all
    /// stages rejected.
    int accepted_at = -1;
    std::uint64_t warnings = 0;
};

/// One Gauss-Newton-Metropolis transition with back-off.
///
/// Each stage draws the proposal normals, evaluates the model once at the
/// proposal, then draws one uniform for the accept test.
StepResult step(const PointState& current, const BackoffPolicy& policy,
                const GaussianPrior& prior, ModelHandle& model, Rng& rng);

} // namespace gnm

#endif // GNM_KERNEL_HPP
