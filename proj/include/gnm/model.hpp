#ifndef GNM_MODEL_HPP
#define GNM_MODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "gnm/types.hpp"

namespace gnm {

/// One evaluation of a user model at a point: the domain indicator chi(x),
/// the residual f(x) and its Jacobian. When `inside` is false the residual
/// and Jacobian carry no meaning and must not be read.
struct ModelEval {
    bool inside = false;
    Vector residual;
    Matrix jacobian;

    static ModelEval outside() { return {}; }
};

/// The user function. Arguments (data, noise levels, ...) are bound into the
/// callable, usually through make_model().
using ModelFn = std::function<ModelEval(const Vector&)>;

/// A user model together with its call counter.
///
/// The output dimension m is learned from the first evaluation that lands
/// inside the domain; every later evaluation must agree with it.
class ModelHandle {
  public:
    ModelHandle() = default;
    ModelHandle(ModelFn fn, Index dim_in,
                std::optional<Index> dim_out = std::nullopt);

    /// Evaluates the model at x and counts the call.
    ModelEval evaluate(const Vector& x);

    /// Evaluates without touching the counter or the learned output size.
    /// Safe to call concurrently as long as the user function is.
    ModelEval evaluate_uncounted(const Vector& x) const;

    Index dim_in() const { return dim_in_; }
    std::optional<Index> dim_out() const { return dim_out_; }
    std::uint64_t call_count() const { return call_count_; }

    void add_calls(std::uint64_t n) { call_count_ += n; }
    void set_call_count(std::uint64_t n) { call_count_ = n; }

  private:
    ModelEval checked_call(const Vector& x, std::optional<Index> m) const;

    ModelFn fn_;
    Index dim_in_ = 0;
    std::optional<Index> dim_out_;
    std::uint64_t call_count_ = 0;
};

/// Binds an argument bundle to a two-argument model function.
template <typename Fn, typename Args>
ModelHandle make_model(Fn fn, Args args, Index dim_in)
{
    return ModelHandle(
        [fn = std::move(fn), args = std::move(args)](const Vector& x) { return fn(x, args); },
        dim_in);
}

// Bundled models ----------------------------------------------------------

struct WellArgs {
    double y = 1.0;
    double sigma = 0.5;
};

/// f(x) = (x^2 - y) / sigma with n = m = 1.
ModelEval quickstart_model(const Vector& x, const WellArgs& args);

/// Sum of decaying exponentials observed at a set of times.
struct ExpSeriesArgs {
    Vector times;
    Vector data;
    Vector noise_sd;

    void validate() const;
};

/// x = (w_1..w_d, lambda_1..lambda_d);
/// f_k = (sum_i w_i exp(-lambda_i t_k) - y_k) / sigma_k.
ModelEval exp_series_model(const Vector& x, const ExpSeriesArgs& args);

struct LinearArgs {
    Matrix A;
    Vector b;
};

/// f(x) = A x - b.
ModelEval linear_model(const Vector& x, const LinearArgs& args);

struct RingArgs {
    double radius = 1.0;
    double sigma = 0.2;
};

/// Two-parameter, one-residual ring: f(x) = (|x|^2 - radius^2) / sigma.
/// Only identifiable together with a proper prior.
ModelEval ring_model(const Vector& x, const RingArgs& args);

} // namespace gnm

#endif // GNM_MODEL_HPP
