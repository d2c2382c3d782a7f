#include "gnm/sampler.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <numeric>

#include "gnm/checkpoint.hpp"
#include "gnm/errors.hpp"

namespace gnm {

// StepCount -------------------------------------------------------------------

void StepCount::record(int stage)
{
    if (stage == -1) {
        ++rejects_;
        return;
    }
    if (stage < 1 || stage > stages())
        throw std::out_of_range("step count stage " + std::to_string(stage) + " out of range");
    ++accepted_[static_cast<std::size_t>(stage - 1)];
}

void StepCount::resize(int max_steps)
{
    std::size_t wanted = static_cast<std::size_t>(max_steps) + 1;
    while (accepted_.size() > wanted && accepted_.back() == 0)
        accepted_.pop_back();
    if (accepted_.size() < wanted)
        accepted_.resize(wanted, 0);
}

std::uint64_t StepCount::at(int stage) const
{
    if (stage == -1)
        return rejects_;
    if (stage < 1 || stage > stages())
        return 0;
    return accepted_[static_cast<std::size_t>(stage - 1)];
}

std::uint64_t StepCount::accepted() const
{
    return std::accumulate(accepted_.begin(), accepted_.end(), std::uint64_t{0});
}

std::map<int, std::uint64_t> StepCount::as_map() const
{
    std::map<int, std::uint64_t> m;
    m[-1] = rejects_;
    for (int s = 1; s <= stages(); ++s)
        m[s] = at(s);
    return m;
}

StepCount StepCount::from_map(const std::map<int, std::uint64_t>& counts)
{
    int top = 1;
    for (const auto& [stage, count] : counts) {
        if (stage == 0 || stage < -1)
            throw std::out_of_range("invalid step count stage " + std::to_string(stage));
        top = std::max(top, stage);
    }
    StepCount sc(top - 1);
    for (const auto& [stage, count] : counts) {
        if (stage == -1)
            sc.rejects_ = count;
        else
            sc.accepted_[static_cast<std::size_t>(stage - 1)] = count;
    }
    return sc;
}

// Sampler ---------------------------------------------------------------------

Sampler::Sampler(Vector x0, ModelHandle model, std::uint64_t seed)
    : Sampler(x0, std::move(model), GaussianPrior::flat(x0), seed)
{
}

Sampler::Sampler(Vector x0, ModelHandle model, GaussianPrior prior, std::uint64_t seed)
    : model_(std::move(model)), prior_(std::move(prior)), rng_(seed)
{
    const Index n = model_.dim_in();
    if (x0.size() != n)
        throw DimensionMismatch("initial guess has dimension " + std::to_string(x0.size()) +
                                ", model expects " + std::to_string(n));
    prior_.validate(n);
    ModelEval eval = model_.evaluate(x0);
    if (!eval.inside)
        throw InitialGuessOutsideDomain("the model is not defined at the initial guess");
    current_ = make_point_state(prior_, std::move(x0), std::move(eval));
    if (!current_.proposal)
        throw SingularProposal("H + J^T J is not positive definite at the initial guess");
}

void Sampler::set_prior(Vector mean, Matrix precision)
{
    GaussianPrior prior{std::move(mean), std::move(precision)};
    prior.validate(dim());
    PointState state = make_point_state(prior, current_.x, current_.eval);
    if (!state.proposal)
        throw SingularProposal("H + J^T J is not positive definite at the current point");
    prior_ = std::move(prior);
    current_ = std::move(state);
}

void Sampler::set_static(int max_steps, double factor)
{
    set_policy(BackoffPolicy::fixed(max_steps, factor));
}

void Sampler::set_dynamic(int max_steps, double t_lo, double t_hi)
{
    set_policy(BackoffPolicy::dynamic(max_steps, t_lo, t_hi));
}

void Sampler::set_policy(const BackoffPolicy& policy)
{
    policy.validate();
    policy_ = policy;
    step_count_.resize(policy_.max_steps);
}

void Sampler::run_sample(std::int64_t n_samples, const RunOptions& options)
{
    if (n_samples < 1)
        throw InvalidArgument("n_samples must be at least 1");
    if (options.divs < 1)
        throw InvalidArgument("divs must be at least 1");

    const Index n = dim();
    chain_.reserve(chain_.size() + static_cast<std::size_t>(n_samples * n));
    const std::int64_t base = n_samples / options.divs;
    const std::int64_t extra = n_samples % options.divs;
    std::int64_t done = 0;

    for (int div = 0; div < options.divs; ++div) {
        const std::int64_t todo = base + (div < extra ? 1 : 0);
        for (std::int64_t i = 0; i < todo; ++i) {
            StepResult r = step(current_, policy_, prior_, model_, rng_);
            warnings_ += r.warnings;
            step_count_.record(r.accepted_at);
            if (r.accepted_at != -1)
                current_ = std::move(r.next);
            chain_.insert(chain_.end(), current_.x.data(), current_.x.data() + n);
        }
        done += todo;

        if (options.visual) {
            std::ostream& os = options.progress ? *options.progress : std::cout;
            os << std::fixed << std::setprecision(1)
               << 100.0 * static_cast<double>(done) / static_cast<double>(n_samples) << "%\n"
               << std::flush;
        }
        if (options.safe)
            save_checkpoint(*options.safe);
        if (options.on_division && !options.on_division(div + 1, *this))
            return;
    }
}

void Sampler::burn(std::int64_t n_burned)
{
    if (n_burned < 0 || n_burned > n_samples())
        throw BurnTooLarge("cannot burn " + std::to_string(n_burned) + " of " +
                           std::to_string(n_samples()) + " samples");
    chain_.erase(chain_.begin(), chain_.begin() + n_burned * dim());
    burned_ += n_burned;
}

double Sampler::posterior_at(const Vector& x)
{
    if (x.size() != dim())
        throw DimensionMismatch("posterior_at: wrong dimension");
    const ModelEval eval = model_.evaluate(x);
    return std::exp(log_posterior(prior_, eval, x));
}

ChainView Sampler::chain() const
{
    return ChainView(chain_.data(), n_samples(), dim());
}

std::int64_t Sampler::n_samples() const
{
    return static_cast<std::int64_t>(chain_.size()) / dim();
}

double Sampler::accept_rate() const
{
    const std::uint64_t total = n_steps();
    return total == 0 ? 0.0 : static_cast<double>(n_accepted()) / static_cast<double>(total);
}

void Sampler::save_checkpoint(const std::filesystem::path& path) const
{
    CheckpointData d;
    d.dim = dim();
    d.chain = chain_;
    d.n_samples = n_samples();
    d.n_accepted = n_accepted();
    d.call_count = call_count();
    d.burned = burned_;
    d.step_count = step_count_.as_map();
    d.policy = policy_;
    d.prior = prior_;
    d.current_x = current_.x;
    d.rng_algorithm = Rng::algorithm_id;
    d.rng_state = rng_.state();
    write_checkpoint(path, d);
}

Sampler Sampler::load_checkpoint(const std::filesystem::path& path, ModelHandle model)
{
    CheckpointData d = read_checkpoint(path);
    if (d.dim != model.dim_in())
        throw DimensionMismatch("checkpoint has dimension " + std::to_string(d.dim) +
                                ", model expects " + std::to_string(model.dim_in()));
    if (d.rng_algorithm != Rng::algorithm_id)
        throw CorruptCheckpoint("unsupported generator '" + d.rng_algorithm + "'");

    Sampler s;
    s.model_ = std::move(model);
    s.prior_ = std::move(d.prior);
    s.policy_ = d.policy;
    try {
        s.prior_.validate(d.dim);
        s.policy_.validate();
        s.rng_.set_state(d.rng_state);
        s.step_count_ = StepCount::from_map(d.step_count);
    } catch (const std::exception& e) {
        throw CorruptCheckpoint(std::string("checkpoint content is invalid: ") + e.what());
    }
    s.step_count_.resize(s.policy_.max_steps);
    s.chain_ = std::move(d.chain);
    s.burned_ = d.burned;
    if (s.n_samples() != d.n_samples || s.n_accepted() != d.n_accepted ||
        static_cast<std::int64_t>(s.n_steps()) != d.n_samples + d.burned)
        throw CorruptCheckpoint("checkpoint counters are inconsistent");

    // Re-deriving the current state is bookkeeping, not sampling work: the
    // restored call_count matches that of an uninterrupted run.
    ModelEval eval = s.model_.evaluate(d.current_x);
    s.model_.set_call_count(d.call_count);
    if (!eval.inside)
        throw CorruptCheckpoint("checkpointed current point is outside the model domain");
    s.current_ = make_point_state(s.prior_, std::move(d.current_x), std::move(eval));
    if (!s.current_.proposal)
        throw CorruptCheckpoint("no Gauss-Newton proposal at the checkpointed point");
    return s;
}

} // namespace gnm
