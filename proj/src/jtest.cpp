#include "gnm/jtest.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <vector>

#include <omp.h>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

constexpr int max_draws_per_point = 100;

struct PointOutcome {
    double error = 0.0;   // 0 on pass
    std::uint64_t calls = 0;
};

/// Residual at x, or nullopt outside the domain.
std::optional<Vector> residual_at(const ModelHandle& model, const Vector& x, Index m,
                                  std::uint64_t& calls)
{
    ++calls;
    ModelEval ev = model.evaluate_uncounted(x);
    if (!ev.inside)
        return std::nullopt;
    if (ev.residual.size() != m)
        throw DimensionMismatch("residual length changed between evaluations");
    return std::move(ev.residual);
}

/// Tests one point drawn from its own stream, redrawing when the point or one
/// of its perturbations leaves the domain.
PointOutcome check_point(const ModelHandle& model, const JtestDomain& dom, const JtestOptions& opt,
                         std::uint64_t seed)
{
    Rng rng(seed);
    const Index n = dom.x_min.size();
    const Vector width = dom.x_max - dom.x_min;
    PointOutcome out;

    for (int draw = 0; draw < max_draws_per_point; ++draw) {
        Vector x(n);
        for (Index j = 0; j < n; ++j)
            x(j) = rng.uniform(dom.x_min(j), dom.x_max(j));

        ++out.calls;
        const ModelEval at_x = model.evaluate_uncounted(x);
        if (!at_x.inside)
            continue;
        const Matrix& jac = at_x.jacobian;
        const Index m = at_x.residual.size();

        bool left_domain = false;
        double err = std::numeric_limits<double>::infinity();
        for (int l = 0; l <= opt.l_max && !left_domain; ++l) {
            const double shrink = std::pow(opt.r, static_cast<double>(l));
            Matrix numeric(m, n);
            for (Index j = 0; j < n && !left_domain; ++j) {
                const double delta = width(j) * opt.dx * shrink;
                Vector xp = x, xm = x;
                xp(j) += delta;
                xm(j) -= delta;
                const auto fp = residual_at(model, xp, m, out.calls);
                const auto fm = residual_at(model, xm, m, out.calls);
                if (!fp || !fm) {
                    left_domain = true;
                    break;
                }
                numeric.col(j) = (*fp - *fm) / (2.0 * delta);
            }
            if (left_domain)
                break;
            err = entrywise_norm(numeric - jac, opt.p);
            if (err <= opt.eps_max) {
                out.error = 0.0;
                return out;
            }
        }
        if (left_domain)
            continue;
        out.error = err;
        return out;
    }
    throw PointOutsideDomain("no point of the box (with its perturbations) inside the model domain "
                             "after " + std::to_string(max_draws_per_point) + " draws");
}

void check_inputs(const ModelHandle& model, const JtestDomain& dom, const JtestOptions& opt)
{
    opt.validate();
    dom.validate(model.dim_in());
}

} // namespace

void JtestOptions::validate() const
{
    if (!(dx > 0.0) || N < 1 || !(eps_max > 0.0) || !(p >= 1.0) || l_max < 0 ||
        !(r > 0.0 && r < 1.0))
        throw InvalidArgument("invalid Jtest options");
}

void JtestDomain::validate(Index n) const
{
    if (x_min.size() != n || x_max.size() != n)
        throw DimensionMismatch("Jtest box must have dimension " + std::to_string(n));
    if (!(x_min.array() < x_max.array()).all())
        throw InvalidArgument("Jtest box is empty: need x_min < x_max in every coordinate");
}

double entrywise_norm(const Matrix& m, double p)
{
    if (std::isinf(p))
        return m.cwiseAbs().maxCoeff();
    if (p == 2.0)
        return m.norm();
    if (p == 1.0)
        return m.cwiseAbs().sum();
    return std::pow(m.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

double jtest_serial(ModelHandle& model, const JtestDomain& domain, const JtestOptions& options,
                    Rng& rng)
{
    check_inputs(model, domain, options);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(options.N));
    for (auto& s : seeds)
        s = rng.next_u64();

    for (std::uint64_t seed : seeds) {
        const PointOutcome o = check_point(model, domain, options, seed);
        model.add_calls(o.calls);
        if (o.error > 0.0)
            return o.error;
    }
    return 0.0;
}

double jtest(ModelHandle& model, const JtestDomain& domain, const JtestOptions& options, Rng& rng)
{
    check_inputs(model, domain, options);
    const int N = options.N;
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(N));
    for (auto& s : seeds)
        s = rng.next_u64();

    std::vector<PointOutcome> outcomes(seeds.size());
    std::vector<std::exception_ptr> faults(seeds.size());
    std::vector<char> ran(seeds.size(), 0);
    // Points past the first known failure cannot change the answer.
    std::atomic<int> first_bad{N};
    const ModelHandle& shared = model;

#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < N; ++k) {
        if (k > first_bad.load(std::memory_order_relaxed))
            continue;
        const auto idx = static_cast<std::size_t>(k);
        ran[idx] = 1;
        try {
            outcomes[idx] = check_point(shared, domain, options, seeds[idx]);
            if (outcomes[idx].error == 0.0)
                continue;
        } catch (...) {
            faults[idx] = std::current_exception();
        }
        int seen = first_bad.load();
        while (k < seen && !first_bad.compare_exchange_weak(seen, k)) {
        }
    }

    std::uint64_t calls = 0;
    for (std::size_t k = 0; k < seeds.size(); ++k)
        if (ran[k])
            calls += outcomes[k].calls;
    model.add_calls(calls);

    for (std::size_t k = 0; k < seeds.size(); ++k) {
        if (faults[k])
            std::rethrow_exception(faults[k]);
        if (outcomes[k].error > 0.0)
            return outcomes[k].error;
    }
    return 0.0;
}

} // namespace gnm
