// Command-line driver: samples the bundled problems and checks Jacobians.
//
// Exit codes: 0 success, 1 analysis failure (Jtest), 2 usage error,
// 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnm/diagnostics.hpp"
#include "gnm/errors.hpp"
#include "gnm/examples.hpp"
#include "gnm/jtest.hpp"
#include "gnm/quadrature.hpp"
#include "gnm/sampler.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_analysis = 1;
constexpr int exit_usage = 2;
constexpr int exit_runtime = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads --config files written as a flat JSON object whose keys are long
/// option names. Arrays become repeated inputs; nested arrays are flattened.
/// Values go to whichever subcommand was given on the command line.
class JsonConfig : public CLI::Config {
  public:
    explicit JsonConfig(const CLI::App* app) : app_(app) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        json doc;
        try {
            doc = json::parse(input);
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!doc.is_object())
            throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<std::string> parents;
        if (const auto subs = app_->get_subcommands(); !subs.empty())
            parents.push_back(subs.front()->get_name());
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : doc.items()) {
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            flatten(value, item.inputs);
            items.push_back(std::move(item));
        }
        return items;
    }

  private:
    const CLI::App* app_;

    static void flatten(const json& v, std::vector<std::string>& out)
    {
        if (v.is_array()) {
            for (const auto& e : v)
                flatten(e, out);
        } else if (v.is_string()) {
            out.push_back(v.get<std::string>());
        } else if (v.is_boolean()) {
            out.push_back(v.get<bool>() ? "true" : "false");
        } else {
            out.push_back(v.dump());
        }
    }
};

struct RunConfig {
    std::string example = "quickstart";
    std::int64_t n_samples = 0;
    std::int64_t n_burn = 0;
    int divs = 1;
    bool visual = false;
    std::uint64_t seed = 1;
    int chains = 1;

    std::string backoff = "none";
    int max_steps = 1;
    double factor = 0.1;
    double t_lo = 0.05;
    double t_hi = 0.95;

    std::vector<double> prior_mean;
    std::vector<std::string> prior_precision;
    std::vector<double> x0;

    std::optional<double> y;
    double sigma = 0.5;
    std::vector<double> times;
    std::optional<double> time_window;
    std::uint64_t data_seed = 1;

    int bins = 50;
    std::vector<double> range;
    std::vector<std::pair<int, int>> marginals;
    int acor_k = 5;
    int max_lag = 200;

    std::string out_dir = ".";
    std::string checkpoint;
    bool resume = false;
};

struct JtestConfig {
    std::string example = "quickstart";
    std::vector<double> x_min;
    std::vector<double> x_max;
    gnm::JtestOptions options;
    std::uint64_t seed = 1;
    double jac_offset = 0.01;
    bool serial = false;
};

gnm::Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const gnm::Vector>(v.data(), static_cast<gnm::Index>(v.size()));
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

gnm::ExampleParams example_params(const RunConfig& cfg)
{
    gnm::ExampleParams p;
    p.y = cfg.y;
    p.sigma = cfg.sigma;
    p.data_seed = cfg.data_seed;
    if (!cfg.times.empty())
        p.times = to_vector(cfg.times);
    else if (cfg.time_window)
        p.times = gnm::uniform_times(10, *cfg.time_window);
    return p;
}

gnm::ExampleProblem build_problem(const RunConfig& cfg)
{
    gnm::ExampleProblem prob = gnm::make_example(cfg.example, example_params(cfg));
    const gnm::Index n = prob.model.dim_in();
    if (!cfg.x0.empty()) {
        if (static_cast<gnm::Index>(cfg.x0.size()) != n)
            throw UsageError("--x0 needs " + std::to_string(n) + " values");
        prob.x0 = to_vector(cfg.x0);
    }
    if (!cfg.prior_mean.empty()) {
        if (static_cast<gnm::Index>(cfg.prior_mean.size()) != n)
            throw UsageError("--prior-mean needs " + std::to_string(n) + " values");
        prob.prior.mean = to_vector(cfg.prior_mean);
    }
    if (!cfg.prior_precision.empty()) {
        if (cfg.prior_precision.size() == 1 && cfg.prior_precision[0] == "flat") {
            prob.prior.precision = gnm::Matrix::Zero(n, n);
        } else {
            if (static_cast<gnm::Index>(cfg.prior_precision.size()) != n * n)
                throw UsageError("--prior-precision needs " + std::to_string(n * n) +
                                 " row-major values or 'flat'");
            for (gnm::Index i = 0; i < n; ++i)
                for (gnm::Index j = 0; j < n; ++j)
                    prob.prior.precision(i, j) =
                        std::stod(cfg.prior_precision[static_cast<std::size_t>(i * n + j)]);
        }
    }
    return prob;
}

gnm::BackoffPolicy build_policy(const RunConfig& cfg)
{
    if (cfg.backoff == "none")
        return gnm::BackoffPolicy::none();
    if (cfg.backoff == "static")
        return gnm::BackoffPolicy::fixed(cfg.max_steps, cfg.factor);
    return gnm::BackoffPolicy::dynamic(cfg.max_steps, cfg.t_lo, cfg.t_hi);
}

/// Histogram box: two values apply to every coordinate, 2n values are
/// per-coordinate (lo, hi) pairs, none falls back to the example's plot box.
std::pair<gnm::Vector, gnm::Vector> histogram_box(const RunConfig& cfg,
                                                  const gnm::ExampleProblem& prob)
{
    const gnm::Index n = prob.model.dim_in();
    if (cfg.range.empty())
        return {prob.plot_min, prob.plot_max};
    gnm::Vector lo(n), hi(n);
    if (cfg.range.size() == 2) {
        lo.setConstant(cfg.range[0]);
        hi.setConstant(cfg.range[1]);
    } else if (static_cast<gnm::Index>(cfg.range.size()) == 2 * n) {
        for (gnm::Index j = 0; j < n; ++j) {
            lo(j) = cfg.range[static_cast<std::size_t>(2 * j)];
            hi(j) = cfg.range[static_cast<std::size_t>(2 * j + 1)];
        }
    } else {
        throw UsageError("--range takes 2 or " + std::to_string(2 * n) + " values");
    }
    if (!(lo.array() < hi.array()).all())
        throw UsageError("--range needs lo < hi");
    return {lo, hi};
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw gnm::IOFailure("cannot write " + path.string());
    os << text;
    if (!os)
        throw gnm::IOFailure("failed writing " + path.string());
}

void write_chain_csv(const fs::path& path, const gnm::Sampler& s)
{
    std::ostringstream os;
    for (gnm::Index j = 0; j < s.dim(); ++j)
        os << (j ? "," : "") << "x" << j + 1;
    os << "\n";
    const auto chain = s.chain();
    for (gnm::Index i = 0; i < chain.rows(); ++i) {
        for (gnm::Index j = 0; j < chain.cols(); ++j)
            os << (j ? "," : "") << fmt17(chain(i, j));
        os << "\n";
    }
    write_text(path, os.str());
}

void write_histogram_csv(const fs::path& path, const gnm::HistogramResult& h)
{
    std::ostringstream os;
    for (gnm::Index j = 0; j < h.density.rows(); ++j) {
        if (j)
            os << "\n";
        os << "center,density,err\n";
        for (gnm::Index b = 0; b < h.density.cols(); ++b)
            os << fmt17(h.centers(j, b)) << "," << fmt17(h.density(j, b)) << ","
               << fmt17(h.err(j, b)) << "\n";
    }
    write_text(path, os.str());
}

void write_marginal_csv(const fs::path& path, const gnm::Histogram2D& h)
{
    std::ostringstream os;
    os << "ci,cj,density,err\n";
    for (gnm::Index a = 0; a < h.density.rows(); ++a)
        for (gnm::Index b = 0; b < h.density.cols(); ++b)
            os << fmt17(h.centers_i(a)) << "," << fmt17(h.centers_j(b)) << ","
               << fmt17(h.density(a, b)) << "," << fmt17(h.err(a, b)) << "\n";
    write_text(path, os.str());
}

json summary_json(const RunConfig& cfg, const gnm::Sampler& s, std::uint64_t seed)
{
    json j;
    j["example"] = cfg.example;
    j["seed"] = seed;
    j["policy"] = {{"mode", gnm::to_string(s.policy().mode)},
                   {"max_steps", s.policy().max_steps},
                   {"factor", s.policy().factor},
                   {"t_lo", s.policy().t_lo},
                   {"t_hi", s.policy().t_hi}};
    j["n_samples"] = s.n_samples();
    j["burned"] = s.burned();
    j["n_steps"] = s.n_steps();
    j["n_accepted"] = s.n_accepted();
    j["accept_rate"] = s.accept_rate();
    j["call_count"] = s.call_count();
    j["warnings"] = s.warnings();

    json steps = json::object();
    for (const auto& [stage, count] : s.step_count().as_map())
        steps[std::to_string(stage)] = count;
    j["step_count"] = steps;
    json pct = json::object();
    for (const auto& [stage, frac] : gnm::step_percentages(s.step_count()))
        pct[std::to_string(stage)] = frac;
    j["step_percentages"] = pct;

    json coords = json::array();
    const auto chain = s.chain();
    for (gnm::Index c = 0; c < s.dim(); ++c) {
        std::vector<double> col(static_cast<std::size_t>(chain.rows()));
        for (gnm::Index i = 0; i < chain.rows(); ++i)
            col[static_cast<std::size_t>(i)] = chain(i, c);
        json entry;
        try {
            const gnm::AcorResult a = gnm::acor(col, cfg.acor_k);
            entry = {{"tau", a.tau},
                     {"mean", a.mean},
                     {"sigma", a.sigma},
                     {"ess", static_cast<double>(col.size()) / a.tau}};
        } catch (const gnm::Error& e) {
            entry = {{"error", e.what()}};
        }
        coords.push_back(entry);
    }
    j["acor"] = coords;
    return j;
}

void write_outputs(const RunConfig& cfg, const gnm::ExampleProblem& prob, gnm::Sampler& s,
                   const std::string& suffix, std::uint64_t seed)
{
    const fs::path dir(cfg.out_dir);
    write_chain_csv(dir / ("chain" + suffix + ".csv"), s);
    write_text(dir / ("summary" + suffix + ".json"), summary_json(cfg, s, seed).dump(2) + "\n");
    if (s.n_samples() == 0)
        return;

    const auto [lo, hi] = histogram_box(cfg, prob);
    write_histogram_csv(dir / ("histogram" + suffix + ".csv"),
                        gnm::error_bars(s.chain(), cfg.bins, lo, hi));
    for (const auto& [i, j] : cfg.marginals) {
        const auto h = gnm::error_bars_2d(s.chain(), i - 1, j - 1, cfg.bins, lo, hi);
        write_marginal_csv(dir / ("marginal_" + std::to_string(i) + "_" + std::to_string(j) +
                                  suffix + ".csv"),
                           h);
    }

    // Autocovariance of the first coordinate.
    std::vector<double> first(static_cast<std::size_t>(s.n_samples()));
    for (gnm::Index r = 0; r < s.n_samples(); ++r)
        first[static_cast<std::size_t>(r)] = s.chain()(r, 0);
    const gnm::Index lag = std::min<gnm::Index>(cfg.max_lag, s.n_samples() - 1);
    const gnm::Vector cov = gnm::autocovariance(first, lag);
    std::ostringstream ac;
    ac << "lag,autocovariance\n";
    for (gnm::Index t = 0; t < cov.size(); ++t)
        ac << t << "," << fmt17(cov(t)) << "\n";
    write_text(dir / ("autocov" + suffix + ".csv"), ac.str());

    if (s.dim() == 1) {
        const gnm::ModelHandle& model = prob.model;
        const gnm::GaussianPrior& prior = s.prior();
        const auto q = gnm::quadrature_1d(
            [&](double x) {
                const gnm::Vector v = gnm::Vector::Constant(1, x);
                return gnm::log_posterior(prior, model.evaluate_uncounted(v), v);
            },
            lo(0), hi(0), 2001);
        std::ostringstream os;
        os << "x,density\n";
        for (gnm::Index k = 0; k < q.grid.size(); ++k)
            os << fmt17(q.grid(k)) << "," << fmt17(q.density(k)) << "\n";
        write_text(dir / ("quadrature" + suffix + ".csv"), os.str());
    }
}

void run_one_chain(const RunConfig& cfg, int chain_index)
{
    const std::string suffix = cfg.chains > 1 ? "_c" + std::to_string(chain_index) : "";
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(chain_index);
    gnm::ExampleProblem prob = build_problem(cfg);

    std::optional<fs::path> checkpoint;
    if (!cfg.checkpoint.empty()) {
        fs::path p(cfg.checkpoint);
        if (cfg.chains > 1)
            p.replace_filename(p.stem().string() + suffix + p.extension().string());
        checkpoint = p;
    }

    std::optional<gnm::Sampler> sampler;
    if (checkpoint && cfg.resume && fs::exists(*checkpoint)) {
        sampler.emplace(gnm::Sampler::load_checkpoint(*checkpoint, prob.model));
    } else {
        sampler.emplace(prob.x0, prob.model, prob.prior, seed);
        sampler->set_policy(build_policy(cfg));
    }
    gnm::Sampler& s = *sampler;

    const std::int64_t done = s.n_samples() + s.burned();
    const std::int64_t remaining = cfg.n_samples - done;
    if (remaining > 0) {
        gnm::RunOptions opts;
        opts.divs = static_cast<int>(std::min<std::int64_t>(cfg.divs, remaining));
        opts.visual = cfg.visual && cfg.chains == 1;
        opts.progress = &std::cout;
        opts.safe = checkpoint;
        s.run_sample(remaining, opts);
    }
    if (cfg.n_burn > s.burned())
        s.burn(std::min<std::int64_t>(cfg.n_burn - s.burned(), s.n_samples()));
    write_outputs(cfg, prob, s, suffix, seed);
}

int cmd_sample(const RunConfig& cfg)
{
    if (cfg.n_samples < 1)
        throw UsageError("--samples must be at least 1");
    if (cfg.n_burn < 0 || cfg.n_burn > cfg.n_samples)
        throw UsageError("--burn must lie in [0, samples]");
    if (cfg.divs < 1 || cfg.chains < 1 || cfg.bins < 1 || cfg.acor_k < 1 || cfg.max_lag < 0)
        throw UsageError("--divs, --chains, --bins and --acor-k must be positive");
    if (cfg.backoff != "none" && cfg.max_steps < 1)
        throw UsageError("--max-steps must be at least 1 with back-off");
    for (const auto& [i, j] : cfg.marginals)
        if (i < 1 || j < 1 || i == j)
            throw UsageError("--marginal takes two distinct 1-based coordinates");

    fs::create_directories(cfg.out_dir);
    // Validate the whole configuration once before starting any chain.
    {
        gnm::ExampleProblem prob = build_problem(cfg);
        histogram_box(cfg, prob);
        build_policy(cfg);
        for (const auto& [i, j] : cfg.marginals)
            if (i > prob.model.dim_in() || j > prob.model.dim_in())
                throw UsageError("--marginal coordinate out of range");
    }

    if (cfg.chains == 1) {
        run_one_chain(cfg, 0);
        return exit_ok;
    }

    std::vector<std::exception_ptr> faults(static_cast<std::size_t>(cfg.chains));
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < cfg.chains; ++c) {
        try {
            run_one_chain(cfg, c);
        } catch (...) {
            faults[static_cast<std::size_t>(c)] = std::current_exception();
        }
    }
    for (auto& f : faults)
        if (f)
            std::rethrow_exception(f);
    return exit_ok;
}

int cmd_jtest(const JtestConfig& cfg)
{
    gnm::ExampleParams params;
    params.jac_offset = cfg.jac_offset;
    gnm::ExampleProblem prob = gnm::make_example(cfg.example, params);
    gnm::JtestDomain dom = prob.jtest_box;
    const gnm::Index n = prob.model.dim_in();
    auto box_side = [n](const std::vector<double>& v, const gnm::Vector& fallback) {
        if (v.empty())
            return fallback;
        if (v.size() == 1)
            return gnm::Vector::Constant(n, v[0]).eval();
        if (static_cast<gnm::Index>(v.size()) != n)
            throw UsageError("box corners need 1 or " + std::to_string(n) + " values");
        return to_vector(v);
    };
    dom.x_min = box_side(cfg.x_min, dom.x_min);
    dom.x_max = box_side(cfg.x_max, dom.x_max);

    gnm::Rng rng(cfg.seed);
    const double err = cfg.serial ? gnm::jtest_serial(prob.model, dom, cfg.options, rng)
                                  : gnm::jtest(prob.model, dom, cfg.options, rng);
    if (err == 0.0) {
        std::cout << "0\npass (" << prob.model.call_count() << " model calls)\n";
        return exit_ok;
    }
    std::cout << fmt17(err) << "\nfail: numerical and supplied Jacobians differ\n";
    return exit_analysis;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gauss-Newton-Metropolis sampler with back-off"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonConfig>(&app));
    app.set_config("--config", "", "JSON file of option values; flags override it");

    RunConfig run;
    auto* sample = app.add_subcommand("sample", "Sample a bundled example problem");
    const auto names = gnm::example_names();
    sample->add_option("--example", run.example, "Problem to sample")
        ->check(CLI::IsMember({"quickstart", "well", "simple2d", "expseries", "linear"}));
    sample->add_option("--samples", run.n_samples, "Number of transitions")->required();
    sample->add_option("--burn", run.n_burn, "Samples discarded from the start");
    sample->add_option("--divs", run.divs, "Divisions (progress / checkpoint cadence)");
    sample->add_flag("--visual", run.visual, "Print percentage after each division");
    sample->add_option("--seed", run.seed, "Random seed");
    sample->add_option("--chains", run.chains, "Independent chains run concurrently");
    sample->add_option("--backoff", run.backoff, "none, static or dynamic")
        ->check(CLI::IsMember({"none", "static", "dynamic"}));
    sample->add_option("--max-steps", run.max_steps, "Maximum back-off steps");
    sample->add_option("--factor", run.factor, "Static back-off factor in (0,1)");
    sample->add_option("--t-lo", run.t_lo, "Dynamic back-off lower clamp");
    sample->add_option("--t-hi", run.t_hi, "Dynamic back-off upper clamp");
    sample->add_option("--prior-mean", run.prior_mean, "Prior mean");
    sample->add_option("--prior-precision", run.prior_precision,
                       "Prior precision, row-major, or 'flat'");
    sample->add_option("--x0", run.x0, "Initial guess");
    sample->add_option("--y", run.y, "Well depth (quickstart, well)");
    sample->add_option("--sigma", run.sigma, "Well noise scale (quickstart, well)");
    sample->add_option("--times", run.times, "Exp-series measurement times");
    sample->add_option("--time-window", run.time_window,
                       "Exp-series: 10 uniform times on [0, window]");
    sample->add_option("--data-seed", run.data_seed, "Exp-series synthetic data seed");
    sample->add_option("--bins", run.bins, "Histogram bins per coordinate");
    sample->add_option("--range", run.range, "Histogram box: lo hi, or lo1 hi1 lo2 hi2 ...");
    sample->add_option("--marginal", run.marginals, "2D marginal grid for coordinates i j (1-based)");
    sample->add_option("--acor-k", run.acor_k, "acor window parameter");
    sample->add_option("--max-lag", run.max_lag, "Largest lag in autocov.csv");
    sample->add_option("--out-dir", run.out_dir, "Directory for output files");
    sample->add_option("--checkpoint", run.checkpoint, "Safe mode: checkpoint after each division");
    sample->add_flag("--resume", run.resume, "Continue from --checkpoint when it exists");

    JtestConfig jt;
    auto* jtest = app.add_subcommand("jtest", "Check a model's Jacobian by finite differences");
    jtest->add_option("--example", jt.example, "Model to check")
        ->check(CLI::IsMember(names));
    jtest->add_option("--x-min", jt.x_min, "Lower box corner (1 or n values)");
    jtest->add_option("--x-max", jt.x_max, "Upper box corner (1 or n values)");
    jtest->add_option("--dx", jt.options.dx, "Initial relative perturbation");
    jtest->add_option("-N,--points", jt.options.N, "Number of test points");
    jtest->add_option("--eps-max", jt.options.eps_max, "Pass threshold");
    jtest->add_option("-p,--norm", jt.options.p, "Norm order");
    jtest->add_option("--l-max", jt.options.l_max, "Shrink stages per point");
    jtest->add_option("-r,--ratio", jt.options.r, "Shrink ratio");
    jtest->add_option("--seed", jt.seed, "Random seed");
    jtest->add_option("--jac-offset", jt.jac_offset, "Jacobian error of the badjac model");
    jtest->add_flag("--serial", jt.serial, "Use the single-threaded reference");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (sample->parsed())
            return cmd_sample(run);
        return cmd_jtest(jt);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const gnm::InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}
