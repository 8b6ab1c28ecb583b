// Command-line front end: single runs, trial batches, rate sweeps, the
// invariant suite, and an Azuma tail demo. Exit codes: 0 ok, 1 failed
// verdict, 2 usage or configuration error.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epochgd/errors.hpp"
#include "epochgd/harness.hpp"
#include "epochgd/stats.hpp"

namespace {

using namespace epochgd;

struct CliArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    int trials = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    int jobs = 0;
    std::string out;
    std::string format;
    std::string scope = "all";
    std::string epsilons;  // comma-separated list for `rate`
    double azuma_b = 1.0;
    long long azuma_T = 100;
    int azuma_walks = 100000;
};

void add_common_flags(CLI::App* cmd, CliArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON experiment config");
    cmd->add_option("--seed", a.seed, "base seed (beats EPOCHGD_SEED and config)");
    cmd->add_option("--trials", a.trials, "trial count override");
    cmd->add_option("--epsilon", a.epsilon, "target suboptimality override");
    cmd->add_option("--delta", a.delta, "failure probability (high-prob variant)");
    cmd->add_option("--jobs", a.jobs, "worker threads (1 = serial reference path)");
    cmd->add_option("--out", a.out, "output file path");
    cmd->add_option("--format", a.format, "output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
}

// Precedence per field: explicit flag, then (for the seed) EPOCHGD_SEED,
// then the config file, then built-in defaults.
ExperimentConfig resolve_config(const CLI::App* cmd, const CliArgs& a) {
    ExperimentConfig cfg;
    if (!a.config_path.empty()) {
        cfg = load_config(a.config_path);
    } else {
        // runnable out of the box: the bundled noisy quadratic
        cfg.family = "quadratic";
        cfg.quadratic.dim = 5;
        cfg.quadratic.a = 1.0;
        cfg.quadratic.domain_radius = 0.9;
        cfg.quadratic.noise_sigma = 0.15;
        cfg.quadratic.noise_cap = 0.4;
        cfg.quadratic.M = 4.0;
        cfg.quadratic.G = 4.0;
        cfg.epsilon = 0.015625;
    }
    if (cmd->count("--seed")) {
        cfg.base_seed = a.seed;
    } else if (const char* env = std::getenv("EPOCHGD_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw ConfigError("EPOCHGD_SEED is not an unsigned integer");
        cfg.base_seed = v;
    }
    if (cmd->count("--trials")) cfg.trials = a.trials;
    if (cmd->count("--epsilon")) cfg.epsilon = a.epsilon;
    if (cmd->count("--delta")) cfg.delta = a.delta;
    if (cmd->count("--jobs")) cfg.jobs = a.jobs;
    if (cmd->count("--out")) cfg.out = a.out;
    if (cmd->count("--format")) cfg.format = a.format;

    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (cfg.delta && !(*cfg.delta > 0.0 && *cfg.delta < 1.0))
        throw ConfigError("delta must lie in (0, 1)");
    return cfg;
}

void print_batch_summary(const TrialBatch& batch) {
    std::printf("algorithm: %s  trials: %d  epsilon: %.17g  base_seed: %" PRIu64 "\n",
                batch.config.algorithm == Algorithm::epoch_gd        ? "epoch-gd"
                : batch.config.algorithm == Algorithm::epoch_gd_hp ? "epoch-gd-hp"
                                                                     : "baseline-sgd",
                batch.config.trials, batch.config.epsilon, batch.config.base_seed);
    if (!batch.trials.empty())
        std::printf("updates per trial: %lld\n",
                    batch.trials.front().trace.total_gradient_updates);
    std::printf("mean final suboptimality: %.17g  (95%% CI halfwidth %.17g)\n",
                batch.aggregates.mean_final, batch.aggregates.ci_halfwidth_final);
    std::printf("failures (final > epsilon): %lld / %zu  (%.4f)\n",
                batch.aggregates.failures, batch.trials.size(),
                batch.aggregates.failure_fraction);
    for (const EpochAggregate& ea : batch.aggregates.per_epoch)
        std::printf("  epoch %2d: V_k=%-12.6g mean(delta_k)=%-12.6g stderr=%-10.4g n=%d\n",
                    ea.k, ea.V, ea.mean_delta, ea.stderr_delta, ea.n);
}

int cmd_solve(const CLI::App* cmd, CliArgs& a) {
    ExperimentConfig cfg = resolve_config(cmd, a);
    cfg.trials = 1;
    const TrialBatch batch = run_experiment(cfg);
    const RunTrace& trace = batch.trials.front().trace;
    std::printf("seed: %" PRIu64 "\n", batch.trials.front().seed);
    for (const EpochRecord& rec : trace.per_epoch)
        std::printf("epoch %2d: V_k=%-12.6g eta_k=%-12.6g T_k=%-10lld delta_k=%.6g\n",
                    rec.k, rec.V, rec.eta, rec.T, rec.delta_k);
    std::printf("total gradient updates: %lld\n", trace.total_gradient_updates);
    std::printf("final suboptimality: %.17g\n", trace.final_suboptimality);
    return 0;
}

int cmd_bench(const CLI::App* cmd, CliArgs& a) {
    const ExperimentConfig cfg = resolve_config(cmd, a);
    print_batch_summary(run_experiment(cfg));
    return 0;
}

std::vector<double> parse_epsilons(const std::string& s) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string cell = s.substr(start, comma - start);
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(cell, &pos));
            if (pos != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError("bad epsilon '" + cell + "' in --epsilons");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

int cmd_rate(const CLI::App* cmd, CliArgs& a) {
    ExperimentConfig cfg = resolve_config(cmd, a);
    if (cmd->count("--trials") == 0) cfg.trials = 200;
    std::vector<double> epsilons;
    if (!a.epsilons.empty()) {
        epsilons = parse_epsilons(a.epsilons);
    } else {
        for (int j = 3; j <= 9; ++j) epsilons.push_back(std::ldexp(1.0, -j));
    }
    const RateReport report = run_rate_sweep(cfg, epsilons);
    std::printf("%-14s %-14s %s\n", "epsilon", "updates", "mean final suboptimality");
    for (const RatePoint& p : report.points)
        std::printf("%-14.6g %-14lld %.17g\n", p.epsilon, p.total_updates,
                    p.mean_final);
    std::printf("log-log slope: %.17g  (intercept %.6g)\n", report.slope,
                report.intercept);
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw ConfigError("cannot open output: " + a.out);
        f << "epsilon,total_updates,mean_final_suboptimality\n";
        char buf[128];
        for (const RatePoint& p : report.points) {
            std::snprintf(buf, sizeof buf, "%.17g,%lld,%.17g\n", p.epsilon,
                          p.total_updates, p.mean_final);
            f << buf;
        }
    }
    return 0;
}

int cmd_verify(const CLI::App* cmd, CliArgs& a) {
    std::uint64_t seed = 20240915;
    if (cmd->count("--seed")) {
        seed = a.seed;
    } else if (const char* env = std::getenv("EPOCHGD_SEED")) {
        seed = std::strtoull(env, nullptr, 10);
    }
    const VerdictReport report = run_invariant_suite(a.scope, seed);
    print_report(std::cout, report);
    return report.all_pass() ? 0 : 1;
}

int cmd_azuma(const CLI::App* cmd, CliArgs& a) {
    const double delta = cmd->count("--delta") ? a.delta : 0.01;
    std::uint64_t seed = 1;
    if (cmd->count("--seed")) seed = a.seed;
    const double threshold = stats::azuma_threshold(a.azuma_b, a.azuma_T, delta);
    Rng rng(seed);
    std::vector<double> sums(static_cast<std::size_t>(a.azuma_walks));
    for (double& s : sums) {
        double acc = 0.0;
        for (long long t = 0; t < a.azuma_T; ++t)
            acc += rng.uniform01() < 0.5 ? -a.azuma_b : a.azuma_b;
        s = acc;
    }
    const double tail = stats::empirical_tail(sums, threshold);
    std::printf("azuma threshold sqrt(2 b^2 T ln(1/delta)) = %.17g\n", threshold);
    std::printf("empirical tail over %d walks: %.6g  (delta = %g)\n",
                a.azuma_walks, tail, delta);
    const bool ok = tail <= delta;
    std::printf("%s\n", ok ? "tail within delta" : "tail EXCEEDS delta");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epoch-GD: stochastic strongly convex optimization toolkit"};
    app.require_subcommand(1);
    CliArgs a;

    CLI::App* solve = app.add_subcommand("solve", "run one seeded trial");
    CLI::App* bench = app.add_subcommand("bench", "run a seeded trial batch");
    CLI::App* rate = app.add_subcommand("rate", "suboptimality-vs-updates sweep");
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
    CLI::App* azuma = app.add_subcommand("azuma", "Azuma tail bound demo");

    for (CLI::App* cmd : {solve, bench, rate}) add_common_flags(cmd, a);
    rate->add_option("--epsilons", a.epsilons,
                     "comma-separated sweep targets (default 2^-3..2^-9)");
    verify->add_option("--scope", a.scope,
                       "all | core | projections | optimizers | problems | stats | harness");
    verify->add_option("--seed", a.seed, "suite seed");
    azuma->add_option("--b", a.azuma_b, "martingale increment bound");
    azuma->add_option("--T", a.azuma_T, "walk length");
    azuma->add_option("--trials", a.azuma_walks, "number of walks");
    azuma->add_option("--delta", a.delta, "tail probability (default 0.01)");
    azuma->add_option("--seed", a.seed, "walk seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve, a);
        if (bench->parsed()) return cmd_bench(bench, a);
        if (rate->parsed()) return cmd_rate(rate, a);
        if (verify->parsed()) return cmd_verify(verify, a);
        if (azuma->parsed()) return cmd_azuma(azuma, a);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
