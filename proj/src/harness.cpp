#include "epochgd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "epochgd/errors.hpp"
#include "epochgd/stats.hpp"
#include "json.hpp"

namespace epochgd {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) { known = true; break; }
        if (!known)
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "epoch-gd") return Algorithm::epoch_gd;
    if (s == "epoch-gd-hp") return Algorithm::epoch_gd_hp;
    if (s == "baseline-sgd") return Algorithm::baseline_sgd;
    throw ConfigError("unknown algorithm '" + s + "'");
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::epoch_gd: return "epoch-gd";
        case Algorithm::epoch_gd_hp: return "epoch-gd-hp";
        case Algorithm::baseline_sgd: return "baseline-sgd";
    }
    return "?";
}

IterateRule parse_rule(const std::string& s) {
    if (s == "average") return IterateRule::average;
    if (s == "uniform-random") return IterateRule::uniform_random;
    throw ConfigError("unknown iterate_rule '" + s + "'");
}

const char* rule_name(IterateRule r) {
    return r == IterateRule::average ? "average" : "uniform-random";
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    check_keys(j,
               {"problem", "algorithm", "epsilon", "delta", "trials",
                "base_seed", "iterate_rule", "baseline_T", "jobs", "out",
                "format"},
               "config");

    ExperimentConfig c;
    if (j.contains("problem")) {
        const json& p = j.at("problem");
        if (!p.is_object()) throw ConfigError("'problem' must be an object");
        c.family = field_or<std::string>(p, "family", "quadratic");
        if (c.family == "quadratic") {
            check_keys(p,
                       {"family", "dim", "a", "x_star", "noise_sigma",
                        "noise_cap", "domain_radius", "domain_center", "M",
                        "G"},
                       "problem");
            QuadraticConfig& q = c.quadratic;
            q.dim = field_or<int>(p, "dim", q.dim);
            q.a = field_or<double>(p, "a", q.a);
            q.x_star = field_or<Vec>(p, "x_star", q.x_star);
            q.noise_sigma = field_or<double>(p, "noise_sigma", q.noise_sigma);
            q.noise_cap = field_or<double>(p, "noise_cap", q.noise_cap);
            q.domain_radius = field_or<double>(p, "domain_radius", q.domain_radius);
            q.domain_center = field_or<Vec>(p, "domain_center", q.domain_center);
            q.M = field_or<double>(p, "M", q.M);
            q.G = field_or<double>(p, "G", q.G);
        } else if (c.family == "svm") {
            check_keys(p, {"family", "dataset", "lambda_reg", "R_w",
                           "reference_tol"},
                       "problem");
            SvmConfig& s = c.svm;
            s.dataset = field_or<std::string>(p, "dataset", s.dataset);
            s.lambda_reg = field_or<double>(p, "lambda_reg", s.lambda_reg);
            s.R_w = field_or<double>(p, "R_w", s.R_w);
            s.reference_tol = field_or<double>(p, "reference_tol", s.reference_tol);
            if (s.dataset.empty())
                throw ConfigError("svm problem requires 'dataset' (path or \"toy\")");
        } else {
            throw ConfigError("unknown problem family '" + c.family + "'");
        }
    }
    c.algorithm = parse_algorithm(field_or<std::string>(j, "algorithm", "epoch-gd"));
    c.epsilon = field_or<double>(j, "epsilon", c.epsilon);
    if (j.contains("delta")) c.delta = field_or<double>(j, "delta", 0.0);
    c.trials = field_or<int>(j, "trials", c.trials);
    c.base_seed = field_or<std::uint64_t>(j, "base_seed", c.base_seed);
    c.iterate_rule = parse_rule(field_or<std::string>(j, "iterate_rule", "average"));
    c.baseline_T = field_or<long long>(j, "baseline_T", c.baseline_T);
    c.jobs = field_or<int>(j, "jobs", c.jobs);
    c.out = field_or<std::string>(j, "out", c.out);
    c.format = field_or<std::string>(j, "format", c.format);

    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (c.trials < 1) throw ConfigError("trials must be >= 1");
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (c.baseline_T < 0) throw ConfigError("baseline_T must be >= 0");
    if (c.format != "csv" && c.format != "json")
        throw ConfigError("format must be csv or json");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Problem build_problem(const ExperimentConfig& config) {
    if (config.family == "quadratic") return make_quadratic(config.quadratic);
    if (config.family == "svm") {
        Dataset ds = config.svm.dataset == "toy" ? make_toy_separable()
                                                 : load_libsvm(config.svm.dataset);
        Problem p = make_svm(ds, config.svm.lambda_reg, config.svm.R_w);
        reference_optimum(p, config.svm.reference_tol);
        return p;
    }
    throw ConfigError("unknown problem family '" + config.family + "'");
}

TrialResult run_single_trial(const ExperimentConfig& config,
                             const Problem& problem, int trial) {
    TrialResult result;
    result.trial = trial;
    result.seed = config.base_seed + static_cast<std::uint64_t>(trial);
    Rng rng(result.seed);

    Vec x1(static_cast<std::size_t>(problem.domain.dim));
    problem.domain.sample_into(rng, x1);

    switch (config.algorithm) {
        case Algorithm::epoch_gd: {
            auto [x, trace] = epoch_gd(problem, problem.domain, x1, config.epsilon,
                                       config.iterate_rule, rng);
            result.trace = std::move(trace);
            break;
        }
        case Algorithm::epoch_gd_hp: {
            if (!config.delta) throw MissingDelta();
            auto [x, trace] = epoch_gd_high_prob(problem, problem.domain, x1,
                                                 config.epsilon, *config.delta, rng);
            result.trace = std::move(trace);
            break;
        }
        case Algorithm::baseline_sgd: {
            long long T = config.baseline_T;
            if (T == 0)
                T = build_epoch_schedule(problem.spec, config.epsilon,
                                         Variant::expectation)
                        .total_updates();
            T = std::max<long long>(T, 1);
            const double f1 = problem.optimum
                                  ? problem.value(x1) - problem.optimum->value
                                  : std::numeric_limits<double>::quiet_NaN();
            auto [x, inner] = baseline_sgd_decaying(problem, problem.domain, x1, T, rng);
            RunTrace trace;
            EpochRecord rec;
            rec.k = 1;
            rec.V = 0.0;
            rec.eta = 0.0;
            rec.T = T;
            rec.start_point = x1;
            rec.end_point = x;
            rec.delta_k = f1;
            rec.avg_regret = inner.avg_regret;
            rec.cumulative_updates = T;
            trace.per_epoch.push_back(std::move(rec));
            trace.total_gradient_updates = T;
            trace.final_suboptimality =
                problem.optimum ? problem.value(x) - problem.optimum->value
                                : std::numeric_limits<double>::quiet_NaN();
            trace.final_point = std::move(x);
            result.trace = std::move(trace);
            break;
        }
    }
    return result;
}

std::vector<TrialResult> run_trials_serial(const ExperimentConfig& config,
                                           const Problem& problem) {
    std::vector<TrialResult> out;
    out.reserve(static_cast<std::size_t>(config.trials));
    for (int i = 0; i < config.trials; ++i)
        out.push_back(run_single_trial(config, problem, i));
    return out;
}

std::vector<TrialResult> run_trials_parallel(const ExperimentConfig& config,
                                             const Problem& problem, int jobs) {
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    std::vector<TrialResult> out(static_cast<std::size_t>(config.trials));
#ifdef _OPENMP
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int i = 0; i < config.trials; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = run_single_trial(config, problem, i);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
#else
    for (int i = 0; i < config.trials; ++i)
        out[static_cast<std::size_t>(i)] = run_single_trial(config, problem, i);
#endif
    return out;
}

namespace {

void mean_and_stderr(const std::vector<double>& xs, double& mean, double& se) {
    const double n = static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += x;
    mean = s / n;
    if (xs.size() < 2) { se = 0.0; return; }
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

}  // namespace

BatchAggregates aggregate_trials(const std::vector<TrialResult>& trials,
                                 double epsilon) {
    if (trials.empty()) throw EmptyInput();
    BatchAggregates agg;

    std::vector<double> finals;
    finals.reserve(trials.size());
    for (const TrialResult& t : trials)
        finals.push_back(t.trace.final_suboptimality);
    if (finals.size() >= 2) {
        const stats::MeanCi ci = stats::mean_ci(finals, 0.95);
        agg.mean_final = ci.mean;
        agg.ci_halfwidth_final = ci.halfwidth;
    } else {
        agg.mean_final = finals[0];
        agg.ci_halfwidth_final = 0.0;
    }

    std::map<int, std::pair<double, std::vector<double>>> per_k;  // k -> (V, deltas)
    for (const TrialResult& t : trials)
        for (const EpochRecord& rec : t.trace.per_epoch) {
            auto& slot = per_k[rec.k];
            slot.first = rec.V;
            slot.second.push_back(rec.delta_k);
        }
    for (const auto& [k, slot] : per_k) {
        EpochAggregate ea;
        ea.k = k;
        ea.V = slot.first;
        ea.n = static_cast<int>(slot.second.size());
        mean_and_stderr(slot.second, ea.mean_delta, ea.stderr_delta);
        agg.per_epoch.push_back(ea);
    }

    for (double f : finals)
        if (!(f <= epsilon)) ++agg.failures;  // NaN counts as a failure
    agg.failure_fraction =
        static_cast<double>(agg.failures) / static_cast<double>(trials.size());
    return agg;
}

void write_csv(std::ostream& out, const TrialBatch& batch) {
    out << "trial,epoch_k,V_k,eta_k,T_k,delta_k,cumulative_updates,"
           "final_suboptimality\n";
    for (const TrialResult& t : batch.trials) {
        const std::string final_s = fmt17(t.trace.final_suboptimality);
        if (t.trace.per_epoch.empty()) {
            out << t.trial << ",0," << fmt17(0.0) << ',' << fmt17(0.0)
                << ",0," << final_s << ",0," << final_s << '\n';
            continue;
        }
        for (const EpochRecord& rec : t.trace.per_epoch) {
            out << t.trial << ',' << rec.k << ',' << fmt17(rec.V) << ','
                << fmt17(rec.eta) << ',' << rec.T << ',' << fmt17(rec.delta_k)
                << ',' << rec.cumulative_updates << ',' << final_s << '\n';
        }
    }
}

std::string csv_string(const TrialBatch& batch) {
    std::ostringstream ss;
    write_csv(ss, batch);
    return ss.str();
}

void write_json(std::ostream& out, const TrialBatch& batch) {
    json doc;
    json cfg;
    cfg["family"] = batch.config.family;
    cfg["algorithm"] = algorithm_name(batch.config.algorithm);
    cfg["epsilon"] = batch.config.epsilon;
    if (batch.config.delta) cfg["delta"] = *batch.config.delta;
    cfg["trials"] = batch.config.trials;
    cfg["base_seed"] = batch.config.base_seed;
    cfg["iterate_rule"] = rule_name(batch.config.iterate_rule);
    cfg["jobs"] = batch.config.jobs;
    doc["config"] = cfg;

    json trials = json::array();
    for (const TrialResult& t : batch.trials) {
        json jt;
        jt["trial"] = t.trial;
        jt["seed"] = t.seed;
        jt["total_gradient_updates"] = t.trace.total_gradient_updates;
        jt["final_suboptimality"] = t.trace.final_suboptimality;
        json epochs = json::array();
        for (const EpochRecord& rec : t.trace.per_epoch) {
            json je;
            je["k"] = rec.k;
            je["V_k"] = rec.V;
            je["eta_k"] = rec.eta;
            je["T_k"] = rec.T;
            je["delta_k"] = rec.delta_k;
            je["cumulative_updates"] = rec.cumulative_updates;
            epochs.push_back(std::move(je));
        }
        jt["epochs"] = std::move(epochs);
        trials.push_back(std::move(jt));
    }
    doc["trials"] = std::move(trials);

    json agg;
    agg["mean_final"] = batch.aggregates.mean_final;
    agg["ci_halfwidth_final"] = batch.aggregates.ci_halfwidth_final;
    agg["failures"] = batch.aggregates.failures;
    agg["failure_fraction"] = batch.aggregates.failure_fraction;
    json per_epoch = json::array();
    for (const EpochAggregate& ea : batch.aggregates.per_epoch) {
        json je;
        je["k"] = ea.k;
        je["V_k"] = ea.V;
        je["mean_delta"] = ea.mean_delta;
        je["stderr_delta"] = ea.stderr_delta;
        je["n"] = ea.n;
        per_epoch.push_back(std::move(je));
    }
    agg["per_epoch"] = std::move(per_epoch);
    doc["aggregates"] = std::move(agg);

    out << doc.dump(2) << '\n';
}

TrialBatch run_experiment(const ExperimentConfig& config) {
    const Problem problem = build_problem(config);
    TrialBatch batch;
    batch.config = config;
    batch.trials = config.jobs == 1
                       ? run_trials_serial(config, problem)
                       : run_trials_parallel(config, problem, config.jobs);
    batch.aggregates = aggregate_trials(batch.trials, config.epsilon);
    if (!config.out.empty()) {
        std::ofstream out(config.out, std::ios::binary);
        if (!out) throw ConfigError("cannot open output: " + config.out);
        if (config.format == "json")
            write_json(out, batch);
        else
            write_csv(out, batch);
    }
    return batch;
}

RateReport fit_rate_report(std::vector<RatePoint> points) {
    std::vector<std::pair<double, double>> xy;
    xy.reserve(points.size());
    for (const RatePoint& p : points)
        xy.emplace_back(static_cast<double>(p.total_updates), p.mean_final);
    RateReport report;
    report.slope = stats::fit_loglog_slope(xy);
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    report.intercept = my - report.slope * mx;
    report.points = std::move(points);
    return report;
}

RateReport run_rate_sweep(const ExperimentConfig& config,
                          const std::vector<double>& epsilons) {
    if (epsilons.size() < 3)
        throw InsufficientPoints("rate sweep needs at least 3 epsilons");
    for (double e : epsilons)
        if (!(e > 0.0)) throw NonPositiveValue("epsilon");
    const auto [lo, hi] = std::minmax_element(epsilons.begin(), epsilons.end());
    if (*hi / *lo < 10.0 * (1.0 - 1e-12))
        throw InsufficientPoints("rate sweep epsilons must span a 10x range");

    const Problem problem = build_problem(config);
    std::vector<RatePoint> points;
    points.reserve(epsilons.size());
    for (std::size_t j = 0; j < epsilons.size(); ++j) {
        ExperimentConfig point_config = config;
        point_config.epsilon = epsilons[j];
        point_config.out.clear();
        point_config.base_seed = config.base_seed +
                                 static_cast<std::uint64_t>(j) *
                                     static_cast<std::uint64_t>(config.trials);
        const auto trials =
            point_config.jobs == 1
                ? run_trials_serial(point_config, problem)
                : run_trials_parallel(point_config, problem, point_config.jobs);
        const BatchAggregates agg = aggregate_trials(trials, epsilons[j]);
        RatePoint p;
        p.epsilon = epsilons[j];
        p.total_updates = trials.front().trace.total_gradient_updates;
        p.mean_final = agg.mean_final;
        points.push_back(p);
    }
    return fit_rate_report(std::move(points));
}

int VerdictReport::failures() const {
    int n = 0;
    for (const CheckResult& c : checks)
        if (!c.pass) ++n;
    return n;
}

void print_report(std::ostream& out, const VerdictReport& report) {
    for (const CheckResult& c : report.checks) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << c.module << '/' << c.name;
        if (!c.detail.empty()) out << "  (" << c.detail << ')';
        out << '\n';
    }
    out << report.checks.size() << " checks, " << report.failures()
        << " failures\n";
}

}  // namespace epochgd
