#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epochgd/optimizers.hpp"
#include "epochgd/problems.hpp"

namespace epochgd {

enum class Algorithm { epoch_gd, epoch_gd_hp, baseline_sgd };

struct SvmConfig {
    std::string dataset;        // path to a libsvm file, or "toy"
    double lambda_reg = 1.0;
    double R_w = 2.0;
    double reference_tol = 1e-4;  // accuracy of the reference optimum
};

struct ExperimentConfig {
    std::string family = "quadratic";  // quadratic | svm
    QuadraticConfig quadratic;
    SvmConfig svm;
    Algorithm algorithm = Algorithm::epoch_gd;
    double epsilon = 0.0;
    std::optional<double> delta;
    int trials = 1;
    std::uint64_t base_seed = 0;
    IterateRule iterate_rule = IterateRule::average;
    long long baseline_T = 0;  // baseline-sgd only; 0 = match Epoch-GD's budget
    int jobs = 1;
    std::string out;           // output path; empty writes nowhere
    std::string format = "csv";  // csv | json
};

// Parses the JSON config document. Unknown keys and bad enum strings raise
// ConfigError with the offending field named.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Builds the configured problem; SVM problems get their optimum installed via
// reference_optimum at svm.reference_tol.
Problem build_problem(const ExperimentConfig& config);

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;  // base_seed + trial
    RunTrace trace;
};

struct EpochAggregate {
    int k = 0;
    double V = 0.0;
    double mean_delta = 0.0;
    double stderr_delta = 0.0;
    int n = 0;
};

struct BatchAggregates {
    double mean_final = 0.0;
    double ci_halfwidth_final = 0.0;  // 95% normal CI; 0 for a single trial
    std::vector<EpochAggregate> per_epoch;
    long long failures = 0;           // trials with final_suboptimality > epsilon
    double failure_fraction = 0.0;
};

struct TrialBatch {
    ExperimentConfig config;
    std::vector<TrialResult> trials;
    BatchAggregates aggregates;
};

// Trial i runs with seed = base_seed + i; results are keyed by trial index so
// the serial and OpenMP paths produce identical batches.
std::vector<TrialResult> run_trials_serial(const ExperimentConfig& config,
                                           const Problem& problem);
std::vector<TrialResult> run_trials_parallel(const ExperimentConfig& config,
                                             const Problem& problem, int jobs);

TrialResult run_single_trial(const ExperimentConfig& config,
                             const Problem& problem, int trial);

BatchAggregates aggregate_trials(const std::vector<TrialResult>& trials,
                                 double epsilon);

// Runs the trials (serial when jobs == 1, OpenMP otherwise), aggregates, and
// writes config.out when set.
TrialBatch run_experiment(const ExperimentConfig& config);

// One row per (trial, epoch): trial, epoch_k, V_k, eta_k, T_k, delta_k,
// cumulative_updates, final_suboptimality. Floats carry 17 significant
// digits. A zero-epoch run emits a single k=0 row.
void write_csv(std::ostream& out, const TrialBatch& batch);
void write_json(std::ostream& out, const TrialBatch& batch);
std::string csv_string(const TrialBatch& batch);

struct RatePoint {
    double epsilon = 0.0;
    long long total_updates = 0;
    double mean_final = 0.0;
};

struct RateReport {
    std::vector<RatePoint> points;
    double slope = 0.0;      // log(mean_final) vs log(total_updates)
    double intercept = 0.0;
};

// Fits the log-log slope of mean suboptimality against total updates.
// Exposed separately so synthetic point sets can be fed straight to the fit.
RateReport fit_rate_report(std::vector<RatePoint> points);

// Requires >= 3 epsilons with max/min >= 10 (InsufficientPoints otherwise).
RateReport run_rate_sweep(const ExperimentConfig& config,
                          const std::vector<double>& epsilons);

struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerdictReport {
    std::vector<CheckResult> checks;
    int failures() const;
    bool all_pass() const { return failures() == 0; }
};

// Parameterized check groups, reused by the suite and by fault-injection
// tests (e.g. a problem whose declared G understates the oracle).
std::vector<CheckResult> check_problem_contract(const std::string& module,
                                                const std::string& label,
                                                const Problem& problem,
                                                int norm_draws, int mc_samples,
                                                std::uint64_t seed);
std::vector<CheckResult> check_domain_contract(const std::string& module,
                                               const std::string& label,
                                               const Domain& domain,
                                               int samples, std::uint64_t seed,
                                               double tol);

// scope: all | core | projections | optimizers | problems | stats | harness.
VerdictReport run_invariant_suite(const std::string& scope, std::uint64_t seed);

void print_report(std::ostream& out, const VerdictReport& report);

}  // namespace epochgd
