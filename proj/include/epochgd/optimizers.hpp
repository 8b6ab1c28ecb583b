#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "epochgd/core.hpp"

namespace epochgd {

enum class Variant { expectation, high_prob };
enum class IterateRule { average, uniform_random };

struct EpochParams {
    int k = 0;          // epoch index, 1-based
    double V = 0.0;     // target suboptimality M / 2^(k-1)
    double eta = 0.0;   // step size
    long long T = 0;    // epoch length
};

struct HighProbParams {
    double delta = 0.0;
    double delta_tilde = 0.0;  // delta / (4 * ceil(log2(M/eps)))
};

struct EpochSchedule {
    std::vector<EpochParams> epochs;
    int k_total = 0;  // ceil(log2(M/eps)), 0 when eps >= M
    double epsilon = 0.0;
    Variant variant = Variant::expectation;
    HighProbParams hp;             // meaningful for the high-prob variant only
    bool budget_precondition_ok = false;  // k_total <= 2G^2/(lambda*eps)

    long long total_updates() const {
        long long s = 0;
        for (const auto& e : epochs) s += e.T;
        return s;
    }
};

// Number of epochs: the smallest k >= 0 with M / 2^k <= eps, computed with
// exact power-of-two arithmetic (no log-rounding drift).
int epoch_count(double M, double epsilon);

HighProbParams high_prob_params(const ProblemSpec& spec, double epsilon,
                                double delta);

// Expectation variant: eta_k = V_k/(4G^2),  T_k = ceil(16 G^2 / (lambda V_k)).
// High-prob variant:   eta_k = V_k/(10G^2), T_k = ceil(100 G^2 ln(1/dt) / (lambda V_k)).
// Empty schedule when eps >= M. budget_precondition_ok is a warning flag, not
// an error: when false the 20G^2/(lambda eps) cap is not certified.
EpochSchedule build_epoch_schedule(const ProblemSpec& spec, double epsilon,
                                   Variant variant,
                                   std::optional<double> delta = std::nullopt);

// Returns (20 G^2 / (lambda eps), k_total <= 2 G^2 / (lambda eps)).
std::pair<double, bool> total_budget_bound(const ProblemSpec& spec, double epsilon);

struct RunOptions {
    bool check_gradient_norm = false;   // verify ||g_hat|| <= G on every draw
    double feasibility_check_tol = 0.0; // > 0: verify every iterate stays feasible
    bool literal_hp_radius = false;     // epoch ball radius V_k instead of sqrt(V_k/lambda);
                                        // exposed for comparison only, no correctness claim
    double hp_projection_tol = 1e-10;
    long long hp_projection_max_iters = 10000;
};

struct InnerTrace {
    long long steps = 0;
    double regret_sum = 0.0;   // sum_t g_hat_t . (x_t - x*), NaN when x* unknown
    double avg_regret = 0.0;   // regret_sum / T, NaN when x* unknown
    double start_dist = 0.0;   // D = ||x1 - x*||, NaN when x* unknown
    Vec last_iterate;          // x_{T+1}, the post-update point
};

// T iterations of x_{t+1} = project(x_t - eta * g_hat_t). Returns the average
// of x_1..x_T (rule = average) or a uniformly random one of them.
std::pair<Vec, InnerTrace> sgd_inner_loop(const Problem& problem,
                                          const Domain& domain, const Vec& x1,
                                          double eta, long long T,
                                          IterateRule rule, Rng& rng,
                                          const RunOptions& options = {});

struct EpochRecord {
    int k = 0;
    double V = 0.0;
    double eta = 0.0;
    long long T = 0;
    Vec start_point;
    Vec end_point;               // point fed to the next epoch
    double delta_k = 0.0;        // f(x_1^k) - f*, NaN when optimum unknown
    double avg_regret = 0.0;     // pathwise (1/T) sum g_hat.(x_t - x*), NaN when unknown
    long long cumulative_updates = 0;
};

struct RunTrace {
    std::vector<EpochRecord> per_epoch;
    long long total_gradient_updates = 0;
    Vec final_point;
    double final_suboptimality = 0.0;  // NaN when optimum unknown
};

// Epoch-GD, expectation variant. Chains sgd_inner_loop over the schedule,
// feeding each epoch's returned point into the next. eps >= M returns x1.
std::pair<Vec, RunTrace> epoch_gd(const Problem& problem, const Domain& domain,
                                  const Vec& x1, double epsilon, IterateRule rule,
                                  Rng& rng, const RunOptions& options = {});

// High-probability variant: per-epoch updates project onto
// K ∩ B_r(x_1^k) with r = sqrt(V_k / lambda).
std::pair<Vec, RunTrace> epoch_gd_high_prob(const Problem& problem,
                                            const Domain& domain, const Vec& x1,
                                            double epsilon, double delta,
                                            Rng& rng,
                                            const RunOptions& options = {});

// Comparison baseline: x_{t+1} = project(x_t - g_hat_t / (mu t)) with
// mu = 2 lambda_hk; returns the average iterate.
std::pair<Vec, InnerTrace> baseline_sgd_decaying(const Problem& problem,
                                                 const Domain& domain,
                                                 const Vec& x1, long long T,
                                                 Rng& rng,
                                                 const RunOptions& options = {});

}  // namespace epochgd
