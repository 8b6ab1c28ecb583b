#include "epochgd/optimizers.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "epochgd/errors.hpp"
#include "epochgd/projections.hpp"

namespace epochgd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

long long ceil_to_count(double raw) {
    const double c = std::ceil(raw);
    if (!(c >= 1.0)) throw NonPositiveConstant("epoch length");
    if (c > 9.0e18) throw Error("epoch length overflows a 64-bit count");
    return static_cast<long long>(c);
}

void check_feasible_start(const Domain& domain, const Vec& x1) {
    if (static_cast<std::size_t>(domain.dim) != x1.size())
        throw DimensionMismatch(x1.size(), static_cast<std::size_t>(domain.dim));
    if (!domain.contains(x1, 1e-9)) throw InfeasibleStart();
}

void check_gradient_norm(const Vec& g, double G) {
    if (norm(g) > G * (1.0 + 1e-12) + 1e-12)
        throw Error("stochastic subgradient norm exceeds G");
}

}  // namespace

int epoch_count(double M, double epsilon) {
    if (!(M > 0.0)) throw NonPositiveConstant("M");
    if (!(epsilon > 0.0)) throw NonPositiveConstant("epsilon");
    if (epsilon >= M) return 0;
    int k = 0;
    double pow2 = 1.0;
    while (M > epsilon * pow2) {
        pow2 *= 2.0;
        ++k;
        if (k > 4096) throw Error("epoch count exceeds 4096; M/epsilon too large");
    }
    return k;
}

HighProbParams high_prob_params(const ProblemSpec& spec, double epsilon,
                                double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta();
    const int k = epoch_count(spec.M, epsilon);
    HighProbParams p;
    p.delta = delta;
    p.delta_tilde = k > 0 ? delta / (4.0 * static_cast<double>(k)) : delta;
    return p;
}

EpochSchedule build_epoch_schedule(const ProblemSpec& spec0, double epsilon,
                                   Variant variant, std::optional<double> delta) {
    const ProblemSpec spec = validate_problem(spec0);
    if (!(epsilon > 0.0)) throw NonPositiveConstant("epsilon");
    if (variant == Variant::high_prob && !delta) throw MissingDelta();
    if (variant == Variant::expectation && delta)
        throw InvalidDelta("delta is only meaningful for the high-prob variant");

    EpochSchedule s;
    s.variant = variant;
    s.epsilon = epsilon;
    s.k_total = epoch_count(spec.M, epsilon);

    const double g2 = spec.G * spec.G;
    double log_inv_dt = 0.0;
    if (variant == Variant::high_prob) {
        s.hp = high_prob_params(spec, epsilon, *delta);
        if (s.k_total > 0) log_inv_dt = std::log(1.0 / s.hp.delta_tilde);
    }

    double V = spec.M;
    for (int k = 1; k <= s.k_total; ++k) {
        EpochParams e;
        e.k = k;
        e.V = V;
        if (variant == Variant::expectation) {
            e.eta = V / (4.0 * g2);
            e.T = ceil_to_count(16.0 * g2 / (spec.lambda_hk * V));
        } else {
            e.eta = V / (10.0 * g2);
            e.T = ceil_to_count(100.0 * g2 * log_inv_dt / (spec.lambda_hk * V));
        }
        s.epochs.push_back(e);
        V /= 2.0;
    }

    s.budget_precondition_ok =
        static_cast<double>(s.k_total) <= 2.0 * g2 / (spec.lambda_hk * epsilon);
    return s;
}

std::pair<double, bool> total_budget_bound(const ProblemSpec& spec0,
                                           double epsilon) {
    const ProblemSpec spec = validate_problem(spec0);
    if (!(epsilon > 0.0)) throw NonPositiveConstant("epsilon");
    const double g2 = spec.G * spec.G;
    const double bound = 20.0 * g2 / (spec.lambda_hk * epsilon);
    const bool ok = static_cast<double>(epoch_count(spec.M, epsilon)) <=
                    2.0 * g2 / (spec.lambda_hk * epsilon);
    return {bound, ok};
}

std::pair<Vec, InnerTrace> sgd_inner_loop(const Problem& problem,
                                          const Domain& domain, const Vec& x1,
                                          double eta, long long T,
                                          IterateRule rule, Rng& rng,
                                          const RunOptions& options) {
    if (!(eta > 0.0)) throw NonPositiveConstant("eta");
    if (T < 1) throw NonPositiveConstant("T");
    check_feasible_start(domain, x1);

    const std::size_t d = x1.size();
    const bool track = problem.optimum.has_value();
    const Vec* x_star = track ? &problem.optimum->point : nullptr;

    long long pick = 0;
    Vec picked;
    if (rule == IterateRule::uniform_random)
        pick = 1 + static_cast<long long>(rng.uniform_index(static_cast<std::size_t>(T)));

    Vec x = x1, g(d), step(d), next(d);
    Vec avg(d, 0.0);
    double regret = 0.0;

    for (long long t = 1; t <= T; ++t) {
        problem.stochastic_subgradient_into(x, rng, g);
        if (options.check_gradient_norm) check_gradient_norm(g, problem.spec.G);
        if (track) {
            double r = 0.0;
            for (std::size_t i = 0; i < d; ++i) r += g[i] * (x[i] - (*x_star)[i]);
            regret += r;
        }
        if (rule == IterateRule::average) {
            for (std::size_t i = 0; i < d; ++i) avg[i] += x[i];
        } else if (t == pick) {
            picked = x;
        }
        for (std::size_t i = 0; i < d; ++i) step[i] = x[i] - eta * g[i];
        domain.project_into(step, next);
        if (options.feasibility_check_tol > 0.0 &&
            !domain.contains(next, options.feasibility_check_tol))
            throw Error("iterate left the feasible set");
        x.swap(next);
    }

    Vec ret;
    if (rule == IterateRule::average) {
        ret = std::move(avg);
        for (double& v : ret) v /= static_cast<double>(T);
    } else {
        ret = std::move(picked);
    }

    InnerTrace trace;
    trace.steps = T;
    trace.regret_sum = track ? regret : kNaN;
    trace.avg_regret = track ? regret / static_cast<double>(T) : kNaN;
    trace.start_dist = track ? dist(x1, *x_star) : kNaN;
    trace.last_iterate = std::move(x);
    return {std::move(ret), std::move(trace)};
}

namespace {

std::pair<Vec, RunTrace> run_epochs(const Problem& problem, const Domain& domain,
                                    const Vec& x1, const EpochSchedule& schedule,
                                    IterateRule rule, Rng& rng,
                                    const RunOptions& options) {
    check_feasible_start(domain, x1);
    const bool track = problem.optimum.has_value();
    const double f_star = track ? problem.optimum->value : 0.0;
    const bool high_prob = schedule.variant == Variant::high_prob;

    RunTrace trace;
    Vec x = x1;
    long long cumulative = 0;
    for (const EpochParams& ep : schedule.epochs) {
        EpochRecord rec;
        rec.k = ep.k;
        rec.V = ep.V;
        rec.eta = ep.eta;
        rec.T = ep.T;
        rec.start_point = x;
        rec.delta_k = track ? problem.value(x) - f_star : kNaN;

        std::pair<Vec, InnerTrace> result;
        if (high_prob) {
            const double r = options.literal_hp_radius
                                 ? ep.V
                                 : std::sqrt(ep.V / problem.spec.lambda_hk);
            BallSpec epoch_ball{x, r};
            Domain epoch_domain =
                domain.kind == DomainKind::whole_space
                    ? make_ball_domain(std::move(epoch_ball))
                    : make_intersection_ball_domain(domain, std::move(epoch_ball),
                                                    options.hp_projection_tol,
                                                    options.hp_projection_max_iters);
            result = sgd_inner_loop(problem, epoch_domain, x, ep.eta, ep.T, rule,
                                    rng, options);
        } else {
            result = sgd_inner_loop(problem, domain, x, ep.eta, ep.T, rule, rng,
                                    options);
        }

        x = std::move(result.first);
        cumulative += ep.T;
        rec.end_point = x;
        rec.avg_regret = result.second.avg_regret;
        rec.cumulative_updates = cumulative;
        trace.per_epoch.push_back(std::move(rec));
    }

    trace.total_gradient_updates = cumulative;
    trace.final_point = x;
    trace.final_suboptimality = track ? problem.value(x) - f_star : kNaN;
    return {std::move(x), std::move(trace)};
}

}  // namespace

std::pair<Vec, RunTrace> epoch_gd(const Problem& problem, const Domain& domain,
                                  const Vec& x1, double epsilon, IterateRule rule,
                                  Rng& rng, const RunOptions& options) {
    const EpochSchedule schedule =
        build_epoch_schedule(problem.spec, epsilon, Variant::expectation);
    return run_epochs(problem, domain, x1, schedule, rule, rng, options);
}

std::pair<Vec, RunTrace> epoch_gd_high_prob(const Problem& problem,
                                            const Domain& domain, const Vec& x1,
                                            double epsilon, double delta,
                                            Rng& rng, const RunOptions& options) {
    const EpochSchedule schedule =
        build_epoch_schedule(problem.spec, epsilon, Variant::high_prob, delta);
    return run_epochs(problem, domain, x1, schedule, IterateRule::average, rng,
                      options);
}

std::pair<Vec, InnerTrace> baseline_sgd_decaying(const Problem& problem,
                                                 const Domain& domain,
                                                 const Vec& x1, long long T,
                                                 Rng& rng,
                                                 const RunOptions& options) {
    if (T < 1) throw NonPositiveConstant("T");
    check_feasible_start(domain, x1);

    const std::size_t d = x1.size();
    const double mu = 2.0 * problem.spec.lambda_hk;
    const bool track = problem.optimum.has_value();
    const Vec* x_star = track ? &problem.optimum->point : nullptr;

    Vec x = x1, g(d), step(d), next(d), avg(d, 0.0);
    double regret = 0.0;
    for (long long t = 1; t <= T; ++t) {
        problem.stochastic_subgradient_into(x, rng, g);
        if (options.check_gradient_norm) check_gradient_norm(g, problem.spec.G);
        if (track) {
            double r = 0.0;
            for (std::size_t i = 0; i < d; ++i) r += g[i] * (x[i] - (*x_star)[i]);
            regret += r;
        }
        for (std::size_t i = 0; i < d; ++i) avg[i] += x[i];
        const double eta = 1.0 / (mu * static_cast<double>(t));
        for (std::size_t i = 0; i < d; ++i) step[i] = x[i] - eta * g[i];
        domain.project_into(step, next);
        x.swap(next);
    }
    for (double& v : avg) v /= static_cast<double>(T);

    InnerTrace trace;
    trace.steps = T;
    trace.regret_sum = track ? regret : kNaN;
    trace.avg_regret = track ? regret / static_cast<double>(T) : kNaN;
    trace.start_dist = track ? dist(x1, *x_star) : kNaN;
    trace.last_iterate = std::move(x);
    return {std::move(avg), std::move(trace)};
}

}  // namespace epochgd
