#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <utility>

#include "epochgd/errors.hpp"
#include "epochgd/optimizers.hpp"
#include "epochgd/problems.hpp"
#include "epochgd/projections.hpp"

using namespace epochgd;

namespace {

// f(x) = x^2 on the real line with a noiseless oracle; every step is
// predictable by hand.
Problem one_dim_quadratic() {
    Problem p;
    p.spec = validate_problem({1, 4.0, 4.0, 1.0});
    p.domain = make_whole_space(1);
    p.value = [](const Vec& x) { return x[0] * x[0]; };
    p.subgradient_into = [](const Vec& x, Vec& g) { g.assign(1, 2.0 * x[0]); };
    p.stochastic_subgradient_into = [](const Vec& x, Rng&, Vec& g) {
        g.assign(1, 2.0 * x[0]);
    };
    p.optimum = Optimum{{0.0}, 0.0};
    return p;
}

QuadraticConfig bench_quadratic() {
    QuadraticConfig q;
    q.dim = 5;
    q.a = 1.0;
    q.x_star = {0.3, -0.2, 0.1, 0.0, 0.25};
    q.noise_sigma = 0.15;
    q.noise_cap = 0.4;
    q.domain_radius = 0.9;
    q.M = 4.0;
    q.G = 4.0;
    return q;
}

}  // namespace

TEST_CASE("epoch_count uses exact power-of-two arithmetic") {
    CHECK(epoch_count(1.0, 0.25) == 2);
    CHECK(epoch_count(1.0, 1.0) == 0);
    CHECK(epoch_count(1.0, 2.0) == 0);
    CHECK(epoch_count(4.0, 0.015625) == 8);
    CHECK(epoch_count(1.0, 0.2) == 3);
    CHECK_THROWS_AS(epoch_count(0.0, 0.5), NonPositiveConstant);
    CHECK_THROWS_AS(epoch_count(1.0, 0.0), NonPositiveConstant);
}

TEST_CASE("expectation schedule matches the closed form") {
    const EpochSchedule s =
        build_epoch_schedule({1, 1.0, 1.0, 1.0}, 0.25, Variant::expectation);
    REQUIRE(s.k_total == 2);
    REQUIRE(s.epochs.size() == 2);
    CHECK(s.epochs[0].V == 1.0);
    CHECK(s.epochs[0].eta == 0.25);
    CHECK(s.epochs[0].T == 16);
    CHECK(s.epochs[1].V == 0.5);
    CHECK(s.epochs[1].eta == 0.125);
    CHECK(s.epochs[1].T == 32);
    CHECK(s.total_updates() == 48);
    CHECK(s.budget_precondition_ok);
}

TEST_CASE("high-probability schedule fixes delta_tilde and epoch lengths") {
    const EpochSchedule s = build_epoch_schedule({1, 1.0, 1.0, 1.0}, 0.0625,
                                                 Variant::high_prob, 0.05);
    REQUIRE(s.k_total == 4);
    CHECK(s.hp.delta == 0.05);
    CHECK(s.hp.delta_tilde == 0.003125);
    CHECK(s.epochs[0].eta == 0.1);
    // ceil(100 * ln(320)) with ln(320) = 5.7683...
    CHECK(s.epochs[0].T == 577);
    CHECK(s.epochs[1].T == 2 * 577);
}

TEST_CASE("schedule rejects missing or out-of-range delta") {
    const ProblemSpec spec{1, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(build_epoch_schedule(spec, 0.25, Variant::high_prob),
                    MissingDelta);
    CHECK_THROWS_AS(build_epoch_schedule(spec, 0.25, Variant::high_prob, 0.0),
                    InvalidDelta);
    CHECK_THROWS_AS(build_epoch_schedule(spec, 0.25, Variant::high_prob, 1.0),
                    InvalidDelta);
    CHECK_THROWS_AS(build_epoch_schedule(spec, 0.25, Variant::expectation, 0.05),
                    InvalidDelta);
}

TEST_CASE("eps at or above M yields an empty schedule") {
    const EpochSchedule s =
        build_epoch_schedule({1, 1.0, 1.0, 1.0}, 1.0, Variant::expectation);
    CHECK(s.k_total == 0);
    CHECK(s.epochs.empty());
    CHECK(s.total_updates() == 0);
}

TEST_CASE("budget bound reports 20 G^2 / (lambda eps) and its precondition") {
    const auto [bound, ok] = total_budget_bound({1, 1.0, 1.0, 1.0}, 0.25);
    CHECK(bound == 80.0);
    CHECK(ok);
}

TEST_CASE("inner loop takes the predicted hand steps") {
    const Problem p = one_dim_quadratic();
    Rng rng(1);

    auto [avg1, t1] = sgd_inner_loop(p, p.domain, {1.0}, 0.5, 1,
                                     IterateRule::average, rng);
    CHECK(avg1 == Vec{1.0});             // average of x_1..x_T only
    CHECK(t1.last_iterate == Vec{0.0});  // x_2 = 1 - 0.5 * 2
    CHECK(t1.regret_sum == 2.0);
    CHECK(t1.avg_regret == 2.0);
    CHECK(t1.start_dist == 1.0);

    auto [avg2, t2] = sgd_inner_loop(p, p.domain, {1.0}, 0.5, 2,
                                     IterateRule::average, rng);
    CHECK(avg2 == Vec{0.5});  // (1 + 0) / 2
    CHECK(t2.last_iterate == Vec{0.0});
    CHECK(t2.avg_regret == 1.0);
}

TEST_CASE("a zero gradient leaves the start point fixed") {
    const Problem p = one_dim_quadratic();
    Rng rng(1);
    auto [avg, trace] = sgd_inner_loop(p, p.domain, {0.0}, 0.1, 50,
                                       IterateRule::average, rng);
    CHECK(avg == Vec{0.0});
    CHECK(trace.last_iterate == Vec{0.0});
    CHECK(trace.steps == 50);
}

TEST_CASE("uniform_random returns one of the visited iterates") {
    const Problem p = one_dim_quadratic();
    Rng rng(5);
    auto [picked, trace] = sgd_inner_loop(p, p.domain, {1.0}, 0.25, 4,
                                          IterateRule::uniform_random, rng);
    // deterministic dynamics: x_t = 0.5^(t-1)
    const Vec possible{1.0, 0.5, 0.25, 0.125};
    bool found = false;
    for (double v : possible) found = found || picked == Vec{v};
    CHECK(found);
    CHECK(trace.steps == 4);
}

TEST_CASE("inner loop validates its inputs") {
    const Problem p = one_dim_quadratic();
    Rng rng(1);
    CHECK_THROWS_AS(sgd_inner_loop(p, p.domain, {1.0}, 0.0, 1,
                                   IterateRule::average, rng),
                    NonPositiveConstant);
    CHECK_THROWS_AS(sgd_inner_loop(p, p.domain, {1.0}, 0.1, 0,
                                   IterateRule::average, rng),
                    NonPositiveConstant);
    CHECK_THROWS_AS(sgd_inner_loop(p, p.domain, {1.0, 2.0}, 0.1, 1,
                                   IterateRule::average, rng),
                    DimensionMismatch);

    const Problem ball = make_quadratic(bench_quadratic());
    Rng rng2(1);
    CHECK_THROWS_AS(sgd_inner_loop(ball, ball.domain, Vec(5, 2.0), 0.1, 1,
                                   IterateRule::average, rng2),
                    InfeasibleStart);
}

TEST_CASE("baseline SGD uses 1/(mu t) steps with mu = 2 lambda_hk") {
    const Problem p = one_dim_quadratic();
    Rng rng(1);
    auto [avg, trace] = baseline_sgd_decaying(p, p.domain, {1.0}, 1, rng);
    CHECK(avg == Vec{1.0});              // average of x_1..x_T
    CHECK(trace.last_iterate == Vec{0.0});  // eta_1 = 1/2, x_2 = 1 - 0.5 * 2

    Rng rng2(1);
    auto [avg3, trace3] = baseline_sgd_decaying(p, p.domain, {1.0}, 3, rng2);
    // x_1 = 1, x_2 = 0, x_3 = 0
    CHECK(avg3[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(trace3.last_iterate == Vec{0.0});
}

TEST_CASE("zero-update run returns the start point unchanged") {
    const Problem p = one_dim_quadratic();
    Rng rng(3);
    const Vec x1{0.7};
    auto [x, trace] = epoch_gd(p, p.domain, x1, 4.0, IterateRule::average, rng);
    CHECK(x == x1);
    CHECK(trace.total_gradient_updates == 0);
    CHECK(trace.per_epoch.empty());
    CHECK(trace.final_suboptimality == doctest::Approx(0.49).epsilon(1e-15));
}

TEST_CASE("epoch_gd executes the schedule exactly and converges") {
    const Problem p = make_quadratic(bench_quadratic());
    const double eps = 0.0625;
    const EpochSchedule s =
        build_epoch_schedule(p.spec, eps, Variant::expectation);
    Rng rng(42);
    const Vec x1 = p.domain.sample(rng);
    auto [x, trace] = epoch_gd(p, p.domain, x1, eps, IterateRule::average, rng);

    REQUIRE(trace.per_epoch.size() == s.epochs.size());
    long long cum = 0;
    for (std::size_t k = 0; k < s.epochs.size(); ++k) {
        CHECK(trace.per_epoch[k].k == s.epochs[k].k);
        CHECK(trace.per_epoch[k].V == s.epochs[k].V);
        CHECK(trace.per_epoch[k].eta == s.epochs[k].eta);
        CHECK(trace.per_epoch[k].T == s.epochs[k].T);
        cum += s.epochs[k].T;
        CHECK(trace.per_epoch[k].cumulative_updates == cum);
    }
    CHECK(trace.total_gradient_updates == s.total_updates());
    CHECK(trace.final_suboptimality >= 0.0);
    CHECK(trace.final_suboptimality <= eps);
    CHECK(x == trace.final_point);
}

TEST_CASE("epoch boundaries chain: each epoch starts at the previous end") {
    const Problem p = make_quadratic(bench_quadratic());
    Rng rng(7);
    const Vec x1 = p.domain.sample(rng);
    auto [x, trace] = epoch_gd(p, p.domain, x1, 0.25, IterateRule::average, rng);
    REQUIRE(!trace.per_epoch.empty());
    CHECK(trace.per_epoch.front().start_point == x1);
    for (std::size_t k = 1; k < trace.per_epoch.size(); ++k)
        CHECK(trace.per_epoch[k].start_point == trace.per_epoch[k - 1].end_point);
    CHECK(trace.per_epoch.back().end_point == x);
}

TEST_CASE("identical seeds reproduce the run bit for bit") {
    const Problem p = make_quadratic(bench_quadratic());
    Rng a(99), b(99);
    const Vec x1 = p.domain.sample(a);
    const Vec x1b = p.domain.sample(b);
    REQUIRE(x1 == x1b);
    auto [xa, ta] = epoch_gd(p, p.domain, x1, 0.03125, IterateRule::average, a);
    auto [xb, tb] = epoch_gd(p, p.domain, x1b, 0.03125, IterateRule::average, b);
    CHECK(xa == xb);
    CHECK(ta.final_suboptimality == tb.final_suboptimality);
    REQUIRE(ta.per_epoch.size() == tb.per_epoch.size());
    for (std::size_t k = 0; k < ta.per_epoch.size(); ++k) {
        CHECK(ta.per_epoch[k].end_point == tb.per_epoch[k].end_point);
        CHECK(ta.per_epoch[k].delta_k == tb.per_epoch[k].delta_k);
    }
}

TEST_CASE("high-probability epochs stay inside the shrinking balls") {
    const Problem p = make_quadratic(bench_quadratic());
    Rng rng(11);
    const Vec x1 = p.domain.sample(rng);
    RunOptions opts;
    opts.feasibility_check_tol = 1e-8;
    auto [x, trace] =
        epoch_gd_high_prob(p, p.domain, x1, 0.125, 0.1, rng, opts);

    const EpochSchedule s =
        build_epoch_schedule(p.spec, 0.125, Variant::high_prob, 0.1);
    REQUIRE(trace.per_epoch.size() == s.epochs.size());
    for (std::size_t k = 0; k < s.epochs.size(); ++k) {
        CHECK(trace.per_epoch[k].T == s.epochs[k].T);
        // the averaged iterate lives in K ∩ B_r(start), r = sqrt(V_k/lambda)
        const double r = std::sqrt(s.epochs[k].V / p.spec.lambda_hk);
        CHECK(dist(trace.per_epoch[k].end_point, trace.per_epoch[k].start_point) <=
              r + 1e-6);
        CHECK(p.domain.contains(trace.per_epoch[k].end_point, 1e-8));
    }
    CHECK(trace.final_suboptimality <= 0.125);
}

TEST_CASE("pathwise regret respects eta G^2 + D^2/(eta T)") {
    const Problem p = make_quadratic(bench_quadratic());
    const double g2 = p.spec.G * p.spec.G;
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const double eta = std::exp(rng.uniform(std::log(1e-3), std::log(0.5)));
        const long long T = 1 + static_cast<long long>(rng.uniform_index(2000));
        const Vec x1 = p.domain.sample(rng);
        auto [x, trace] =
            sgd_inner_loop(p, p.domain, x1, eta, T, IterateRule::average, rng);
        const double D = trace.start_dist;
        const double bound = eta * g2 + D * D / (eta * static_cast<double>(T));
        CHECK(trace.avg_regret <= bound + 1e-9);
    }
}
