#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "epochgd/errors.hpp"
#include "epochgd/harness.hpp"
#include "epochgd/projections.hpp"
#include "epochgd/stats.hpp"

namespace epochgd {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

CheckResult check(const std::string& module, const std::string& name,
                  bool pass, const std::string& detail) {
    return CheckResult{module, name, pass, detail};
}

// Wraps a check body so an unexpected exception becomes a failing verdict
// rather than aborting the suite.
template <typename Fn>
CheckResult guarded(const std::string& module, const std::string& name, Fn body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return check(module, name, false, std::string("exception: ") + e.what());
    }
}

ExperimentConfig bundled_quadratic_config() {
    ExperimentConfig c;
    c.family = "quadratic";
    c.quadratic.dim = 5;
    c.quadratic.a = 1.0;
    c.quadratic.domain_radius = 0.9;
    c.quadratic.noise_sigma = 0.15;
    c.quadratic.noise_cap = 0.4;
    c.quadratic.M = 4.0;
    c.quadratic.G = 4.0;
    c.epsilon = 0.0625;
    c.trials = 1;
    return c;
}

Problem bundled_quadratic() { return make_quadratic(bundled_quadratic_config().quadratic); }

Problem bundled_toy_svm() {
    Problem p = make_svm(make_toy_separable(), 1.0, 2.0);
    p.optimum = Optimum{{0.5, 0.5}, 0.75};
    return p;
}

// ---- core / projections -----------------------------------------------

Vec perturbed_sample(const Domain& domain, Rng& rng, double scale) {
    Vec y(static_cast<std::size_t>(domain.dim));
    domain.sample_into(rng, y);
    for (double& v : y) v += scale * rng.normal();
    return y;
}

}  // namespace

std::vector<CheckResult> check_domain_contract(const std::string& module,
                                               const std::string& label,
                                               const Domain& domain,
                                               int samples, std::uint64_t seed,
                                               double tol) {
    std::vector<CheckResult> out;
    Rng rng(seed);
    double worst_idem = 0.0, worst_nonexp = 0.0;
    bool member = true;
    Vec py, ppy, pz;
    for (int i = 0; i < samples; ++i) {
        const Vec y = perturbed_sample(domain, rng, 2.0);
        const Vec z = perturbed_sample(domain, rng, 2.0);
        domain.project_into(y, py);
        domain.project_into(py, ppy);
        domain.project_into(z, pz);
        worst_idem = std::max(worst_idem, dist(py, ppy));
        member = member && domain.contains(py, tol);
        worst_nonexp = std::max(worst_nonexp, dist(py, pz) - dist(y, z));
    }
    out.push_back(check(module, label + " idempotence", worst_idem <= tol,
                        "max drift " + fmt(worst_idem)));
    out.push_back(check(module, label + " membership", member,
                        member ? "all projected points feasible"
                               : "projected point left the set"));
    out.push_back(check(module, label + " nonexpansiveness",
                        worst_nonexp <= tol,
                        "max expansion " + fmt(worst_nonexp)));
    return out;
}

std::vector<CheckResult> check_problem_contract(const std::string& module,
                                                const std::string& label,
                                                const Problem& problem,
                                                int norm_draws, int mc_samples,
                                                std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(guarded(module, label + " growth condition", [&] {
        const GrowthReport g = check_growth_condition(problem, mc_samples, seed);
        return check(module, label + " growth condition", !g.violated,
                     "min slack " + fmt(g.min_slack));
    }));
    out.push_back(guarded(module, label + " unbiasedness", [&] {
        Rng rng(seed + 1);
        Vec x(static_cast<std::size_t>(problem.domain.dim));
        problem.domain.sample_into(rng, x);
        const UnbiasednessReport u =
            check_unbiasedness(problem, x, mc_samples, seed + 2);
        return check(module, label + " unbiasedness", u.ok,
                     "max z-score " + fmt(u.max_z));
    }));
    out.push_back(guarded(module, label + " subgradient norm bound", [&] {
        const NormBoundReport n = check_subgradient_norms(problem, norm_draws, seed + 3);
        return check(module, label + " subgradient norm bound", n.ok,
                     "max " + fmt(n.max_norm) + " vs G " + fmt(n.bound));
    }));
    return out;
}

namespace {

void append(std::vector<CheckResult>& into, std::vector<CheckResult> items) {
    for (auto& c : items) into.push_back(std::move(c));
}

// ---- module suites ------------------------------------------------------

void suite_core(std::vector<CheckResult>& out, std::uint64_t seed) {
    const Problem quad = bundled_quadratic();
    const Problem svm = bundled_toy_svm();
    append(out, check_problem_contract("core", "quadratic", quad, 100000, 20000, seed));
    append(out, check_problem_contract("core", "toy svm", svm, 100000, 20000, seed + 10));

    out.push_back(guarded("core", "per-draw norm assertion in verification mode", [&] {
        Rng rng(seed + 20);
        Vec x1(static_cast<std::size_t>(quad.domain.dim));
        quad.domain.sample_into(rng, x1);
        RunOptions opts;
        opts.check_gradient_norm = true;
        opts.feasibility_check_tol = 1e-9;
        epoch_gd(quad, quad.domain, x1, 0.0625, IterateRule::average, rng, opts);
        return check("core", "per-draw norm assertion in verification mode", true,
                     "epoch-gd run with per-draw checks enabled");
    }));

    const Vec c2 = {0.25, -0.5};
    append(out, check_domain_contract("core", "whole-space d=3",
                                      make_whole_space(3), 10000, seed + 31, 1e-12));
    append(out, check_domain_contract("core", "ball", make_ball_domain(BallSpec{c2, 1.5}),
                                      10000, seed + 32, 1e-12));
    append(out, check_domain_contract("core", "box",
                                      make_box_domain({-1.0, 0.0}, {0.5, 2.0}),
                                      10000, seed + 33, 1e-12));
    append(out, check_domain_contract("core", "simplex d=4", make_simplex_domain(4),
                                      10000, seed + 34, 1e-12));
}

void suite_projections(std::vector<CheckResult>& out, std::uint64_t seed) {
    append(out, check_domain_contract("projections", "ball",
                                      make_ball_domain(BallSpec{{0.3, -0.7, 0.1}, 0.8}),
                                      10000, seed, 1e-12));
    append(out, check_domain_contract("projections", "box",
                                      make_box_domain({-2.0, -1.0, 0.0}, {-0.5, 1.0, 3.0}),
                                      10000, seed + 1, 1e-12));
    append(out, check_domain_contract("projections", "simplex d=6",
                                      make_simplex_domain(6), 10000,
                                      seed + 2, 1e-12));
    // Dykstra stops at its tolerance, so the contract is checked at a looser
    // scale than the exact operators.
    append(out, check_domain_contract(
                    "projections", "box-ball intersection",
                    make_intersection_ball_domain(make_box_domain({0.0, 0.0}, {1.0, 1.0}),
                                                  BallSpec{{1.0, 1.0}, 0.75}, 1e-13, 100000),
                    10000, seed + 3, 1e-7));

    out.push_back(guarded("projections", "variational characterization", [&] {
        Rng rng(seed + 4);
        const std::vector<Domain> domains = {
            make_ball_domain(BallSpec{{0.1, 0.2, -0.3}, 1.2}),
            make_box_domain({-1.0, -1.0, -1.0}, {1.0, 0.5, 2.0}),
            make_simplex_domain(3),
        };
        double worst = -1e300;
        for (const Domain& d : domains) {
            Vec z(3), py(3);
            for (int i = 0; i < 10; ++i) {
                const Vec y = perturbed_sample(d, rng, 3.0);
                d.project_into(y, py);
                for (int j = 0; j < 1000; ++j) {
                    d.sample_into(rng, z);
                    double g = 0.0;
                    for (std::size_t q = 0; q < z.size(); ++q)
                        g += (y[q] - py[q]) * (z[q] - py[q]);
                    worst = std::max(worst, g);
                }
            }
        }
        return check("projections", "variational characterization", worst <= 1e-9,
                     "max (y-Py).(z-Py) = " + fmt(worst));
    }));

    out.push_back(guarded("projections", "intersection matches grid and KKT", [&] {
        Rng rng(seed + 5);
        double worst_value = 0.0, worst_pos = 0.0;
        for (int inst = 0; inst < 100; ++inst) {
            const double lo0 = rng.uniform(-1.0, 0.0), hi0 = lo0 + rng.uniform(0.5, 2.0);
            const double lo1 = rng.uniform(-1.0, 0.0), hi1 = lo1 + rng.uniform(0.5, 2.0);
            const Vec center = {rng.uniform(lo0, hi0), rng.uniform(lo1, hi1)};
            const BallSpec ball{center, rng.uniform(0.2, 1.0)};
            const Domain box = make_box_domain({lo0, lo1}, {hi0, hi1});
            const Domain inter = make_intersection_ball_domain(box, ball, 1e-12, 1000000);
            const Vec y = {rng.uniform(lo0 - 1.5, hi0 + 1.5),
                           rng.uniform(lo1 - 1.5, hi1 + 1.5)};
            const Vec got = inter.project(y);

            // brute force over the lattice at step <= 1e-4: per column the
            // ball-feasible rows form an interval, so the column minimizer
            // is the clamped row nearest y[1] (neighbors kept for rounding)
            const int n = 20000;
            const double g0 = (hi0 - lo0) / n, g1 = (hi1 - lo1) / n;
            double best_d = 1e300;
            for (int i = 0; i <= n; ++i) {
                const double px = lo0 + g0 * i;
                const double dx = px - center[0];
                if (std::abs(dx) > ball.radius) continue;
                const double s = std::sqrt(ball.radius * ball.radius - dx * dx);
                const long long jlo = std::max<long long>(
                    0, static_cast<long long>(
                           std::ceil((center[1] - s - lo1) / g1 - 1.0)));
                const long long jhi = std::min<long long>(
                    n, static_cast<long long>(
                           std::floor((center[1] + s - lo1) / g1 + 1.0)));
                if (jlo > jhi) continue;
                const long long jy = std::clamp(
                    static_cast<long long>(std::llround((y[1] - lo1) / g1)),
                    jlo, jhi);
                for (long long j : {jlo, jlo + 1, jlo + 2,
                                    std::max(jy - 1, jlo), jy,
                                    std::min(jy + 1, jhi),
                                    jhi - 2, jhi - 1, jhi}) {
                    if (j < jlo || j > jhi) continue;
                    const Vec p = {px, lo1 + g1 * j};
                    if (dist(p, ball.center) > ball.radius) continue;
                    best_d = std::min(best_d, dist(p, y));
                }
            }
            if (best_d == 1e300) continue;
            worst_value = std::max(worst_value, std::abs(dist(got, y) - best_d));

            // independent exact solver: x(t) = clamp((1-t) y + t c) walks the
            // segment toward the (feasible) center; ||x(t) - c|| decreases,
            // so bisecting it onto the ball radius gives the projection
            auto x_of = [&](double t) {
                return Vec{std::clamp((1.0 - t) * y[0] + t * center[0], lo0, hi0),
                           std::clamp((1.0 - t) * y[1] + t * center[1], lo1, hi1)};
            };
            Vec exact = x_of(0.0);
            if (dist(exact, ball.center) > ball.radius) {
                double t_lo = 0.0, t_hi = 1.0;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (t_lo + t_hi);
                    (dist(x_of(mid), ball.center) > ball.radius ? t_lo : t_hi) = mid;
                }
                exact = x_of(t_hi);
            }
            worst_pos = std::max(worst_pos, dist(got, exact));
        }
        return check("projections", "intersection matches grid and KKT",
                     worst_value <= 1e-3 && worst_pos <= 1e-3,
                     "grid value gap " + fmt(worst_value) + ", KKT deviation " +
                         fmt(worst_pos));
    }));
}

void suite_optimizers(std::vector<CheckResult>& out, std::uint64_t seed) {
    const Problem quad = bundled_quadratic();

    out.push_back(guarded("optimizers", "pathwise regret bound", [&] {
        int violations = 0;
        double worst_margin = -1e300;
        for (int run = 0; run < 100; ++run) {
            Rng rng(seed + static_cast<std::uint64_t>(run));
            Vec x1(static_cast<std::size_t>(quad.domain.dim));
            quad.domain.sample_into(rng, x1);
            const double eta = std::exp(rng.uniform(std::log(1e-3), std::log(0.5)));
            const long long T = 1 + static_cast<long long>(rng.uniform_index(2000));
            const auto [x, trace] = sgd_inner_loop(quad, quad.domain, x1, eta, T,
                                                   IterateRule::average, rng);
            const double D = trace.start_dist;
            const double bound = eta * quad.spec.G * quad.spec.G +
                                 D * D / (eta * static_cast<double>(T)) + 1e-9;
            const double margin = trace.avg_regret - bound;
            worst_margin = std::max(worst_margin, margin);
            if (margin > 0.0) ++violations;
        }
        return check("optimizers", "pathwise regret bound", violations == 0,
                     "100 runs, worst margin " + fmt(worst_margin));
    }));

    out.push_back(guarded("optimizers", "epoch halving mean(delta_k) <= V_k", [&] {
        ExperimentConfig c = bundled_quadratic_config();
        c.epsilon = 0.0625;
        c.trials = 1000;
        c.base_seed = seed + 1000;
        const auto trials = run_trials_serial(c, quad);
        const BatchAggregates agg = aggregate_trials(trials, c.epsilon);
        bool ok = !agg.per_epoch.empty();
        double worst = -1e300;
        for (const EpochAggregate& ea : agg.per_epoch) {
            const double margin = ea.mean_delta - 2.0 * ea.stderr_delta - ea.V;
            worst = std::max(worst, margin);
            ok = ok && margin <= 0.0;
        }
        return check("optimizers", "epoch halving mean(delta_k) <= V_k", ok,
                     "1000 trials, worst margin " + fmt(worst));
    }));

    out.push_back(guarded("optimizers", "schedule closed forms exact", [&] {
        Rng rng(seed + 2000);
        bool ok = true;
        for (int i = 0; i < 200 && ok; ++i) {
            ProblemSpec spec;
            spec.dim = 1;
            spec.M = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
            spec.G = std::exp(rng.uniform(std::log(0.1), std::log(50.0)));
            spec.lambda_hk = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
            const double eps = spec.M * std::ldexp(1.0, -static_cast<int>(1 + rng.uniform_index(12)));
            const bool hp = rng.uniform01() < 0.5;
            const EpochSchedule s =
                hp ? build_epoch_schedule(spec, eps, Variant::high_prob, 0.05)
                   : build_epoch_schedule(spec, eps, Variant::expectation);
            // independent recomputation, straight from the closed forms
            int k_total = 0;
            while (std::ldexp(eps, k_total) < spec.M) ++k_total;
            ok = ok && s.k_total == k_total &&
                 s.epochs.size() == static_cast<std::size_t>(k_total);
            const double g2 = spec.G * spec.G;
            for (int k = 1; k <= k_total && ok; ++k) {
                const double V = std::ldexp(spec.M, -(k - 1));
                const EpochParams& e = s.epochs[static_cast<std::size_t>(k - 1)];
                if (hp) {
                    const double dt = 0.05 / (4.0 * k_total);
                    ok = e.V == V && e.eta == V / (10.0 * g2) &&
                         e.T == static_cast<long long>(std::ceil(
                                    100.0 * g2 * std::log(1.0 / dt) /
                                    (spec.lambda_hk * V)));
                } else {
                    ok = e.V == V && e.eta == V / (4.0 * g2) &&
                         e.T == static_cast<long long>(std::ceil(
                                    16.0 * g2 / (spec.lambda_hk * V)));
                }
            }
        }
        return check("optimizers", "schedule closed forms exact", ok,
                     "200 random (spec, eps) pairs, both variants");
    }));

    out.push_back(guarded("optimizers", "high-prob iterates stay in K and epoch ball", [&] {
        for (int run = 0; run < 5; ++run) {
            Rng rng(seed + 3000 + static_cast<std::uint64_t>(run));
            Vec x1(static_cast<std::size_t>(quad.domain.dim));
            quad.domain.sample_into(rng, x1);
            RunOptions opts;
            opts.feasibility_check_tol = 1e-8;  // checked inside the inner loop
            epoch_gd_high_prob(quad, quad.domain, x1, 0.125, 0.1, rng, opts);
        }
        return check("optimizers", "high-prob iterates stay in K and epoch ball",
                     true, "5 runs with per-iterate feasibility checks");
    }));

    out.push_back(guarded("optimizers", "identical seeds give identical traces", [&] {
        auto run_once = [&] {
            Rng rng(seed + 4000);
            Vec x1(static_cast<std::size_t>(quad.domain.dim));
            quad.domain.sample_into(rng, x1);
            return epoch_gd(quad, quad.domain, x1, 0.03125, IterateRule::average, rng);
        };
        const auto [xa, ta] = run_once();
        const auto [xb, tb] = run_once();
        bool same = xa == xb &&
                    ta.total_gradient_updates == tb.total_gradient_updates &&
                    ta.final_suboptimality == tb.final_suboptimality &&
                    ta.per_epoch.size() == tb.per_epoch.size();
        for (std::size_t i = 0; same && i < ta.per_epoch.size(); ++i) {
            const EpochRecord& a = ta.per_epoch[i];
            const EpochRecord& b = tb.per_epoch[i];
            same = a.end_point == b.end_point && a.delta_k == b.delta_k &&
                   a.avg_regret == b.avg_regret;
        }
        return check("optimizers", "identical seeds give identical traces", same,
                     "two runs compared field by field");
    }));

    out.push_back(guarded("optimizers", "budget cap under precondition", [&] {
        Rng rng(seed + 5000);
        bool ok = true;
        double worst_ratio = 0.0;
        for (int i = 0; i < 100 && ok; ++i) {
            ProblemSpec spec;
            spec.dim = 1;
            spec.M = std::exp(rng.uniform(std::log(0.5), std::log(50.0)));
            spec.G = std::exp(rng.uniform(std::log(0.5), std::log(20.0)));
            spec.lambda_hk = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
            const double eps = std::ldexp(spec.M, -static_cast<int>(1 + rng.uniform_index(10)));
            const EpochSchedule s = build_epoch_schedule(spec, eps, Variant::expectation);
            if (!s.budget_precondition_ok) continue;
            const double cap =
                20.0 * spec.G * spec.G / (spec.lambda_hk * eps);
            const double total = static_cast<double>(s.total_updates());
            worst_ratio = std::max(worst_ratio, total / cap);
            ok = total <= cap;
        }
        return check("optimizers", "budget cap under precondition", ok,
                     "max total/cap = " + fmt(worst_ratio));
    }));
}

void suite_problems(std::vector<CheckResult>& out, std::uint64_t seed) {
    const Problem quad = bundled_quadratic();
    Problem svm = bundled_toy_svm();
    append(out, check_problem_contract("problems", "quadratic", quad, 100000,
                                       20000, seed + 100));
    append(out, check_problem_contract("problems", "toy svm", svm, 100000, 20000,
                                       seed + 110));

    out.push_back(guarded("problems", "svm norm bound over 1e6 draws", [&] {
        const NormBoundReport n = check_subgradient_norms(svm, 1000000, seed + 120);
        return check("problems", "svm norm bound over 1e6 draws", n.ok,
                     "max " + fmt(n.max_norm) + " vs lambda*R_w + R_x = " +
                         fmt(n.bound));
    }));

    out.push_back(guarded("problems", "quadratic growth is an equality", [&] {
        Rng rng(seed + 130);
        Vec x(static_cast<std::size_t>(quad.domain.dim));
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            quad.domain.sample_into(rng, x);
            const double lhs = quad.value(x) - quad.optimum->value;
            const double rhs =
                quad.spec.lambda_hk * dist_sq(x, quad.optimum->point);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return check("problems", "quadratic growth is an equality",
                     worst <= 1e-12, "max |f - lambda d^2| = " + fmt(worst));
    }));
}

void suite_stats(std::vector<CheckResult>& out, std::uint64_t seed) {
    out.push_back(guarded("stats", "azuma threshold monotonicity", [&] {
        const std::vector<double> bs = {0.5, 1.0, 2.0, 4.0};
        const std::vector<long long> Ts = {1, 10, 100, 1000};
        const std::vector<double> ds = {0.3, 0.1, 0.01, 0.001};
        bool ok = true;
        for (double d : ds)
            for (long long T : Ts)
                for (std::size_t i = 1; i < bs.size(); ++i)
                    ok = ok && stats::azuma_threshold(bs[i], T, d) >
                                   stats::azuma_threshold(bs[i - 1], T, d);
        for (double b : bs)
            for (double d : ds)
                for (std::size_t i = 1; i < Ts.size(); ++i)
                    ok = ok && stats::azuma_threshold(b, Ts[i], d) >
                                   stats::azuma_threshold(b, Ts[i - 1], d);
        for (double b : bs)
            for (long long T : Ts)
                for (std::size_t i = 1; i < ds.size(); ++i)
                    ok = ok && stats::azuma_threshold(b, T, ds[i]) >
                                   stats::azuma_threshold(b, T, ds[i - 1]);
        return check("stats", "azuma threshold monotonicity", ok,
                     "grids over b, T, delta");
    }));

    out.push_back(guarded("stats", "azuma tail on Rademacher walks", [&] {
        const int N = 20000, T = 100;
        Rng rng(seed + 200);
        bool ok = true;
        std::string detail;
        for (double delta : {0.1, 0.01}) {
            std::vector<double> sums(N);
            for (int i = 0; i < N; ++i) {
                double s = 0.0;
                for (int t = 0; t < T; ++t) s += rng.uniform01() < 0.5 ? -1.0 : 1.0;
                sums[static_cast<std::size_t>(i)] = s;
            }
            const double tail = stats::empirical_tail(
                sums, stats::azuma_threshold(1.0, T, delta));
            const double cap = delta + 3.0 * std::sqrt(delta / N);
            ok = ok && tail <= cap;
            detail += "delta " + fmt(delta) + ": tail " + fmt(tail) + " <= " +
                      fmt(cap) + "; ";
        }
        return check("stats", "azuma tail on Rademacher walks", ok, detail);
    }));

    out.push_back(guarded("stats", "loglog slope recovers exact power laws", [&] {
        bool ok = true;
        for (double p : {-1.0, -0.5, 2.0}) {
            std::vector<std::pair<double, double>> pts;
            for (double x : {10.0, 100.0, 1000.0, 10000.0})
                pts.emplace_back(x, 3.7 * std::pow(x, p));
            ok = ok && std::abs(stats::fit_loglog_slope(pts) - p) <= 1e-12;
        }
        return check("stats", "loglog slope recovers exact power laws", ok,
                     "exponents -1, -0.5, 2");
    }));
}

void suite_harness(std::vector<CheckResult>& out, std::uint64_t seed) {
    ExperimentConfig c = bundled_quadratic_config();
    c.epsilon = 0.125;
    c.trials = 50;
    c.base_seed = seed + 300;
    const Problem problem = build_problem(c);

    TrialBatch batch;
    batch.config = c;
    batch.trials = run_trials_serial(c, problem);
    batch.aggregates = aggregate_trials(batch.trials, c.epsilon);

    out.push_back(guarded("harness", "csv aggregates recompute from rows", [&] {
        // re-read finals from the emitted CSV and redo the aggregate
        std::istringstream in(csv_string(batch));
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> finals(static_cast<std::size_t>(c.trials),
                                   std::numeric_limits<double>::quiet_NaN());
        std::vector<bool> seen(static_cast<std::size_t>(c.trials), false);
        while (std::getline(in, line)) {
            std::size_t start = 0;
            std::vector<std::string> cells;
            for (int q = 0; q < 8; ++q) {
                const std::size_t comma = line.find(',', start);
                cells.push_back(line.substr(start, comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            const std::size_t trial = std::stoul(cells.at(0));
            if (!seen.at(trial)) {
                finals[trial] = std::stod(cells.at(7));
                seen[trial] = true;
            }
        }
        const stats::MeanCi ci = stats::mean_ci(finals, 0.95);
        const bool ok = ci.mean == batch.aggregates.mean_final &&
                        ci.halfwidth == batch.aggregates.ci_halfwidth_final;
        return check("harness", "csv aggregates recompute from rows", ok,
                     "mean " + fmt(ci.mean) + ", halfwidth " + fmt(ci.halfwidth));
    }));

    out.push_back(guarded("harness", "reported seed replays a trial exactly", [&] {
        const TrialResult& orig = batch.trials.at(7);
        const TrialResult redo = run_single_trial(c, problem, 7);
        const bool ok =
            redo.seed == orig.seed &&
            redo.trace.final_point == orig.trace.final_point &&
            redo.trace.final_suboptimality == orig.trace.final_suboptimality &&
            redo.trace.total_gradient_updates == orig.trace.total_gradient_updates;
        return check("harness", "reported seed replays a trial exactly", ok,
                     "trial 7, seed " + std::to_string(orig.seed));
    }));

    out.push_back(guarded("harness", "serial and parallel batches agree", [&] {
        const auto par = run_trials_parallel(c, problem, 2);
        bool ok = par.size() == batch.trials.size();
        for (std::size_t i = 0; ok && i < par.size(); ++i)
            ok = par[i].seed == batch.trials[i].seed &&
                 par[i].trace.final_point == batch.trials[i].trace.final_point &&
                 par[i].trace.final_suboptimality ==
                     batch.trials[i].trace.final_suboptimality;
        return check("harness", "serial and parallel batches agree", ok,
                     "50 trials, jobs=2 vs jobs=1");
    }));
}

}  // namespace

VerdictReport run_invariant_suite(const std::string& scope, std::uint64_t seed) {
    static const std::set<std::string> known = {
        "all", "core", "projections", "optimizers", "problems", "stats",
        "harness"};
    if (!known.count(scope)) throw ConfigError("unknown scope '" + scope + "'");
    const auto want = [&](const char* m) { return scope == "all" || scope == m; };

    VerdictReport report;
    if (want("core")) suite_core(report.checks, seed);
    if (want("projections")) suite_projections(report.checks, seed + 1);
    if (want("optimizers")) suite_optimizers(report.checks, seed + 2);
    if (want("problems")) suite_problems(report.checks, seed + 3);
    if (want("stats")) suite_stats(report.checks, seed + 4);
    if (want("harness")) suite_harness(report.checks, seed + 5);
    return report;
}

}  // namespace epochgd
