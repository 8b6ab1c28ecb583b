#include "epochgd/projections.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <utility>

#include "epochgd/errors.hpp"

namespace epochgd {

namespace {

void project_ball_into(const Vec& y, const BallSpec& ball, Vec& out) {
    require_same_dim(y, ball.center);
    const double d = dist(y, ball.center);
    out.resize(y.size());
    if (d <= ball.radius) {
        out = y;
        return;
    }
    const double scale = ball.radius / d;  // d > 0 since d > radius >= 0
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = ball.center[i] + scale * (y[i] - ball.center[i]);
}

void project_box_into(const Vec& y, const Vec& lo, const Vec& hi, Vec& out) {
    require_same_dim(y, lo);
    require_same_dim(y, hi);
    out.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = std::clamp(y[i], lo[i], hi[i]);
}

// Sort-and-threshold simplex projection; ties resolved by the cumulative-sum
// rule (largest valid support).
void project_simplex_into(const Vec& y, Vec& out) {
    const std::size_t n = y.size();
    if (n == 0) throw ZeroDimension();
    thread_local Vec sorted;
    sorted = y;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cum += sorted[j];
        const double candidate = (cum - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) tau = candidate;
    }
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(y[i] - tau, 0.0);
}

bool ball_contains(const Vec& x, const BallSpec& ball, double tol) {
    return dist(x, ball.center) <= ball.radius + tol;
}

void sample_ball_into(const BallSpec& ball, Rng& rng, Vec& out) {
    const std::size_t n = ball.center.size();
    out.resize(n);
    double nrm = 0.0;
    do {
        rng.normal_fill(out);
        nrm = norm(out);
    } while (nrm == 0.0);
    const double u = rng.uniform01();
    const double r = ball.radius * std::pow(u, 1.0 / static_cast<double>(n));
    const double scale = r / nrm;
    for (std::size_t i = 0; i < n; ++i) out[i] = ball.center[i] + scale * out[i];
}

}  // namespace

Vec project_whole_space(const Vec& y) { return y; }

Vec project_ball(const Vec& y, const BallSpec& ball) {
    Vec out;
    project_ball_into(y, ball, out);
    return out;
}

Vec project_box(const Vec& y, const Vec& lo, const Vec& hi) {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw InvalidBox(i);
    Vec out;
    project_box_into(y, lo, hi, out);
    return out;
}

Vec project_simplex(const Vec& y) {
    Vec out;
    project_simplex_into(y, out);
    return out;
}

namespace {

// Scratch buffers reused across calls; a small stack keeps nested calls
// (inner set itself an intersection) from clobbering each other.
struct DykstraScratch {
    Vec x, a, p, q, work;
};

DykstraScratch& lease_scratch(int depth) {
    thread_local std::vector<std::unique_ptr<DykstraScratch>> pool;
    while (static_cast<std::size_t>(depth) >= pool.size())
        pool.push_back(std::make_unique<DykstraScratch>());
    return *pool[static_cast<std::size_t>(depth)];
}

thread_local int dykstra_depth = 0;

}  // namespace

void project_intersection_ball_into(const Domain& inner, const BallSpec& ball,
                                    const Vec& y, Vec& out, double tol,
                                    long long max_iters) {
    if (inner.kind == DomainKind::whole_space) {
        project_ball_into(y, ball, out);
        return;
    }
    require_same_dim(y, ball.center);

    DykstraScratch& s = lease_scratch(dykstra_depth);
    ++dykstra_depth;
    Vec& x = s.x;
    Vec& a = s.a;
    Vec& p = s.p;
    Vec& q = s.q;
    Vec& work = s.work;
    x = y;
    p.assign(y.size(), 0.0);
    q.assign(y.size(), 0.0);
    work.resize(y.size());

    const double tol_sq = tol * tol;
    for (long long it = 0; it < max_iters; ++it) {
        // inner-set half cycle with correction p
        for (std::size_t i = 0; i < x.size(); ++i) work[i] = x[i] + p[i];
        inner.project_into(work, a);
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = work[i] - a[i];
        const double gap_in = dist_sq(x, a);
        // ball half cycle with correction q
        for (std::size_t i = 0; i < x.size(); ++i) work[i] = a[i] + q[i];
        project_ball_into(work, ball, x);
        for (std::size_t i = 0; i < x.size(); ++i) q[i] = work[i] - x[i];
        const double gap_ball = dist_sq(a, x);

        // Successive-iterate stopping is unreliable for Dykstra (long
        // plateaus while the corrections drift); the half-iterates agreeing
        // is equivalent to the correction increments vanishing, which does
        // certify convergence.
        if (gap_in + gap_ball < tol_sq && inner.contains(x, tol) &&
            ball_contains(x, ball, tol)) {
            out = x;
            --dykstra_depth;
            return;
        }
    }
    --dykstra_depth;
    throw NoConvergence(max_iters);
}

Vec project_intersection_ball(const Domain& inner, const BallSpec& ball,
                              const Vec& y, double tol, long long max_iters) {
    Vec out;
    project_intersection_ball_into(inner, ball, y, out, tol, max_iters);
    return out;
}

Domain make_whole_space(int dim) {
    if (dim < 1) throw ZeroDimension();
    Domain d;
    d.kind = DomainKind::whole_space;
    d.dim = dim;
    d.description = "whole-space(dim=" + std::to_string(dim) + ")";
    d.project_into = [](const Vec& y, Vec& out) { out = y; };
    d.contains = [](const Vec&, double) { return true; };
    d.sample_into = [](Rng& rng, Vec& out) { rng.normal_fill(out); };
    return d;
}

Domain make_ball_domain(BallSpec ball) {
    if (ball.center.empty()) throw ZeroDimension();
    if (ball.radius < 0.0) throw NonPositiveConstant("radius");
    Domain d;
    d.kind = DomainKind::ball;
    d.dim = static_cast<int>(ball.center.size());
    d.description = "ball(r=" + std::to_string(ball.radius) + ")";
    d.project_into = [ball](const Vec& y, Vec& out) {
        project_ball_into(y, ball, out);
    };
    d.contains = [ball](const Vec& x, double tol) {
        return ball_contains(x, ball, tol);
    };
    d.sample_into = [ball](Rng& rng, Vec& out) { sample_ball_into(ball, rng, out); };
    return d;
}

Domain make_box_domain(Vec lo, Vec hi) {
    require_same_dim(lo, hi);
    if (lo.empty()) throw ZeroDimension();
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw InvalidBox(i);
    Domain d;
    d.kind = DomainKind::box;
    d.dim = static_cast<int>(lo.size());
    d.description = "box(dim=" + std::to_string(lo.size()) + ")";
    d.project_into = [lo, hi](const Vec& y, Vec& out) {
        project_box_into(y, lo, hi, out);
    };
    d.contains = [lo, hi](const Vec& x, double tol) {
        require_same_dim(x, lo);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
        return true;
    };
    d.sample_into = [lo, hi](Rng& rng, Vec& out) {
        out.resize(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i)
            out[i] = rng.uniform(lo[i], hi[i]);
    };
    return d;
}

Domain make_simplex_domain(int dim) {
    if (dim < 1) throw ZeroDimension();
    Domain d;
    d.kind = DomainKind::simplex;
    d.dim = dim;
    d.description = "simplex(dim=" + std::to_string(dim) + ")";
    d.project_into = [](const Vec& y, Vec& out) { project_simplex_into(y, out); };
    d.contains = [](const Vec& x, double tol) {
        double sum = 0.0;
        for (double v : x) {
            if (v < -tol) return false;
            sum += v;
        }
        return std::abs(sum - 1.0) <= tol;
    };
    d.sample_into = [dim](Rng& rng, Vec& out) {
        // Dirichlet(1,...,1) via normalized exponentials
        out.resize(static_cast<std::size_t>(dim));
        double sum = 0.0;
        for (double& v : out) {
            v = -std::log(1.0 - rng.uniform01());
            sum += v;
        }
        for (double& v : out) v /= sum;
    };
    return d;
}

Domain make_intersection_ball_domain(Domain inner, BallSpec ball, double tol,
                                     long long max_iters) {
    if (static_cast<std::size_t>(inner.dim) != ball.center.size())
        throw DimensionMismatch(ball.center.size(),
                                static_cast<std::size_t>(inner.dim));
    Domain d;
    d.kind = DomainKind::intersection_ball;
    d.dim = static_cast<int>(ball.center.size());
    d.description = inner.description + " ∩ ball(r=" + std::to_string(ball.radius) + ")";
    d.project_into = [inner, ball, tol, max_iters](const Vec& y, Vec& out) {
        project_intersection_ball_into(inner, ball, y, out, tol, max_iters);
    };
    d.contains = [inner, ball](const Vec& x, double t) {
        return inner.contains(x, t) && ball_contains(x, ball, t);
    };
    d.sample_into = [inner, ball, tol, max_iters](Rng& rng, Vec& out) {
        // rejection from the ball; fall back to projecting a ball sample
        for (int attempt = 0; attempt < 10000; ++attempt) {
            sample_ball_into(ball, rng, out);
            if (inner.contains(out, 1e-12)) return;
        }
        sample_ball_into(ball, rng, out);
        Vec projected;
        project_intersection_ball_into(inner, ball, out, projected, tol, max_iters);
        out = projected;
    };
    return d;
}

}  // namespace epochgd
