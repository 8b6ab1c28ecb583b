#pragma once

#include <string>
#include <vector>

#include "epochgd/core.hpp"

namespace epochgd {

// Synthetic strongly convex quadratic f(x) = a ||x - x*||^2 on a ball,
// with truncated spherical gradient noise so ||g_hat|| <= G holds literally.
struct QuadraticConfig {
    int dim = 1;
    double a = 1.0;
    Vec x_star;                 // planted optimum; empty means the origin
    double noise_sigma = 0.0;   // per-component sd of the additive noise
    double noise_cap = 0.0;     // hard bound on ||zeta||; required when sigma > 0
    double domain_radius = 1.0; // K = ball(domain_center, domain_radius)
    Vec domain_center;          // empty means the origin
    double M = 0.0;             // 0: use a (2R)^2; otherwise must be >= it
    double G = 0.0;             // 0: use 2a(2R) + noise_cap; otherwise must be >= it
};

Problem make_quadratic(const QuadraticConfig& config);

struct SparseRow {
    std::vector<int> index;    // 0-based, strictly increasing
    std::vector<double> value;
};

struct Dataset {
    int m = 0;    // example count
    int dim = 0;  // max feature index
    std::vector<SparseRow> rows;
    std::vector<int> labels;  // +1 / -1
};

// libsvm text format: "<label> <index>:<value> ...", 1-based indices,
// '#' starts a comment. Labels +1/-1 accepted as-is; 0/1 map to -1/+1.
Dataset load_libsvm(const std::string& path);
Dataset parse_libsvm(std::istream& in);

// Four separable points whose regularized hinge optimum has a closed form:
// with lambda_reg = 1 all margins at the optimum are strictly below one, so
// w* = (1/4) sum y_i x_i = (0.5, 0.5) and F* = 0.75.
Dataset make_toy_separable();

// Regularized hinge loss F(w) = (lambda_reg/2)||w||^2 + (1/m) sum hinge_i on
// K = ball(0, R_w); lambda_hk = lambda_reg/2, G = lambda_reg R_w + R_x.
Problem make_svm(const Dataset& dataset, double lambda_reg, double R_w);

struct ReferenceResult {
    Vec x;
    double f = 0.0;
    double certified_gap = 0.0;
    long long iterations = 0;
};

// Deterministic full-batch projected subgradient with decaying steps
// 1/(mu t), mu = 2 lambda_hk, and uniform iterate averaging.
ReferenceResult solve_reference(const Problem& problem, long long iterations);

// Picks the smallest budget whose certificate G^2 (1 + ln T) / (2 mu T)
// meets tol, runs solve_reference, and installs the result as
// problem.optimum when none is recorded. Throws ToleranceNotCertified when
// the budget cap is insufficient.
ReferenceResult reference_optimum(Problem& problem, double tol,
                                  long long max_budget = 50'000'000);

}  // namespace epochgd
