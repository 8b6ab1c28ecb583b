#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "epochgd/rng.hpp"
#include "epochgd/vec.hpp"

namespace epochgd {

// Constants of the optimization problem: dimension, value-range bound M,
// stochastic subgradient norm bound G, and the quadratic-growth constant
// lambda_hk in f(x) - f(x*) >= lambda_hk * ||x - x*||^2.
struct ProblemSpec {
    int dim = 0;
    double M = 0.0;
    double G = 0.0;
    double lambda_hk = 0.0;
};

// Throws NonPositiveConstant / ZeroDimension; returns its argument unchanged.
ProblemSpec validate_problem(const ProblemSpec& spec);

// Quadratic-growth constant implied by the standard strong-convexity
// definition f(y) >= f(x) + g.(y-x) + (mu/2)||y-x||^2, namely mu/2.
double lambda_hk_from_standard_strong_convexity(double mu);

enum class DomainKind { whole_space, ball, box, simplex, intersection_ball };

// A feasible set K with an exact Euclidean projection. project_into and
// sample_into are the allocation-free forms used on hot paths; sample_into
// is verification-only. Instances hold no mutable state and are safe for
// concurrent use.
struct Domain {
    DomainKind kind = DomainKind::whole_space;
    int dim = 0;
    std::string description;
    std::function<void(const Vec&, Vec&)> project_into;
    std::function<bool(const Vec&, double)> contains;
    std::function<void(Rng&, Vec&)> sample_into;

    Vec project(const Vec& y) const {
        Vec out;
        project_into(y, out);
        return out;
    }
    Vec sample(Rng& rng) const {
        Vec out(static_cast<std::size_t>(dim));
        sample_into(rng, out);
        return out;
    }
};

struct Optimum {
    Vec point;
    double value = 0.0;
};

// Oracle bundle. value and subgradient are verification-only; the optimizer
// consumes only stochastic_subgradient_into and Domain::project_into.
struct Problem {
    ProblemSpec spec;
    Domain domain;
    std::function<double(const Vec&)> value;
    std::function<void(const Vec&, Vec&)> subgradient_into;
    std::function<void(const Vec&, Rng&, Vec&)> stochastic_subgradient_into;
    std::optional<Optimum> optimum;

    Vec subgradient(const Vec& x) const {
        Vec g;
        subgradient_into(x, g);
        return g;
    }
    Vec stochastic_subgradient(const Vec& x, Rng& rng) const {
        Vec g;
        stochastic_subgradient_into(x, rng, g);
        return g;
    }
};

struct GrowthReport {
    double min_slack = 0.0;  // min over samples of f(x) - f* - lambda*||x - x*||^2
    bool violated = false;   // min_slack < -1e-9
    int samples = 0;
};

// Samples points in K and checks the quadratic-growth inequality against the
// recorded optimum. Throws MissingOptimum.
GrowthReport check_growth_condition(const Problem& problem, int samples,
                                    std::uint64_t seed);

struct UnbiasednessReport {
    Vec mean_error;      // componentwise |mean(g_hat) - g|
    Vec sigma_hat;       // componentwise sample sd of g_hat
    double max_z = 0.0;  // max over components of error / (sigma/sqrt(N)), 0 if sd == 0
    int samples = 0;
    bool ok = false;     // every component within 5 sigma_hat/sqrt(N) (1e-12 abs floor)
};

// Monte-Carlo check that the stochastic oracle is unbiased at a fixed point.
UnbiasednessReport check_unbiasedness(const Problem& problem, const Vec& x,
                                      int samples, std::uint64_t seed);

struct NormBoundReport {
    double max_norm = 0.0;
    double bound = 0.0;
    bool ok = false;
    int draws = 0;
};

// Draws stochastic subgradients at sampled feasible points and verifies the
// hard bound ||g_hat|| <= G.
NormBoundReport check_subgradient_norms(const Problem& problem, int draws,
                                        std::uint64_t seed);

}  // namespace epochgd
