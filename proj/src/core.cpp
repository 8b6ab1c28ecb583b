#include "epochgd/core.hpp"

#include <algorithm>
#include <cmath>

#include "epochgd/errors.hpp"

namespace epochgd {

ProblemSpec validate_problem(const ProblemSpec& spec) {
    if (spec.dim < 1) throw ZeroDimension();
    if (!(spec.M > 0.0)) throw NonPositiveConstant("M");
    if (!(spec.G > 0.0)) throw NonPositiveConstant("G");
    if (!(spec.lambda_hk > 0.0)) throw NonPositiveConstant("lambda_hk");
    return spec;
}

double lambda_hk_from_standard_strong_convexity(double mu) {
    if (!(mu > 0.0)) throw NonPositiveConstant("mu");
    return mu / 2.0;
}

GrowthReport check_growth_condition(const Problem& problem, int samples,
                                    std::uint64_t seed) {
    if (!problem.optimum) throw MissingOptimum();
    if (samples < 1) throw NonPositiveConstant("samples");

    const Vec& x_star = problem.optimum->point;
    const double f_star = problem.optimum->value;
    const double lambda = problem.spec.lambda_hk;

    Rng rng(seed);
    Vec x(static_cast<std::size_t>(problem.domain.dim));
    GrowthReport report;
    report.samples = samples;
    report.min_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        problem.domain.sample_into(rng, x);
        const double slack =
            (problem.value(x) - f_star) - lambda * dist_sq(x, x_star);
        report.min_slack = std::min(report.min_slack, slack);
    }
    report.violated = report.min_slack < -1e-9;
    return report;
}

UnbiasednessReport check_unbiasedness(const Problem& problem, const Vec& x,
                                      int samples, std::uint64_t seed) {
    if (samples < 2) throw InsufficientPoints("unbiasedness check needs >= 2 samples");

    const std::size_t d = x.size();
    Rng rng(seed);
    Vec g(d), sum(d, 0.0), sum_sq(d, 0.0);
    for (int i = 0; i < samples; ++i) {
        problem.stochastic_subgradient_into(x, rng, g);
        for (std::size_t j = 0; j < d; ++j) {
            sum[j] += g[j];
            sum_sq[j] += g[j] * g[j];
        }
    }

    const Vec exact = problem.subgradient(x);
    const double n = static_cast<double>(samples);

    UnbiasednessReport report;
    report.samples = samples;
    report.mean_error.resize(d);
    report.sigma_hat.resize(d);
    report.ok = true;
    for (std::size_t j = 0; j < d; ++j) {
        const double mean = sum[j] / n;
        const double var = std::max(0.0, (sum_sq[j] - n * mean * mean) / (n - 1.0));
        const double sd = std::sqrt(var);
        const double err = std::abs(mean - exact[j]);
        report.mean_error[j] = err;
        report.sigma_hat[j] = sd;
        if (sd > 0.0) {
            const double z = err / (sd / std::sqrt(n));
            report.max_z = std::max(report.max_z, z);
            if (z > 5.0) report.ok = false;
        } else if (err > 1e-12) {
            report.ok = false;
        }
    }
    return report;
}

NormBoundReport check_subgradient_norms(const Problem& problem, int draws,
                                        std::uint64_t seed) {
    if (draws < 1) throw NonPositiveConstant("draws");

    Rng rng(seed);
    Vec x(static_cast<std::size_t>(problem.domain.dim));
    Vec g(x.size());
    NormBoundReport report;
    report.draws = draws;
    report.bound = problem.spec.G;
    for (int i = 0; i < draws; ++i) {
        problem.domain.sample_into(rng, x);
        problem.stochastic_subgradient_into(x, rng, g);
        report.max_norm = std::max(report.max_norm, norm(g));
    }
    report.ok = report.max_norm <= report.bound * (1.0 + 1e-12) + 1e-12;
    return report;
}

}  // namespace epochgd
