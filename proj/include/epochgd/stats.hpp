#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace epochgd::stats {

// Azuma bound for a martingale difference sequence with |X_t| <= b:
// Pr[sum X_t >= sqrt(2 b^2 T ln(1/delta))] <= delta.
double azuma_threshold(double b, long long T, double delta);

// Fraction of trial sums at or above the threshold.
double empirical_tail(const std::vector<double>& trial_sums, double threshold);

// Least-squares slope of log(err) against log(n).
double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct MeanCi {
    double mean = 0.0;
    double halfwidth = 0.0;
};

// Sample mean with normal-approximation halfwidth z * s / sqrt(n).
MeanCi mean_ci(const std::vector<double>& samples, double confidence);

// Inverse standard normal CDF, refined to near machine precision.
double normal_quantile(double p);

}  // namespace epochgd::stats
