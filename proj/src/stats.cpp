#include "epochgd/stats.hpp"

#include <cmath>

#include "epochgd/errors.hpp"

namespace epochgd::stats {

double azuma_threshold(double b, long long T, double delta) {
    if (b < 0.0) throw NonPositiveConstant("b");
    if (T < 1) throw NonPositiveConstant("T");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta();
    return std::sqrt(2.0 * b * b * static_cast<double>(T) * std::log(1.0 / delta));
}

double empirical_tail(const std::vector<double>& trial_sums, double threshold) {
    if (trial_sums.empty()) throw EmptyInput();
    long long hits = 0;
    for (double s : trial_sums)
        if (s >= threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(trial_sums.size());
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw InsufficientPoints("need >= 2 points for a slope");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(points.size());
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw NonPositiveValue("log-log fit needs positive coordinates");
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw InsufficientPoints("abscissae must be distinct");
    return (n * sxy - sx * sy) / denom;
}

MeanCi mean_ci(const std::vector<double>& samples, double confidence) {
    if (samples.size() < 2) throw InsufficientPoints("need >= 2 samples for a CI");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw InvalidDelta("confidence must lie in (0,1)");
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double s : samples) sum += s;
    const double mean = sum / n;
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double z = normal_quantile(0.5 * (1.0 + confidence));
    return {mean, z * sd / std::sqrt(n)};
}

namespace {

// Acklam's rational approximation for the inverse normal CDF.
double normal_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidDelta("quantile argument must lie in (0,1)");
    double x = normal_quantile_approx(p);
    // two Newton refinements against erfc-based CDF
    for (int i = 0; i < 2; ++i) {
        const double err = normal_cdf(x) - p;
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        if (pdf <= 0.0) break;
        x -= err / pdf;
    }
    return x;
}

}  // namespace epochgd::stats
