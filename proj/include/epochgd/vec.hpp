#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "epochgd/errors.hpp"

namespace epochgd {

using Vec = std::vector<double>;

inline void require_same_dim(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
}

inline double dot(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline double dist_sq(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist_sq(a, b)); }

}  // namespace epochgd
