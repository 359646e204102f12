#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "transrec/common.hpp"
#include "transrec/rng.hpp"

namespace transrec {

enum class Distance { L1, SquaredL2 };

inline std::string_view to_string(Distance d) {
    return d == Distance::L1 ? "l1" : "l2sq";
}

inline Distance distance_from_string(std::string_view s) {
    if (s == "l1") return Distance::L1;
    if (s == "l2sq") return Distance::SquaredL2;
    throw InputError("unknown distance kind: " + std::string(s));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double squared_norm(std::span<const double> v) { return dot(v, v); }

inline double norm2(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

inline double l1_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += std::fabs(x[k] - y[k]);
    return s;
}

inline double squared_l2_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

inline double distance(Distance kind, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("distance: dimension mismatch (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    return kind == Distance::L1 ? l1_distance(x, y) : squared_l2_distance(x, y);
}

// v <- v / max(1, ||v||_2). Fixes the closed unit ball, idempotent.
inline void project_to_unit_ball(std::span<double> v) {
    const double n = norm2(v);
    if (n <= 1.0) return;
    const double inv = 1.0 / n;
    for (double& x : v) x *= inv;
}

// Fills v with a uniformly-random direction of unit L2 norm
// (spherically symmetric gaussian, normalized).
inline void fill_random_unit_vector(std::span<double> v, Rng& rng) {
    double n = 0.0;
    do {
        for (double& x : v) x = rng.gaussian();
        n = norm2(v);
    } while (n < 1e-12);
    const double inv = 1.0 / n;
    for (double& x : v) x *= inv;
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// ln sigma(x), stable for |x| up to ~700: never overflows, never returns -inf
// for representable inputs.
inline double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

} // namespace transrec
