#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace testing {

inline std::vector<double> uniform_vector(std::size_t n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
    }
    return true;
}

// Central differences of f around x, one coordinate at a time.
inline std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                              std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Worst componentwise relative error of an analytic gradient against a
// finite-difference one. Components much smaller than the largest one are
// measured against floor * max|fd| instead of their own size, since their
// finite-difference value is dominated by rounding.
inline double gradient_relative_error(std::span<const double> analytic, std::span<const double> fd,
                                      double floor = 1e-3) {
    const double scale = max_abs(fd);
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        const double denom = std::max(std::abs(fd[i]), floor * scale);
        if (denom == 0.0) {
            worst = std::max(worst, std::abs(analytic[i]));
            continue;
        }
        worst = std::max(worst, std::abs(analytic[i] - fd[i]) / denom);
    }
    return worst;
}

// ||analytic - fd|| / ||fd|| in the Euclidean norm.
inline double normwise_relative_error(std::span<const double> analytic, std::span<const double> fd) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
        den += fd[i] * fd[i];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace testing
