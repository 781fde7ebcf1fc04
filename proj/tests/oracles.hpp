#pragma once

// Independent reference computations for the tests. Nothing here calls the
// solver or the lift code; only the driver sampling is shared.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "rdde/grid.hpp"

namespace oracle {

/// Euler-Maruyama for dy = (s1 y_t + s2 y_{t-r}) dB on the fine grid of b,
/// which starts at -r and has delay_steps fine steps per delay. y = xi on [-r, 0].
inline std::vector<double> euler_maruyama(const rdde::SampledPath& b, double s1, double s2,
                                          const std::function<double(double)>& xi) {
    const std::size_t M = b.grid.delay_steps, n = b.grid.n_points;
    std::vector<double> y(n);
    for (std::size_t i = 0; i <= M; ++i) y[i] = xi(b.grid.time(static_cast<std::ptrdiff_t>(i)));
    for (std::size_t i = M; i + 1 < n; ++i) y[i + 1] = y[i] + (s1 * y[i] + s2 * y[i - M]) * (b(i + 1) - b(i));
    return y;
}

/// Naive double loop for max_{s<t} |f(s,t)| / ((t-s) h)^e.
template <class F>
double naive_pair_sup(std::size_t n, double h, double e, F&& f) {
    double best = 0.0;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = s + 1; t < n; ++t)
            best = std::max(best, f(s, t) / std::pow(static_cast<double>(t - s) * h, e));
    return best;
}

/// Minimum of g over a uniform grid of coefficient pairs in [-R, R]^2 (or [-R, R] for one).
inline double grid_search_min(std::size_t dims, double R, std::size_t points,
                              const std::function<double(const double*)>& g) {
    double best = std::numeric_limits<double>::infinity();
    double c[2] = {0.0, 0.0};
    const double step = 2.0 * R / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        c[0] = -R + static_cast<double>(i) * step;
        if (dims == 1) {
            best = std::min(best, g(c));
            continue;
        }
        for (std::size_t j = 0; j < points; ++j) {
            c[1] = -R + static_cast<double>(j) * step;
            best = std::min(best, g(c));
        }
    }
    return best;
}

/// Riemann-Stieltjes sums of int f dg over an explicit fine partition.
inline double riemann_stieltjes(const std::vector<double>& f, const std::vector<double>& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) acc += f[i] * (g[i + 1] - g[i]);
    return acc;
}

/// Spearman rank correlation.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace oracle
