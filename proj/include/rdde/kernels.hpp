#pragma once

// Hot loops in two flavours: a serial reference and an OpenMP version.
// Both visit the same pairs and reduce with max, so results agree exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <omp.h>

namespace rdde::kernels {

enum class Exec { serial, parallel, automatic };

/// Whether a kernel over `rows` rows should fan out.
bool use_parallel(Exec e, std::size_t rows);

/// inv[k] = (k*h)^(-exponent) for k >= 1; inv[0] = 0.
std::vector<double> inverse_lag_powers(std::size_t n, double h, double exponent);

template <class F>
double pair_sup_serial(std::size_t n, const std::vector<double>& inv, F&& f) {
    double best = 0.0;
    for (std::size_t s = 0; s + 1 < n; ++s)
        for (std::size_t t = s + 1; t < n; ++t) best = std::max(best, f(s, t) * inv[t - s]);
    return best;
}

template <class F>
double pair_sup_parallel(std::size_t n, const std::vector<double>& inv, F&& f) {
    double best = 0.0;
    const long long rows = static_cast<long long>(n) - 1;
#pragma omp parallel for schedule(dynamic, 8) reduction(max : best)
    for (long long s = 0; s < rows; ++s) {
        double row = 0.0;
        for (std::size_t t = static_cast<std::size_t>(s) + 1; t < n; ++t)
            row = std::max(row, f(static_cast<std::size_t>(s), t) * inv[t - static_cast<std::size_t>(s)]);
        best = std::max(best, row);
    }
    return best;
}

/// max over 0 <= s < t < n of f(s,t) / ((t-s)h)^exponent, with f >= 0.
template <class F>
double pair_sup(std::size_t n, double h, double exponent, F&& f, Exec e = Exec::automatic) {
    if (n < 2) return 0.0;
    const auto inv = inverse_lag_powers(n, h, exponent);
    return use_parallel(e, n) ? pair_sup_parallel(n, inv, f) : pair_sup_serial(n, inv, f);
}

/// Row-wise variant for quantities built incrementally along t (Chen folds).
/// make_row(s) returns a callable; calling it for t = s+1, s+2, ... in order
/// yields f(s,t) >= 0.
template <class MakeRow>
double row_sup_serial(std::size_t n, const std::vector<double>& inv, MakeRow&& make_row) {
    double best = 0.0;
    for (std::size_t s = 0; s + 1 < n; ++s) {
        auto row = make_row(s);
        for (std::size_t t = s + 1; t < n; ++t) best = std::max(best, row(t) * inv[t - s]);
    }
    return best;
}

template <class MakeRow>
double row_sup_parallel(std::size_t n, const std::vector<double>& inv, MakeRow&& make_row) {
    double best = 0.0;
    const long long rows = static_cast<long long>(n) - 1;
#pragma omp parallel for schedule(dynamic, 8) reduction(max : best)
    for (long long si = 0; si < rows; ++si) {
        const auto s = static_cast<std::size_t>(si);
        auto row = make_row(s);
        double local = 0.0;
        for (std::size_t t = s + 1; t < n; ++t) local = std::max(local, row(t) * inv[t - s]);
        best = std::max(best, local);
    }
    return best;
}

template <class MakeRow>
double row_sup(std::size_t n, double h, double exponent, MakeRow&& make_row, Exec e = Exec::automatic) {
    if (n < 2) return 0.0;
    const auto inv = inverse_lag_powers(n, h, exponent);
    return use_parallel(e, n) ? row_sup_parallel(n, inv, make_row) : row_sup_serial(n, inv, make_row);
}

/// sum over 0 <= s < t < n of f(s,t). Rows are summed independently and then
/// combined in order, so serial and parallel results are bitwise equal.
template <class F>
double pair_sum(std::size_t n, F&& f, Exec e = Exec::automatic) {
    if (n < 2) return 0.0;
    std::vector<double> rows(n - 1, 0.0);
    auto row = [&](std::size_t s) {
        double acc = 0.0;
        for (std::size_t t = s + 1; t < n; ++t) acc += f(s, t);
        rows[s] = acc;
    };
    if (use_parallel(e, n)) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long long s = 0; s < static_cast<long long>(n) - 1; ++s) row(static_cast<std::size_t>(s));
    } else {
        for (std::size_t s = 0; s + 1 < n; ++s) row(s);
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

/// Hoelder seminorm of n points of a dim-vector path (Euclidean norm).
double path_hoelder_serial(const double* x, std::size_t n, std::size_t dim, double h, double exponent);
double path_hoelder_parallel(const double* x, std::size_t n, std::size_t dim, double h, double exponent);
double path_hoelder(const double* x, std::size_t n, std::size_t dim, double h, double exponent,
                    Exec e = Exec::automatic);

/// out[i] = sum_q w[q] * x[i + E - q], E = w.size() - 1, for i in [0, n - E).
std::vector<double> convolve_serial(const double* x, std::size_t n, std::size_t dim,
                                    const std::vector<double>& w);
std::vector<double> convolve_parallel(const double* x, std::size_t n, std::size_t dim,
                                      const std::vector<double>& w);
std::vector<double> convolve(const double* x, std::size_t n, std::size_t dim,
                             const std::vector<double>& w, Exec e = Exec::automatic);

}  // namespace rdde::kernels
