#include "rdde/counterexample.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rdde/rng.hpp"

namespace rdde {

namespace {

double frequency(std::size_t n) { return (static_cast<double>(n) - 0.5) * std::numbers::pi; }

std::size_t riemann_steps(double fine_step) {
    if (!(fine_step > 0.0 && fine_step <= 1.0)) throw std::invalid_argument("fine step must lie in (0, 1]");
    return static_cast<std::size_t>(std::llround(1.0 / fine_step));
}

}  // namespace

std::vector<double> draw_coefficients(std::uint64_t seed, std::size_t n_max) {
    const CounterRng rng(seed);
    std::vector<double> z(n_max + 1, 0.0);
    for (std::size_t n = 1; n <= n_max; ++n) z[n] = rng.normal(0, static_cast<std::int64_t>(n));
    return z;
}

double kl_partial_sum(const std::vector<double>& z, std::size_t n, double t) {
    if (n >= z.size()) throw std::out_of_range("kl_partial_sum: not enough coefficients");
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += z[k] * std::sin(frequency(k) * t) / frequency(k);
    return std::numbers::sqrt2 * acc;
}

double kl_partial_sum_alternating(const std::vector<double>& z, std::size_t n, double t) {
    if (n >= z.size()) throw std::out_of_range("kl_partial_sum_alternating: not enough coefficients");
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        acc += sign * z[k] * std::sin(frequency(k) * t) / frequency(k);
    }
    return std::numbers::sqrt2 * acc;
}

double closed_form_sum(const std::vector<double>& z, std::size_t n) {
    if (n >= z.size()) throw std::out_of_range("closed_form_sum: not enough coefficients");
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += z[k] * z[k] / frequency(k);
    return acc;
}

double analytic_mean(std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += 1.0 / frequency(k);
    return acc;
}

double young_integral(const std::vector<double>& z, std::size_t n, std::size_t m, double fine_step) {
    if (m < n) throw std::invalid_argument("young_integral: need M >= N");
    const std::size_t K = riemann_steps(fine_step);
    double acc = 0.0;
    double prev_b = kl_partial_sum(z, m, 0.0), prev_bt = kl_partial_sum_alternating(z, n, -1.0);
    for (std::size_t i = 1; i <= K; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(K);
        const double b = kl_partial_sum(z, m, t), bt = kl_partial_sum_alternating(z, n, t - 1.0);
        acc += 0.5 * (prev_bt + bt) * (b - prev_b);
        prev_b = b;
        prev_bt = bt;
    }
    return acc;
}

std::vector<NoSemiflowRow> no_semiflow_table(std::size_t n_max, std::uint64_t seed, std::size_t young_max,
                                             double fine_step) {
    if (n_max < 1) throw std::invalid_argument("no-semiflow: N_max must be >= 1");
    const auto z = draw_coefficients(seed, n_max);
    const std::size_t K = riemann_steps(fine_step), cutoff = std::min(young_max, n_max);
    // Both partial sums on the Riemann grid, grown one term at a time.
    std::vector<double> b(K + 1, 0.0), bt(K + 1, 0.0);
    std::vector<NoSemiflowRow> rows;
    double s = 0.0, mean = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double a = frequency(n);
        s += z[n] * z[n] / a;
        mean += 1.0 / a;
        double young = std::numeric_limits<double>::quiet_NaN();
        if (n <= cutoff) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            for (std::size_t i = 0; i <= K; ++i) {
                const double t = static_cast<double>(i) / static_cast<double>(K);
                b[i] += std::numbers::sqrt2 * z[n] * std::sin(a * t) / a;
                bt[i] += std::numbers::sqrt2 * sign * z[n] * std::sin(a * (t - 1.0)) / a;
            }
            young = 0.0;
            for (std::size_t i = 1; i <= K; ++i) young += 0.5 * (bt[i - 1] + bt[i]) * (b[i] - b[i - 1]);
        }
        rows.push_back({n, s, young, mean});
    }
    return rows;
}

std::vector<double> sample_s_n(std::size_t n, std::uint64_t first_seed, std::size_t seeds) {
    std::vector<double> out(seeds);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(seeds); ++i)
        out[static_cast<std::size_t>(i)] =
            closed_form_sum(draw_coefficients(first_seed + static_cast<std::uint64_t>(i), n), n);
    return out;
}

}  // namespace rdde
