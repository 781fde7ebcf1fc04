#pragma once

// Fourier construction showing that the delay integral is not continuous on
// the space of continuous segments: with B^N the Karhunen-Loeve partial sum of
// Brownian motion on [0,1] and B~^N the same sum with coefficients (-1)^n Z_n,
//   int_0^1 B~^N_{t-1} dB^M_t = S_N = sum_{n<=N} Z_n^2 / ((n-1/2) pi)   for all M >= N,
// while B~^N converges uniformly and S_N diverges.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rdde {

/// Z_1..Z_N (index 0 unused) for a seed.
std::vector<double> draw_coefficients(std::uint64_t seed, std::size_t n_max);

/// sqrt(2) sum_{n<=N} Z_n sin(a_n t) / a_n with a_n = (n - 1/2) pi.
double kl_partial_sum(const std::vector<double>& z, std::size_t n, double t);
/// Same with Z~_n = (-1)^n Z_n.
double kl_partial_sum_alternating(const std::vector<double>& z, std::size_t n, double t);

/// S_N = sum_{n<=N} Z_n^2 / a_n.
double closed_form_sum(const std::vector<double>& z, std::size_t n);

/// E S_N = sum_{n<=N} 1 / a_n.
double analytic_mean(std::size_t n);

/// int_0^1 B~^N_{t-1} dB^M_t by trapezoidal Riemann-Stieltjes sums with the given step.
double young_integral(const std::vector<double>& z, std::size_t n, std::size_t m, double fine_step);

struct NoSemiflowRow {
    std::size_t n = 0;
    double s_n = 0.0;
    double young = 0.0;  // NaN above the Riemann-sum cutoff
    double analytic_mean = 0.0;
};

/// Rows N = 1..n_max for one seed, with M = N in the Young integral for N <= young_max.
std::vector<NoSemiflowRow> no_semiflow_table(std::size_t n_max, std::uint64_t seed, std::size_t young_max = 50,
                                             double fine_step = 1e-4);

/// S_N at the requested N for each seed in [first_seed, first_seed + seeds).
std::vector<double> sample_s_n(std::size_t n, std::uint64_t first_seed, std::size_t seeds);

}  // namespace rdde
