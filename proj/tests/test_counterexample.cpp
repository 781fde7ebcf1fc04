#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rdde/counterexample.hpp"

using namespace rdde;

namespace {

// Left-point Riemann-Stieltjes sum written from the series directly.
double direct_integral(const std::vector<double>& z, std::size_t n, std::size_t m, std::size_t steps) {
    auto b = [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= m; ++k) {
            const double a = (static_cast<double>(k) - 0.5) * std::numbers::pi;
            acc += z[k] * std::sin(a * t) / a;
        }
        return std::sqrt(2.0) * acc;
    };
    auto bt = [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double a = (static_cast<double>(k) - 0.5) * std::numbers::pi;
            acc += (k % 2 == 0 ? 1.0 : -1.0) * z[k] * std::sin(a * t) / a;
        }
        return std::sqrt(2.0) * acc;
    };
    double acc = 0.0, prev = b(0.0);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(steps);
        const double next = b(static_cast<double>(i + 1) / static_cast<double>(steps));
        acc += bt(t - 1.0) * (next - prev);
        prev = next;
    }
    return acc;
}

}  // namespace

TEST_CASE("coefficients are deterministic per seed") {
    const auto a = draw_coefficients(3, 100), b = draw_coefficients(3, 100), c = draw_coefficients(4, 100);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.size() == 101);
    // Prefixes do not depend on n_max.
    const auto longer = draw_coefficients(3, 500);
    for (std::size_t n = 1; n <= 100; ++n) CHECK(longer[n] == a[n]);
}

TEST_CASE("Karhunen-Loeve partial sums") {
    const auto z = draw_coefficients(5, 40);
    CHECK(kl_partial_sum(z, 40, 0.0) == 0.0);
    double expect = 0.0;
    for (std::size_t n = 1; n <= 40; ++n) {
        const double a = (static_cast<double>(n) - 0.5) * std::numbers::pi;
        expect += std::sqrt(2.0) * (n % 2 == 0 ? 1.0 : -1.0) * z[n] * std::sin(a * 0.3) / a;
    }
    CHECK(kl_partial_sum_alternating(z, 40, 0.3) == doctest::Approx(expect).epsilon(1e-13));

    // Var(B^N_1) = 2 sum 1/a_n^2 -> 1.
    double var = 0.0;
    const std::size_t seeds = 4000;
    for (std::size_t s = 0; s < seeds; ++s) {
        const double v = kl_partial_sum(draw_coefficients(1000 + s, 200), 200, 1.0);
        var += v * v / seeds;
    }
    CHECK(var == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("S_N is increasing and its mean is the analytic sum") {
    const auto table = no_semiflow_table(300, 7, 5, 1e-3);
    REQUIRE(table.size() == 300);
    for (std::size_t i = 1; i < table.size(); ++i) {
        CHECK(table[i].s_n > table[i - 1].s_n);
        CHECK(table[i].analytic_mean > table[i - 1].analytic_mean);
    }
    CHECK(std::isnan(table[10].young));
    CHECK(std::isfinite(table[4].young));
    double mean = 0.0;
    for (std::size_t n = 1; n <= 300; ++n) mean += 1.0 / ((static_cast<double>(n) - 0.5) * std::numbers::pi);
    CHECK(analytic_mean(300) == doctest::Approx(mean).epsilon(1e-13));
    const auto z = draw_coefficients(7, 300);
    CHECK(closed_form_sum(z, 300) == doctest::Approx(table[299].s_n).epsilon(1e-13));

    const auto s = sample_s_n(50, 1, 1000);
    double avg = 0.0;
    for (double v : s) avg += v / 1000.0;
    CHECK(std::abs(avg - analytic_mean(50)) < 0.05 * analytic_mean(50));
    CHECK(sample_s_n(50, 1, 1000) == s);
}

TEST_CASE("Young integral identity holds for every M >= N") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto z = draw_coefficients(seed, 60);
        for (std::size_t n : {1, 5, 20}) {
            const double s = closed_form_sum(z, n);
            for (std::size_t m : {n, 2 * n, 3 * n}) {
                const double y = young_integral(z, n, m, 1e-4);
                CHECK(std::abs(y - s) / s < 1e-2);
                CHECK(y == doctest::Approx(direct_integral(z, n, m, 20000)).epsilon(1e-2));
            }
        }
        CHECK_THROWS_AS(young_integral(z, 5, 4, 1e-4), std::invalid_argument);
    }
}

TEST_CASE("table rows agree with the direct Young integral") {
    const auto table = no_semiflow_table(20, 11, 20, 1e-4);
    const auto z = draw_coefficients(11, 20);
    for (std::size_t n : {1, 7, 20}) CHECK(table[n - 1].young == doctest::Approx(young_integral(z, n, n, 1e-4)).epsilon(1e-10));
    CHECK_THROWS_AS(no_semiflow_table(0, 1), std::invalid_argument);
}
