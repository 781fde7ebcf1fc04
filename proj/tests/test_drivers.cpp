#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>

#include "rdde/drivers.hpp"

using namespace rdde;

namespace {

DriverConfig small_config(std::uint64_t seed, std::size_t dim = 1) {
    DriverConfig c;
    c.dim = dim;
    c.delay_steps = 2;
    c.refine = 4;
    c.segments = 1;
    c.seed = seed;
    return c;
}

bool same_bytes(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_driver(const DelayedRoughPath& a, const DelayedRoughPath& b) {
    return same_bytes(a.data()->x, b.data()->x) && same_bytes(a.data()->area, b.data()->area) &&
           same_bytes(a.data()->delayed_area, b.data()->delayed_area);
}

}  // namespace

TEST_CASE("Brownian sampling") {
    const std::size_t seeds = 10000;
    std::vector<double> b1(seeds), first(seeds), second(seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
        const auto c = small_config(s);
        const auto path = sample_brownian(c);
        const std::size_t zero = c.fine_delay_steps(), half = c.fine_delay_steps() / 2;
        REQUIRE(path(zero) == 0.0);
        b1[s] = path(zero + c.fine_delay_steps());
        first[s] = path(zero + half);
        second[s] = b1[s] - first[s];
    }
    double mean = 0.0, var = 0.0, cov = 0.0, v1 = 0.0, v2 = 0.0;
    for (double v : b1) mean += v / seeds;
    for (double v : b1) var += (v - mean) * (v - mean) / (seeds - 1);
    CHECK(var >= 0.94);
    CHECK(var <= 1.06);
    for (std::size_t s = 0; s < seeds; ++s) {
        cov += first[s] * second[s];
        v1 += first[s] * first[s];
        v2 += second[s] * second[s];
    }
    CHECK(std::abs(cov / std::sqrt(v1 * v2)) < 0.05);
}

TEST_CASE("history padding never changes the common values") {
    const auto c = small_config(3);
    const auto a = sample_brownian(c), b = sample_brownian(c, 5);
    for (std::size_t i = 0; i < a.grid.n_points; ++i) CHECK(a(i) == b(i + 5));
}

TEST_CASE("Ito lift diagonal against the Ito formula") {
    DriverConfig c = small_config(11, 2);
    c.delay_steps = 8;
    c.refine = 256;
    const auto drp = lift_ito(c);
    const double tol = 5.0 * std::pow(c.fine_h(), 0.4);
    for (std::size_t s = 0; s + 4 < drp.n_points(); s += 3) {
        const auto A = reconstruct_area(drp, s, s + 4);
        for (std::size_t i = 0; i < 2; ++i) {
            const double db = drp.x(s + 4)[i] - drp.x(s)[i];
            CHECK(std::abs(A(i, i) - (db * db / 2 - 4 * drp.grid().h / 2)) < tol);
        }
    }
}

TEST_CASE("Ito lift of the deterministic path t") {
    const TimeGrid fine = build_grid(-1.0, 64, 2, 1.0 / 64);
    SampledPath p = sample_function(fine, 1, [](double t, double* v) { v[0] = t; });
    DriverConfig c;
    c.delay_steps = 8;
    c.refine = 8;
    c.segments = 1;
    const auto drp = lift_ito(p, c);
    const double h = drp.grid().h;
    // Left-point sums of (u - s) du over 8 sub-steps: h^2/2 - h hf/2.
    for (std::size_t j = 0; j < 16; ++j) CHECK(drp.step_area(j)[0] == doctest::Approx(h * h / 2 - h * c.fine_h() / 2));
}

TEST_CASE("delayed Ito area has mean zero") {
    const std::size_t seeds = 10000;
    std::vector<double> v(seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
        const auto drp = lift_ito(small_config(50000 + s));
        v[s] = drp.step_delayed_area(2)[0];
    }
    double mean = 0.0, var = 0.0;
    for (double x : v) mean += x / seeds;
    for (double x : v) var += (x - mean) * (x - mean) / (seeds - 1);
    CHECK(std::abs(mean) < 3.0 * std::sqrt(var / seeds));
}

TEST_CASE("Stratonovich correction") {
    DriverConfig c = small_config(5, 2);
    c.delay_steps = 8;
    c.refine = 256;
    const auto ito = lift_ito(c);
    const auto strat = to_stratonovich(ito);
    CHECK(same_bytes(ito.data()->delayed_area, strat.data()->delayed_area));
    CHECK(ito.data()->x == strat.data()->x);
    const double h = ito.grid().h;
    for (std::size_t j = 0; j < ito.n_points() - 1; ++j)
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t l = 0; l < 2; ++l) {
                const double back = strat.step_area(j)[k * 2 + l] - (k == l ? h / 2 : 0.0);
                CHECK(back == doctest::Approx(ito.step_area(j)[k * 2 + l]).epsilon(1e-14).scale(1.0));
            }
    const double tol = 5.0 * std::pow(c.fine_h(), 0.4);
    for (std::size_t j = 0; j < strat.n_points() - 1; ++j) {
        const auto A = reconstruct_area(strat, j, j + 1);
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t l = 0; l < 2; ++l) {
                const double sym = 0.5 * (A(k, l) + A(l, k));
                const double outer = 0.5 * (strat.x(j + 1)[k] - strat.x(j)[k]) * (strat.x(j + 1)[l] - strat.x(j)[l]);
                CHECK(std::abs(sym - outer) < tol);
            }
    }
}

TEST_CASE("Ito and Stratonovich lifts differ exactly by the diagonal term") {
    DriverConfig c = small_config(6, 2);
    c.delay_steps = 8;
    const auto ito = lift_ito(c);
    const auto strat = to_stratonovich(ito);
    const double g = 0.45;
    const auto t = rough_distance_terms(ito, strat, g);
    CHECK(t.path == 0.0);
    CHECK(t.delayed_area == 0.0);
    // |(t-s)/2 I| / (t-s)^{2g} is largest on the full grid.
    const double expect = 0.5 * std::sqrt(2.0) * std::pow(ito.grid().length(), 1.0 - 2.0 * g);
    CHECK(t.area == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("mollifier kernel") {
    const double c = mollifier_normalization();
    CHECK(mollifier_density(0.0, c) == 0.0);
    CHECK(mollifier_density(1.0, c) == 0.0);
    CHECK(mollifier_density(1.5, c) == 0.0);
    // Composite Simpson on a fine grid.
    const std::size_t n = 20000;
    double integral = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double z = static_cast<double>(i) / n, w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += w * mollifier_density(z, c);
    }
    CHECK(std::abs(integral / (3.0 * n) - 1.0) < 1e-8);
    const auto k = make_mollifier(40);
    double total = 0.0;
    for (double w : k.weights) {
        CHECK(w >= 0.0);
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    for (double r : k.density) CHECK(r >= 0.0);
    CHECK_THROWS_AS(snap_epsilon(1e-4, 1e-3), std::invalid_argument);
    CHECK(snap_epsilon(0.0101, 1e-3).steps == 10);
}

TEST_CASE("mollify constant and linear paths") {
    const TimeGrid g = build_grid(-1.0, 1000, 2, 1e-3);
    const auto constant = mollify(sample_function(g, 1, [](double, double* v) { v[0] = 2.5; }), 0.1);
    for (double v : constant.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
    const auto linear = mollify(sample_function(g, 1, [](double t, double* v) { v[0] = t; }), 0.1);
    // The bump is symmetric about 1/2, so int z rho(z) dz = 1/2.
    for (std::size_t i = 0; i < linear.grid.n_points; i += 97)
        CHECK(std::abs(linear(i) - (linear.grid.time(static_cast<std::ptrdiff_t>(i)) - 0.05)) < 1e-8);
}

TEST_CASE("mollified path approaches the Brownian path") {
    DriverConfig c = small_config(8);
    c.delay_steps = 16;
    c.refine = 64;
    const std::size_t pad = 512;
    const auto b = sample_brownian(c, pad);
    double previous = INFINITY;
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto m = mollify(b, eps);
        const std::size_t shift = b.grid.n_points - m.grid.n_points;
        double gap = 0.0;
        for (std::size_t i = pad; i < m.grid.n_points; ++i) gap = std::max(gap, std::abs(m(i) - b(i + shift)));
        CHECK(gap < previous);
        previous = gap;
    }
}

TEST_CASE("piecewise-linear lift") {
    const TimeGrid g = build_grid(-1.0, 40, 3, 1.0 / 40);
    SampledPath lin = sample_function(g, 1, [](double t, double* v) { v[0] = t; });
    const auto a = lift_piecewise_linear(lin, 8);
    const double h = a.grid().h;
    for (std::size_t j = 0; j + 1 < a.n_points(); ++j) CHECK(a.step_area(j)[0] == doctest::Approx(h * h / 2).epsilon(1e-12));

    std::mt19937_64 gen(2);
    std::normal_distribution<double> n01;
    SampledPath rnd(g, 2);
    for (std::size_t i = 1; i < g.n_points; ++i)
        for (std::size_t c = 0; c < 2; ++c) rnd.at(i)[c] = rnd.at(i - 1)[c] + 0.2 * n01(gen);
    const auto b = lift_piecewise_linear(rnd, 8);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> pick(0, b.n_points() - 1);
        std::size_t s = pick(gen), t = pick(gen);
        if (s > t) std::swap(s, t);
        const auto A = reconstruct_area(b, s, t);
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t l = 0; l < 2; ++l) {
                const double outer = 0.5 * (b.x(t)[k] - b.x(s)[k]) * (b.x(t)[l] - b.x(s)[l]);
                CHECK(std::abs(0.5 * (A(k, l) + A(l, k)) - outer) <= 1e-12 * (1.0 + std::abs(outer)));
            }
    }
}

TEST_CASE("delayed area of the mollified lift equals the kernel-averaged integral against B") {
    DriverConfig c = small_config(21);
    c.delay_steps = 8;
    c.refine = 32;
    c.segments = 2;
    c.kind = DriverKind::mollified;
    c.epsilon = 0.1;
    const auto snapped = snap_epsilon(c.epsilon, c.fine_h());
    const std::size_t E = snapped.steps, pad = E, R = c.refine, M = c.fine_delay_steps();
    const auto b = sample_brownian(c, pad);
    const auto drp = lift_mollified(b, c);
    const auto kernel = make_mollifier(E);
    auto beps = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t q = 0; q <= E; ++q) acc += kernel.weights[q] * b(k - q);
        return acc;
    };
    for (auto [cs, ct] : {std::pair<std::size_t, std::size_t>{8, 12}, {10, 20}, {16, 24}}) {
        const std::size_t S = pad + cs * R, T = pad + ct * R;
        double rhs = 0.0;
        for (std::size_t q = 0; q <= E; ++q) {
            double inner = 0.0;
            for (std::size_t u = S - q; u < T - q; ++u)
                inner += 0.5 * (beps(u + q - M) + beps(u + q + 1 - M) - 2.0 * beps(S - M)) * (b(u + 1) - b(u));
            rhs += kernel.weights[q] * inner;
        }
        const double lhs = reconstruct_delayed_area(drp, cs, ct)(0, 0);
        CHECK(std::abs(lhs - rhs) < 1e-4);
    }
}

TEST_CASE("homogeneous distance and dilation") {
    DriverConfig c = small_config(31, 2);
    c.delay_steps = 8;
    const auto x = lift_ito(c);
    CHECK(homogeneous_distance(x, x, 0.45) == 0.0);
    const auto zero = dilate(x, 0.0);
    const double base = homogeneous_distance(x, zero, 0.45);
    CHECK(homogeneous_distance(dilate(x, 3.0), zero, 0.45) == doctest::Approx(3.0 * base).epsilon(1e-12));
    DriverConfig other = c;
    other.delay_steps = 4;
    CHECK_THROWS_AS(homogeneous_distance(x, lift_ito(other), 0.45), std::invalid_argument);
}

TEST_CASE("shift_driver") {
    DriverConfig c = small_config(41, 2);
    c.delay_steps = 4;
    c.segments = 5;
    const auto drp = lift_ito(c);
    const auto same = shift_driver(drp, 0);
    CHECK(same.offset() == drp.offset());
    CHECK(same.n_points() == drp.n_points());
    const auto two_three = shift_driver(shift_driver(drp, 2), 3);
    const auto five = shift_driver(drp, 5);
    CHECK(two_three.offset() == five.offset());
    CHECK(two_three.n_points() == five.n_points());
    const auto two = shift_driver(drp, 2);
    CHECK((reconstruct_area(two, 3, 9) - reconstruct_area(drp, 11, 17)).norm() == 0.0);
    CHECK((reconstruct_delayed_area(two, 5, 9) - reconstruct_delayed_area(drp, 13, 17)).norm() == 0.0);
    CHECK_THROWS(shift_driver(drp, 6));
}

TEST_CASE("drivers are bit-identical across thread counts") {
    DriverConfig c = small_config(77, 3);
    c.delay_steps = 16;
    c.refine = 64;
    c.segments = 3;
    const int saved = omp_get_max_threads();
    for (auto kind : {DriverKind::ito, DriverKind::stratonovich, DriverKind::mollified}) {
        c.kind = kind;
        c.epsilon = 0.05;
        omp_set_num_threads(1);
        const auto one = build_driver(c);
        omp_set_num_threads(4);
        const auto four = build_driver(c);
        CHECK(same_driver(one, four));
    }
    omp_set_num_threads(saved);
}

TEST_CASE("every driver kind passes Chen at random split points") {
    DriverConfig c = small_config(88, 2);
    c.delay_steps = 8;
    c.refine = 16;
    c.segments = 2;
    c.epsilon = 0.05;
    std::mt19937_64 gen(9);
    for (auto kind : {DriverKind::ito, DriverKind::stratonovich, DriverKind::mollified}) {
        c.kind = kind;
        const auto drp = build_driver(c);
        std::uniform_int_distribution<std::size_t> pick(8, drp.n_points() - 1);
        for (int trial = 0; trial < 100; ++trial) {
            std::size_t v[3] = {pick(gen), pick(gen), pick(gen)};
            std::sort(v, v + 3);
            const std::size_t s = v[0], u = v[1], t = v[2];
            Eigen::Vector2d xsu, xut, lag;
            for (std::size_t j = 0; j < 2; ++j) {
                xsu(j) = drp.x(u)[j] - drp.x(s)[j];
                xut(j) = drp.x(t)[j] - drp.x(u)[j];
                lag(j) = drp.x_lagged(u)[j] - drp.x_lagged(s)[j];
            }
            const auto A = reconstruct_area(drp, s, t);
            const auto D = reconstruct_delayed_area(drp, s, t);
            CHECK((A - reconstruct_area(drp, s, u) - reconstruct_area(drp, u, t) - xsu * xut.transpose()).norm() <=
                  1e-12 * (1.0 + A.norm()));
            CHECK((D - reconstruct_delayed_area(drp, s, u) - reconstruct_delayed_area(drp, u, t) - lag * xut.transpose())
                      .norm() <= 1e-12 * (1.0 + D.norm()));
        }
    }
}

TEST_CASE("binary dump round trip") {
    DriverConfig c = small_config(99, 2);
    c.delay_steps = 4;
    c.segments = 3;
    const auto drp = shift_driver(lift_ito(c), 1);
    const auto path = (std::filesystem::temp_directory_path() / "rdde_driver_roundtrip.bin").string();
    write_driver(path, drp);
    const auto back = read_driver(path);
    std::remove(path.c_str());
    CHECK(same_driver(drp, back));
    CHECK(back.offset() == drp.offset());
    CHECK(back.n_points() == drp.n_points());
    CHECK(back.gamma() == drp.gamma());
    CHECK_THROWS(read_driver(path));
}
