#include "rdde/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdde/lyapunov.hpp"
#include "rdde/rng.hpp"

namespace rdde {

namespace {

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double rel(double diff, double scale) { return diff / std::max(scale, std::numeric_limits<double>::min()); }

/// |a - b| / max(|a|, |b|) over values and Gubinelli derivatives.
double segment_residual(const Segment& a, const Segment& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    auto acc = [&](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            diff += (x[i] - y[i]) * (x[i] - y[i]);
            na += x[i] * x[i];
            nb += y[i] * y[i];
        }
    };
    acc(a.values, b.values);
    acc(a.gubinelli, b.gubinelli);
    return rel(std::sqrt(diff), std::max(std::sqrt(na), std::sqrt(nb)));
}

DriverConfig instance_config(const DriverConfig& base, std::uint64_t seed) {
    DriverConfig c = base;
    c.seed = seed;
    c.kind = DriverKind::ito;
    return c;
}

/// Sorted distinct triple in [lo, hi].
void random_triple(const CounterRng& rng, std::uint64_t stream, std::size_t lo, std::size_t hi, std::size_t& s,
                   std::size_t& u, std::size_t& t) {
    const std::size_t span = hi - lo + 1;
    auto pick = [&](std::int64_t c) { return lo + static_cast<std::size_t>(rng.uniform(stream, c) * static_cast<double>(span)); };
    s = pick(0);
    u = pick(1);
    t = pick(2);
    std::size_t v[3] = {s, u, t};
    std::sort(v, v + 3);
    s = v[0];
    u = v[1];
    t = v[2];
    if (u == s) u = std::min(s + 1, hi);
    if (t <= u) t = std::min(u + 1, hi);
    if (u == t) u = s + (t - s) / 2;
}

CheckResult chen_impl(const DriverConfig& base, std::size_t instances, std::uint64_t seed, bool delayed) {
    CheckResult out;
    out.name = delayed ? "delayed_chen" : "chen";
    out.threshold = 1e-10;
    out.structural = true;
    const CounterRng rng(seed);
    std::vector<double> worst(instances, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(instances); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        DriverConfig c = instance_config(base, seed + i);
        c.dim = std::max<std::size_t>(c.dim, 2);
        const auto drp = build_driver(c);
        const std::size_t d = drp.dim(), lo = delayed ? drp.first_delayed_index() : 0;
        std::size_t s, u, t;
        random_triple(rng, i, lo, drp.n_points() - 1, s, u, t);
        const Eigen::MatrixXd full = delayed ? reconstruct_delayed_area(drp, s, t) : reconstruct_area(drp, s, t);
        const Eigen::MatrixXd left = delayed ? reconstruct_delayed_area(drp, s, u) : reconstruct_area(drp, s, u);
        const Eigen::MatrixXd right = delayed ? reconstruct_delayed_area(drp, u, t) : reconstruct_area(drp, u, t);
        Eigen::MatrixXd cross(d, d);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j) {
                const double a = delayed ? drp.x_lagged(u)[k] - drp.x_lagged(s)[k] : drp.x(u)[k] - drp.x(s)[k];
                cross(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = a * (drp.x(t)[j] - drp.x(u)[j]);
            }
        const double scale = left.norm() + right.norm() + cross.norm();
        worst[i] = rel((full - left - right - cross).norm(), scale);
    }
    out.value = *std::max_element(worst.begin(), worst.end());
    out.pass = out.value <= out.threshold;
    out.detail = std::to_string(instances) + " random split points";
    return out;
}

}  // namespace

CheckResult check_chen(const DriverConfig& base, std::size_t instances, std::uint64_t seed) {
    return chen_impl(base, instances, seed, false);
}

CheckResult check_delayed_chen(const DriverConfig& base, std::size_t instances, std::uint64_t seed) {
    return chen_impl(base, instances, seed, true);
}

CheckResult check_integral_additivity(const DriverConfig& base, std::size_t instances, std::uint64_t seed) {
    CheckResult out;
    out.name = "integral_additivity";
    out.threshold = 1e-10;
    out.structural = true;
    const CounterRng rng(seed ^ 0xadd1ULL);
    std::vector<double> worst(instances, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(instances); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto drp = build_driver(instance_config(base, seed + i));
        const std::size_t N = drp.delay_steps(), last = drp.n_points() - 1, d = drp.dim(), w = 2;
        DelayedControlledPath m(drp, IndexRange{N, last}, w * d);
        std::int64_t c = 0;
        for (auto& v : m.values) v = rng.normal(i, c++);
        for (auto& v : m.zeta0) v = rng.normal(i, c++);
        for (auto& v : m.zeta1) v = rng.normal(i, c++);
        std::size_t a, b, e;
        random_triple(rng, 1000 + i, N, last, a, b, e);
        const auto whole = delayed_rough_integral(m, drp, a, e);
        const auto first = delayed_rough_integral(m, drp, a, b);
        const auto second = delayed_rough_integral(m, drp, b, e);
        double diff = 0.0, scale = 0.0;
        for (std::size_t t = b; t <= e; ++t)
            for (std::size_t k = 0; k < w; ++k) {
                const double lhs = whole.value(t - a)[k];
                const double p = first.value(b - a)[k], q = second.value(t - b)[k];
                diff = std::max(diff, std::abs(lhs - p - q));
                scale = std::max(scale, std::abs(p) + std::abs(q));
            }
        worst[i] = rel(diff, scale);
    }
    out.value = *std::max_element(worst.begin(), worst.end());
    out.pass = out.value <= out.threshold;
    out.detail = std::to_string(instances) + " random integrands and split points";
    return out;
}

CheckResult check_cocycle(const DriverConfig& base, const DelayField& field, std::size_t instances,
                          std::uint64_t seed, const FixedPointConfig& fp) {
    CheckResult out;
    out.name = "cocycle_law";
    out.threshold = 1e-10;
    out.structural = true;
    const CounterRng rng(seed ^ 0xc0c0ULL);
    const std::size_t S = base.segments;
    if (S < 2) throw std::invalid_argument("check_cocycle: need at least two segments");
    std::vector<double> worst(instances, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(instances); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto drp = build_driver(instance_config(base, seed + i));
        const std::size_t total = 1 + static_cast<std::size_t>(rng.uniform(i, 0) * static_cast<double>(S));
        const std::size_t m = static_cast<std::size_t>(rng.uniform(i, 1) * static_cast<double>(total + 1));
        const std::size_t n = total - std::min(m, total);
        const Segment xi = random_unit_tuples(1, 1, field_w(field), drp, NormKind::m2(), seed + i)[0][0];
        const Segment direct = cocycle_apply(xi, n + m, field, drp, fp);
        const Segment mid = cocycle_apply(xi, m, field, drp, fp);
        Segment composed = cocycle_apply(mid, n, field, shift_driver(drp, m), fp);
        composed.base_index = direct.base_index;
        worst[i] = segment_residual(direct, composed);
    }
    out.value = *std::max_element(worst.begin(), worst.end());
    out.pass = out.value <= out.threshold;
    out.detail = std::to_string(instances) + " random (n, m, xi)";
    return out;
}

CheckResult check_linearity(const DriverConfig& base, const LinearDelayField& field, std::size_t instances,
                            std::uint64_t seed) {
    CheckResult out;
    out.name = "linear_superposition";
    out.threshold = 1e-10;
    out.structural = true;
    const CounterRng rng(seed ^ 0x1111ULL);
    std::vector<double> worst(instances, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(instances); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto drp = build_driver(instance_config(base, seed + i));
        const auto pair = random_unit_tuples(2, 1, field.w, drp, NormKind::m2(), seed + i)[0];
        const double a = rng.normal(i, 0), b = rng.normal(i, 1);
        const std::size_t n = base.segments;
        const DelayField f = field;
        const Segment lhs = cocycle_apply(a * pair[0] + b * pair[1], n, f, drp);
        const Segment px = cocycle_apply(pair[0], n, f, drp), py = cocycle_apply(pair[1], n, f, drp);
        const Segment rhs = a * px + b * py;
        const double scale = std::abs(a) * (norm2(px.values) + norm2(px.gubinelli)) +
                             std::abs(b) * (norm2(py.values) + norm2(py.gubinelli));
        const Segment diff = lhs - rhs;
        worst[i] = rel(norm2(diff.values) + norm2(diff.gubinelli), scale);
    }
    out.value = *std::max_element(worst.begin(), worst.end());
    out.pass = out.value <= out.threshold;
    out.detail = std::to_string(instances) + " random pairs";
    return out;
}

CheckResult check_derivative_contract(const DriverConfig& base, const DelayField& field, std::size_t instances,
                                      std::uint64_t seed, const FixedPointConfig& fp) {
    CheckResult out;
    out.name = "gubinelli_contract";
    out.threshold = 0.0;
    out.structural = true;
    const std::size_t w = field_w(field), d = field_d(field);
    std::vector<double> worst(instances, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(instances); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto drp = build_driver(instance_config(base, seed + i));
        const Segment xi = random_unit_tuples(1, 1, w, drp, NormKind::m2(), seed + i)[0][0];
        const Segment y = solve_step(xi, field, drp, fp);
        std::vector<double> expect(w * d);
        double err = 0.0;
        for (std::size_t k = 0; k < w; ++k) err = std::max(err, std::abs(y.value(0)[k] - xi.value(xi.delay_steps)[k]));
        for (std::size_t u = 0; u < y.n_points(); ++u) {
            eval_field(field, y.value(u), xi.value(u), expect.data());
            for (std::size_t q = 0; q < w * d; ++q) err = std::max(err, std::abs(y.deriv(u)[q] - expect[q]));
        }
        worst[i] = err;
    }
    out.value = *std::max_element(worst.begin(), worst.end());
    out.pass = out.value <= out.threshold;
    out.detail = "seam value and sigma(y_u, xi_u) recomputed pointwise";
    return out;
}

CheckResult check_stability(const DriverConfig& base, const DelayField& field, const Segment& xi,
                            const HoelderParams& params, std::size_t seeds, std::uint64_t seed,
                            const FixedPointConfig& fp) {
    CheckResult out;
    out.name = "stability_ratio_spread";
    out.threshold = 10.0;
    const double lambdas[] = {1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<double> spread(seeds, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(seeds); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto drp = build_driver(instance_config(base, seed + i));
        const Segment start = shift_segment(xi, 0, drp.grid());
        const Segment eta = random_unit_tuples(1, 1, xi.dim, drp, NormKind::m2(), seed + 7919 * (i + 1))[0][0];
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double lam : lambdas) {
            Segment pert = start;
            pert.axpy(lam, eta);
            const double ratio = stability_gap(start, pert, drp, drp, field, params, fp).ratio;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        spread[i] = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    }
    out.value = *std::max_element(spread.begin(), spread.end());
    out.pass = out.value < out.threshold;
    out.detail = "max/min of lhs/rhs over lambda = 1e-1..1e-4, worst of " + std::to_string(seeds) + " seeds";
    return out;
}

RegressionFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need two or more pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: abscissae are all equal");
    RegressionFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        sse += r * r;
        f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
    }
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return f;
}

CheckResult check_a_priori(const DriverConfig& base, std::size_t trials, std::uint64_t seed, double gamma,
                           double beta) {
    CheckResult out;
    out.name = "a_priori_regression_slope";
    out.threshold = 0.0;
    const CounterRng rng(seed ^ 0xa9a9ULL);
    std::vector<double> xs(trials), ys(trials);
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(trials); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        DriverConfig c = instance_config(base, seed + i);
        c.dim = 1;
        const auto drp = dilate(build_driver(c), 0.25 + 1.75 * rng.uniform(i, 0));
        // Field sizes held in a narrow band so that the driver size drives the growth.
        const DelayField field = LinearDelayField::scalar(0.5 + 0.5 * rng.uniform(i, 1), 0.5 + 0.5 * rng.uniform(i, 2));
        const Segment xi = random_unit_tuples(1, 1, 1, drp, NormKind::m2(), seed + i)[0][0];
        const Segment y = solve_step(xi, field, drp);
        const std::size_t N = drp.delay_steps();
        const double A = driver_norms(drp, IndexRange{N, 2 * N}, gamma).sum();
        xs[i] = std::pow(A, 1.0 / (gamma - beta));
        ys[i] = std::log(controlled_norm(as_controlled(y, drp), beta) / controlled_norm(as_controlled(xi, drp), beta));
    }
    bool finite = true;
    for (std::size_t i = 0; i < trials; ++i) finite = finite && std::isfinite(xs[i]) && std::isfinite(ys[i]);
    const RegressionFit fit = linear_fit(xs, ys);
    out.value = fit.slope;
    out.pass = finite && fit.slope > 0.0;
    std::ostringstream os;
    os.precision(6);
    os << trials << " trials, R^2 = " << fit.r2 << ", max |residual| = " << fit.max_abs_residual;
    out.detail = os.str();
    return out;
}

IntegralOrder integral_order(double gamma, int first_exp, int last_exp) {
    if (first_exp < 1 || last_exp < first_exp || last_exp > 10)
        throw std::invalid_argument("integral_order: need 1 <= first_exp <= last_exp <= 10");
    // Fine grid h = 2^-13 with delay 1/4; the fine-grid sum serves as the integral.
    const std::size_t N = 2048;
    const double h = std::ldexp(1.0, -13);
    TimeGrid g{-0.25, 3 * N + 1, h, N};
    const SampledPath path = sample_function(g, 2, [](double t, double* v) {
        v[0] = std::sin(3.0 * t) + 0.5 * std::cos(5.0 * t);
        v[1] = std::cos(2.0 * t) + 0.3 * std::sin(7.0 * t);
    });
    const auto drp = lift_piecewise_linear(path, N, gamma);
    const std::size_t d = 2, last = 3 * N;
    DelayedControlledPath m(drp, IndexRange{N, last}, d);
    for (std::size_t u = N; u <= last; ++u) {
        const double *x = drp.x(u), *xl = drp.x_lagged(u);
        const std::size_t i = u - N;
        for (std::size_t j = 0; j < d; ++j) {
            const double arg = x[j] + 0.5 * x[1 - j];
            m.value(i)[j] = std::sin(arg) + std::cos(xl[j]);
            m.z0(i)[j * d + j] = std::cos(arg);
            m.z0(i)[j * d + 1 - j] = 0.5 * std::cos(arg);
            m.z1(i)[j * d + j] = -std::sin(xl[j]);
        }
    }
    IntegralOrder out;
    const std::size_t starts = 8, stride = 384;
    for (int e = first_exp; e <= last_exp; ++e) {
        const std::size_t L = static_cast<std::size_t>(1) << (13 - e);
        double acc = 0.0;
        for (std::size_t k = 0; k < starts; ++k) {
            const std::size_t s = N + k * stride, t = s + L;
            const double fine = delayed_rough_integral(m, drp, s, t).value(L)[0];
            const double coarse = compensated_term(m, s - N, t - N)[0];
            acc += std::abs(fine - coarse);
        }
        out.window.push_back(static_cast<double>(L) * h);
        out.defect.push_back(acc / static_cast<double>(starts));
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < out.window.size(); ++i) {
        lx.push_back(std::log(out.window[i]));
        ly.push_back(std::log(out.defect[i]));
    }
    out.fit = linear_fit(lx, ly);
    return out;
}

CheckResult check_integral_order(double gamma) {
    const IntegralOrder io = integral_order(gamma);
    CheckResult out;
    out.name = "integral_order_slope";
    out.value = io.fit.slope;
    out.threshold = 3.0 * gamma - 0.1;
    out.pass = out.value >= out.threshold;
    std::ostringstream os;
    os.precision(6);
    os << "log-log fit over windows 2^-3..2^-9, R^2 = " << io.fit.r2;
    out.detail = os.str();
    return out;
}

std::vector<CheckResult> run_verify(const ExperimentConfig& config) {
    DriverConfig base = config.driver_config();
    base.kind = DriverKind::ito;
    base.segments = std::max<std::size_t>(base.segments, 2);
    const DelayField field = config.make_field();
    const std::size_t n = config.instances;
    const std::uint64_t seed = config.seed;
    std::vector<CheckResult> out;
    out.push_back(check_chen(base, n, seed));
    out.push_back(check_delayed_chen(base, n, seed));
    out.push_back(check_integral_additivity(base, n, seed));
    out.push_back(check_cocycle(base, field, n, seed, config.fixed_point));
    if (const auto* lin = std::get_if<LinearDelayField>(&field)) out.push_back(check_linearity(base, *lin, n, seed));
    out.push_back(check_derivative_contract(base, field, n, seed, config.fixed_point));
    out.push_back(check_stability(base, field, config.make_initial(), config.params, std::min<std::size_t>(n, 20),
                                  seed, config.fixed_point));
    out.push_back(check_a_priori(base, n, seed));
    out.push_back(check_integral_order());
    return out;
}

}  // namespace rdde
