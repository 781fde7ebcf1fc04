#include "rdde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdde/drivers.hpp"
#include "rdde/rng.hpp"

namespace rdde {

LinearDelayField::LinearDelayField(std::size_t w_, std::size_t d_)
    : w(w_), d(d_), sigma1(w_ * d_ * w_, 0.0), sigma2(w_ * d_ * w_, 0.0) {
    validate();
}

LinearDelayField LinearDelayField::scalar(double s1, double s2) {
    LinearDelayField f(1, 1);
    f.sigma1[0] = s1;
    f.sigma2[0] = s2;
    return f;
}

void LinearDelayField::validate() const {
    if (w < 1 || d < 1) throw std::invalid_argument("LinearDelayField: empty shape");
    if (sigma1.size() != w * d * w || sigma2.size() != w * d * w)
        throw std::invalid_argument("LinearDelayField: tensors must have w*d*w entries");
    for (double v : sigma1)
        if (!std::isfinite(v)) throw std::invalid_argument("LinearDelayField: non-finite entry");
    for (double v : sigma2)
        if (!std::isfinite(v)) throw std::invalid_argument("LinearDelayField: non-finite entry");
}

void LinearDelayField::eval(const double* y, const double* z, double* out) const {
    for (std::size_t r = 0; r < w * d; ++r) {
        double v = 0.0;
        for (std::size_t l = 0; l < w; ++l) v += sigma1[r * w + l] * y[l] + sigma2[r * w + l] * z[l];
        out[r] = v;
    }
}

double LinearDelayField::norm() const {
    double acc = 0.0;
    for (double v : sigma1) acc += v * v;
    for (double v : sigma2) acc += v * v;
    return std::sqrt(acc);
}

SmoothDelayField make_smooth(const LinearDelayField& f) {
    f.validate();
    SmoothDelayField s;
    s.w = f.w;
    s.d = f.d;
    s.eval = [f](const double* y, const double* z, double* out) { f.eval(y, z, out); };
    s.d1 = [f](const double*, const double*, double* out) { std::copy(f.sigma1.begin(), f.sigma1.end(), out); };
    s.d2 = [f](const double*, const double*, double* out) { std::copy(f.sigma2.begin(), f.sigma2.end(), out); };
    // Linear fields are unbounded; the derivative bound is what the estimates use.
    s.bound_sigma = INFINITY;
    s.bound_d1 = f.norm();
    s.bound_higher = 0.0;
    s.name = "linear";
    return s;
}

SmoothDelayField make_tanh_field(const LinearDelayField& f, double saturation) {
    f.validate();
    if (!(saturation > 0.0)) throw std::invalid_argument("tanh field: saturation must be positive");
    SmoothDelayField s;
    s.w = f.w;
    s.d = f.d;
    const double c = saturation;
    s.eval = [f, c](const double* y, const double* z, double* out) {
        f.eval(y, z, out);
        for (std::size_t r = 0; r < f.w * f.d; ++r) out[r] = c * std::tanh(out[r] / c);
    };
    auto partial = [f, c](const std::vector<double>& sig) {
        return [f, c, sig](const double* y, const double* z, double* out) {
            std::vector<double> lin(f.w * f.d);
            f.eval(y, z, lin.data());
            for (std::size_t r = 0; r < f.w * f.d; ++r) {
                const double sech = 1.0 / std::cosh(lin[r] / c);
                for (std::size_t l = 0; l < f.w; ++l) out[r * f.w + l] = sech * sech * sig[r * f.w + l];
            }
        };
    };
    s.d1 = partial(f.sigma1);
    s.d2 = partial(f.sigma2);
    s.bound_sigma = c * std::sqrt(static_cast<double>(f.w * f.d));
    s.bound_d1 = f.norm();
    // |d^2 tanh| <= 4/(3 sqrt 3), |d^3 tanh| <= 2, scaled by the linear map.
    s.bound_higher = 2.0 * std::pow(f.norm(), 3) / (c * c) + 0.77 * f.norm() * f.norm() / c;
    s.name = "tanh";
    return s;
}

double check_partials(const SmoothDelayField& f, std::uint64_t seed, std::size_t trials, double scale) {
    const std::size_t w = f.w, p = f.w * f.d;
    const CounterRng rng(seed);
    double worst = 0.0;
    std::vector<double> y(w), z(w), d1(p * w), d2(p * w), plus(p), minus(p);
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t l = 0; l < w; ++l) {
            y[l] = scale * rng.normal(l, static_cast<std::int64_t>(2 * t));
            z[l] = scale * rng.normal(l, static_cast<std::int64_t>(2 * t + 1));
        }
        f.d1(y.data(), z.data(), d1.data());
        f.d2(y.data(), z.data(), d2.data());
        for (int which = 0; which < 2; ++which) {
            auto& v = which == 0 ? y : z;
            const auto& an = which == 0 ? d1 : d2;
            for (std::size_t l = 0; l < w; ++l) {
                const double base = v[l], step = 1e-6 * (1.0 + std::abs(base));
                v[l] = base + step;
                f.eval(y.data(), z.data(), plus.data());
                v[l] = base - step;
                f.eval(y.data(), z.data(), minus.data());
                v[l] = base;
                double mag = 1.0;
                for (std::size_t r = 0; r < p; ++r) mag = std::max(mag, std::abs(an[r * w + l]));
                for (std::size_t r = 0; r < p; ++r) {
                    const double fd = (plus[r] - minus[r]) / (2.0 * step);
                    worst = std::max(worst, std::abs(fd - an[r * w + l]) / mag);
                }
            }
        }
    }
    return worst;
}

std::size_t field_w(const DelayField& f) {
    return std::visit([](const auto& g) { return g.w; }, f);
}

std::size_t field_d(const DelayField& f) {
    return std::visit([](const auto& g) { return g.d; }, f);
}

void eval_field(const DelayField& f, const double* y, const double* z, double* out) {
    if (const auto* lin = std::get_if<LinearDelayField>(&f)) {
        lin->eval(y, z, out);
    } else {
        std::get<SmoothDelayField>(f).eval(y, z, out);
    }
}

void FixedPointConfig::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("FixedPointConfig: tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("FixedPointConfig: max_iterations must be >= 1");
    if (min_window < 1) throw std::invalid_argument("FixedPointConfig: min_window must be >= 1");
    if (!(contraction_limit > 0.0 && contraction_limit < 1.0))
        throw std::invalid_argument("FixedPointConfig: contraction_limit must lie in (0,1)");
}

namespace {

std::size_t check_step_inputs(const Segment& xi, std::size_t w, std::size_t d, const DelayedRoughPath& drp) {
    xi.validate();
    if (xi.dim != w || xi.noise_dim != d) throw std::invalid_argument("solver: segment and field shapes differ");
    if (drp.dim() != d) throw std::invalid_argument("solver: driver dimension differs from the field");
    if (xi.delay_steps != drp.delay_steps() || xi.h != drp.grid().h)
        throw std::invalid_argument("solver: segment and driver grids differ");
    const std::size_t s = xi.base_index + xi.delay_steps;
    if (s + xi.delay_steps >= drp.n_points())
        throw std::out_of_range("solver: driver horizon ends before the next segment");
    return s;
}

bool all_zero(const Segment& xi) {
    return std::all_of(xi.values.begin(), xi.values.end(), [](double v) { return v == 0.0; }) &&
           std::all_of(xi.gubinelli.begin(), xi.gubinelli.end(), [](double v) { return v == 0.0; });
}

bool any_nonzero(const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
}

/// out[(r)*d + k] = sum_l D[r*w + l] * g[l*d + k]: contracts a partial of sigma with a Gubinelli derivative.
void contract(const double* D, const double* g, std::size_t p, std::size_t w, std::size_t d, double* out) {
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t k = 0; k < d; ++k) {
            double v = 0.0;
            for (std::size_t l = 0; l < w; ++l) v += D[r * w + l] * g[l * d + k];
            out[r * d + k] = v;
        }
}

}  // namespace

Segment solve_linear_step(const Segment& xi, const LinearDelayField& field, const DelayedRoughPath& drp) {
    field.validate();
    const std::size_t w = field.w, d = field.d, p = w * d, N = xi.delay_steps;
    const std::size_t s = check_step_inputs(xi, w, d, drp);
    Segment y(s, N, w, d, xi.h);
    if (all_zero(xi)) return y;

    std::copy_n(xi.value(N), w, y.value(0));
    std::vector<double> z0(p * d), z1(p * d);
    for (std::size_t k = 0;; ++k) {
        double* m = y.deriv(k);
        field.eval(y.value(k), xi.value(k), m);
        if (k == N) break;
        contract(field.sigma1.data(), m, p, w, d, z0.data());
        contract(field.sigma2.data(), xi.deriv(k), p, w, d, z1.data());
        const double *x0 = drp.x(s + k), *x1 = drp.x(s + k + 1), *A = drp.step_area(s + k);
        const double* D = any_nonzero(z1) ? drp.step_delayed_area(s + k) : nullptr;
        const double* yk = y.value(k);
        double* yn = y.value(k + 1);
        for (std::size_t i = 0; i < w; ++i) {
            double v = yk[i];
            for (std::size_t j = 0; j < d; ++j) {
                v += m[i * d + j] * (x1[j] - x0[j]);
                for (std::size_t q = 0; q < d; ++q) {
                    v += z0[(i * d + j) * d + q] * A[q * d + j];
                    if (D) v += z1[(i * d + j) * d + q] * D[q * d + j];
                }
            }
            yn[i] = v;
        }
    }
    return y;
}

Segment solve_nonlinear_step(const Segment& xi, const SmoothDelayField& field, const DelayedRoughPath& drp,
                             const FixedPointConfig& fp, PicardReport* report) {
    fp.validate();
    const std::size_t w = field.w, d = field.d, p = w * d, N = xi.delay_steps;
    const std::size_t s = check_step_inputs(xi, w, d, drp);
    Segment y(s, N, w, d, xi.h);
    PicardReport local;
    PicardReport& rep = report ? *report : local;
    rep = PicardReport{};
    if (all_zero(xi)) {
        std::vector<double> zero(w, 0.0), at0(p);
        field.eval(zero.data(), zero.data(), at0.data());
        if (!any_nonzero(at0)) return y;
    }

    std::copy_n(xi.value(N), w, y.value(0));
    std::vector<double> D1(p * w), D2(p * w);
    std::size_t pos = 0, len_cap = N;
    bool first_window = true;
    while (pos < N) {
        const std::size_t len = std::min(len_cap, N - pos);
        const IndexRange win{s + pos, s + pos + len};
        // Initial guess: frozen value, derivative from the field.
        ControlledPath cur(drp, win, w);
        for (std::size_t i = 0; i <= len; ++i) {
            std::copy_n(y.value(pos), w, cur.value(i));
            field.eval(cur.value(i), xi.value(pos + i), cur.deriv(i));
        }
        std::vector<double> gaps;
        bool converged = false, stalled = false;
        for (std::size_t it = 0; it < fp.max_iterations; ++it) {
            ++rep.iterations;
            DelayedControlledPath m(drp, win, p);
            for (std::size_t i = 0; i <= len; ++i) {
                const double *yi = cur.value(i), *zi = xi.value(pos + i);
                field.eval(yi, zi, m.value(i));
                field.d1(yi, zi, D1.data());
                field.d2(yi, zi, D2.data());
                contract(D1.data(), cur.deriv(i), p, w, d, m.z0(i));
                contract(D2.data(), xi.deriv(pos + i), p, w, d, m.z1(i));
            }
            ControlledPath next = delayed_rough_integral(m, drp, win.first, win.last);
            for (std::size_t i = 0; i <= len; ++i)
                for (std::size_t c = 0; c < w; ++c) next.value(i)[c] += y.value(pos)[c];
            double gap0 = 0.0;
            for (std::size_t c = 0; c < p; ++c) gap0 += std::pow(next.deriv(0)[c] - cur.deriv(0)[c], 2);
            const double gap = std::sqrt(gap0) + d2beta_distance(next, cur, fp.beta);
            gaps.push_back(gap);
            cur = std::move(next);
            if (!std::isfinite(gap)) {
                stalled = true;
                break;
            }
            if (gap < fp.tolerance) {
                converged = true;
                break;
            }
            const std::size_t g = gaps.size();
            if (g >= 2 && gaps[g - 2] > 0.0 && gap / gaps[g - 2] > fp.contraction_limit) {
                stalled = true;
                break;
            }
        }
        if (first_window) rep.first_window_gaps = gaps;
        if (!converged) {
            if (len <= fp.min_window) {
                const auto norms = driver_norms(drp, win, drp.gamma());
                std::ostringstream msg;
                msg << "Picard iteration did not contract on window [" << win.first << ", " << win.last << "] after "
                    << gaps.size() << " iterations (" << (stalled ? "contraction factor above limit" : "iteration cap")
                    << "); last gap " << (gaps.empty() ? 0.0 : gaps.back()) << "; driver norms |X| = " << norms.path
                    << ", |X2| = " << norms.area << ", |X2(-r)| = " << norms.delayed_area << "; field bounds "
                    << field.bound_sigma << ", " << field.bound_d1 << ", " << field.bound_higher;
                throw ConvergenceFailure(msg.str());
            }
            len_cap = std::max(fp.min_window, len / 2);
            ++rep.halvings;
            first_window = false;
            continue;
        }
        for (std::size_t i = 1; i <= len; ++i) std::copy_n(cur.value(i), w, y.value(pos + i));
        ++rep.windows;
        first_window = false;
        pos += len;
    }
    // The derivative is the field along the solution.
    for (std::size_t k = 0; k <= N; ++k) field.eval(y.value(k), xi.value(k), y.deriv(k));
    return y;
}

Segment solve_step(const Segment& xi, const DelayField& field, const DelayedRoughPath& drp,
                   const FixedPointConfig& fp) {
    if (const auto* lin = std::get_if<LinearDelayField>(&field)) return solve_linear_step(xi, *lin, drp);
    return solve_nonlinear_step(xi, std::get<SmoothDelayField>(field), drp, fp);
}

double compatibility_defect(const Segment& xi, const DelayField& field) {
    const std::size_t p = xi.dim * xi.noise_dim, N = xi.delay_steps;
    std::vector<double> sig(p);
    eval_field(field, xi.value(N), xi.value(0), sig.data());
    double acc = 0.0;
    for (std::size_t c = 0; c < p; ++c) acc += std::pow(xi.deriv(N)[c] - sig[c], 2);
    return std::sqrt(acc);
}

Segment semi_flow(const Segment& xi, std::size_t s, std::size_t t, const DelayField& field,
                  const DelayedRoughPath& drp, const FixedPointConfig& fp) {
    const std::size_t N = xi.delay_steps;
    if (s != xi.base_index + N) throw std::invalid_argument("semi_flow: xi must end at s");
    if (t < s) throw std::invalid_argument("semi_flow: need s <= t");
    if (t == s) return xi;
    const std::size_t lag = t - s;
    if (lag % N != 0) {
        const double defect = compatibility_defect(xi, field);
        if (defect > 1e-10) {
            std::ostringstream msg;
            msg << "semi_flow: t is off the delay lattice of s and the initial segment violates the compatibility "
                   "condition xi'_s = sigma(xi_s, xi_{s-r}) (defect "
                << defect << ")";
            throw std::invalid_argument(msg.str());
        }
    }
    const std::size_t steps = (lag + N - 1) / N;
    std::vector<Segment> chain{xi};
    for (std::size_t k = 0; k < steps; ++k) chain.push_back(solve_step(chain.back(), field, drp, fp));
    if (lag % N == 0) return chain.back();

    // Glue the window [t-r, t] from the chain; later segments own the seam points.
    Segment out(t - N, N, xi.dim, xi.noise_dim, xi.h);
    const std::size_t m = xi.dim, g = xi.dim * xi.noise_dim;
    for (std::size_t i = 0; i <= N; ++i) {
        const std::size_t idx = t - N + i;
        const Segment* src = nullptr;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            if (idx >= it->base_index && idx <= it->base_index + N) {
                src = &*it;
                break;
            }
        std::copy_n(src->value(idx - src->base_index), m, out.value(i));
        std::copy_n(src->deriv(idx - src->base_index), g, out.deriv(i));
    }
    return out;
}

Segment cocycle_apply(const Segment& xi, std::size_t n, const DelayField& field, const DelayedRoughPath& drp,
                      const FixedPointConfig& fp) {
    const std::size_t N = xi.delay_steps;
    if ((n + 1) * N >= drp.n_points()) throw std::out_of_range("cocycle_apply: horizon exhausted");
    const Segment start = shift_segment(xi, 0, drp.grid());
    return semi_flow(start, N, (n + 1) * N, field, drp, fp);
}

DriverNorms driver_norms(const DelayedRoughPath& drp, IndexRange window, double gamma) {
    const auto view = drp.view(window.first, window.count());
    const auto zero = dilate(view, 0.0);
    const auto t = rough_distance_terms(view, zero, gamma);
    return {t.path, t.area, t.delayed_area};
}

double a_priori_rhs(double xi_norm, const DriverNorms& norms, const HoelderParams& params, double r, double C) {
    params.validate();
    const double gap = params.gamma - params.beta;
    return C * (1.0 + std::pow(r, gap) * norms.path) * xi_norm * std::exp(C * std::pow(norms.sum(), 1.0 / gap));
}

StabilityGap stability_gap(const Segment& xi, const Segment& xi_tilde, const DelayedRoughPath& drp,
                           const DelayedRoughPath& drp_tilde, const DelayField& field, const HoelderParams& params,
                           const FixedPointConfig& fp) {
    if (!xi.same_shape(xi_tilde) || xi.base_index != xi_tilde.base_index)
        throw std::invalid_argument("stability_gap: segment shapes differ");
    const std::size_t N = xi.delay_steps, w = xi.dim, g = xi.dim * xi.noise_dim;
    const Segment y = solve_step(xi, field, drp, fp), yt = solve_step(xi_tilde, field, drp_tilde, fp);
    StabilityGap out;
    out.lhs = d2beta_distance(as_controlled(y, drp), as_controlled(yt, drp_tilde), params.beta);
    double a = 0.0, b = 0.0;
    for (std::size_t c = 0; c < w; ++c) a += std::pow(xi.value(0)[c] - xi_tilde.value(0)[c], 2);
    for (std::size_t c = 0; c < g; ++c) b += std::pow(xi.deriv(0)[c] - xi_tilde.deriv(0)[c], 2);
    out.rhs_factor = std::sqrt(a) + std::sqrt(b) +
                     d2beta_distance(as_controlled(xi, drp), as_controlled(xi_tilde, drp_tilde), params.beta);
    if (drp.data() != drp_tilde.data() || drp.offset() != drp_tilde.offset())
        out.rhs_factor += rho_distance(drp.view(xi.base_index, 2 * N + 1), drp_tilde.view(xi.base_index, 2 * N + 1),
                                       params.gamma);
    out.ratio = out.rhs_factor > 0.0 ? out.lhs / out.rhs_factor : 0.0;
    return out;
}

}  // namespace rdde
