#include "rdde/rough_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rdde {

namespace {

double norm2(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[i];
    return std::sqrt(acc);
}

bool any_nonzero(const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] != 0.0) return true;
    return false;
}

void check_index(const DelayedRoughPath& drp, std::size_t s, std::size_t t, const char* who) {
    if (s > t || t >= drp.n_points())
        throw std::out_of_range(std::string(who) + ": need s <= t < n_points");
}

}  // namespace

DelayedRoughPath DelayedRoughPath::from_steps(const TimeGrid& grid, std::size_t dim, std::vector<double> x,
                                              std::vector<double> area, std::vector<double> delayed_area,
                                              std::size_t first_delayed_step, double gamma) {
    grid.validate();
    if (dim == 0) throw std::invalid_argument("DelayedRoughPath: dim must be >= 1");
    const std::size_t n = grid.n_points, dd = dim * dim;
    if (x.size() != n * dim) throw std::invalid_argument("DelayedRoughPath: path size mismatch");
    if (area.size() != (n - 1) * dd) throw std::invalid_argument("DelayedRoughPath: area size mismatch");
    if (delayed_area.size() != (n - 1) * dd)
        throw std::invalid_argument("DelayedRoughPath: delayed area size mismatch");
    if (!(gamma > 1.0 / 3.0 && gamma <= 1.0)) throw std::invalid_argument("DelayedRoughPath: gamma out of range");
    first_delayed_step = std::max(first_delayed_step, grid.delay_steps);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < std::min(first_delayed_step, n - 1); ++j)
        std::fill_n(delayed_area.begin() + static_cast<std::ptrdiff_t>(j * dd), dd, nan);

    auto data = std::make_shared<RoughPathData>();
    data->grid = grid;
    data->dim = dim;
    data->x = std::move(x);
    data->area = std::move(area);
    data->delayed_area = std::move(delayed_area);
    data->first_delayed_step = first_delayed_step;
    data->gamma = gamma;

    DelayedRoughPath out;
    out.data_ = std::move(data);
    out.grid_ = grid;
    out.offset_ = 0;
    return out;
}

DelayedRoughPath DelayedRoughPath::view(std::size_t offset, std::size_t n_points) const {
    if (n_points < 2 || offset + n_points > grid_.n_points)
        throw std::out_of_range("DelayedRoughPath::view: window outside the stored grid");
    DelayedRoughPath out = *this;
    out.offset_ = offset_ + offset;
    out.grid_.t0 = data_->grid.time(static_cast<std::ptrdiff_t>(out.offset_));
    out.grid_.n_points = n_points;
    return out;
}

const double* DelayedRoughPath::step_delayed_area(std::size_t j) const {
    if (!has_delayed_step(j))
        throw InsufficientHistory("delayed area requested before the stored delay history");
    return data_->delayed_area.data() + (offset_ + j) * data_->dim * data_->dim;
}

const double* DelayedRoughPath::x_lagged(std::size_t i) const {
    if (!has_lag(i)) throw InsufficientHistory("X_{t-r} requested before the stored delay history");
    return data_->x.data() + (offset_ + i - grid_.delay_steps) * data_->dim;
}

std::size_t DelayedRoughPath::first_delayed_index() const {
    const std::size_t first = std::max(data_->first_delayed_step, grid_.delay_steps);
    return first > offset_ ? first - offset_ : 0;
}

Eigen::MatrixXd reconstruct_area(const DelayedRoughPath& drp, std::size_t s, std::size_t t) {
    check_index(drp, s, t, "reconstruct_area");
    const std::size_t d = drp.dim();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t u = s; u < t; ++u) {
        const double* a = drp.step_area(u);
        const double *xs = drp.x(s), *xu = drp.x(u), *xv = drp.x(u + 1);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j)
                acc(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) +=
                    a[k * d + j] + (xu[k] - xs[k]) * (xv[j] - xu[j]);
    }
    return acc;
}

Eigen::MatrixXd reconstruct_delayed_area(const DelayedRoughPath& drp, std::size_t s, std::size_t t) {
    check_index(drp, s, t, "reconstruct_delayed_area");
    const std::size_t d = drp.dim();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    if (s == t) return acc;
    const double* ls = drp.x_lagged(s);
    for (std::size_t u = s; u < t; ++u) {
        const double* a = drp.step_delayed_area(u);
        const double *lu = drp.x_lagged(u), *xu = drp.x(u), *xv = drp.x(u + 1);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j)
                acc(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) +=
                    a[k * d + j] + (lu[k] - ls[k]) * (xv[j] - xu[j]);
    }
    return acc;
}

ControlledPath::ControlledPath(const DelayedRoughPath& drp, IndexRange win, std::size_t w)
    : base(drp), window(win), dim(w), noise_dim(drp.dim()) {
    if (win.last < win.first || win.last >= drp.n_points())
        throw std::out_of_range("ControlledPath: window outside the driver grid");
    if (w == 0) throw std::invalid_argument("ControlledPath: dim must be >= 1");
    values.assign(win.count() * w, 0.0);
    gubinelli.assign(win.count() * w * noise_dim, 0.0);
}

DelayedControlledPath::DelayedControlledPath(const DelayedRoughPath& drp, IndexRange win, std::size_t p)
    : base(drp), window(win), dim(p), noise_dim(drp.dim()) {
    if (win.last < win.first || win.last >= drp.n_points())
        throw std::out_of_range("DelayedControlledPath: window outside the driver grid");
    if (p == 0) throw std::invalid_argument("DelayedControlledPath: dim must be >= 1");
    values.assign(win.count() * p, 0.0);
    zeta0.assign(win.count() * p * noise_dim, 0.0);
    zeta1.assign(win.count() * p * noise_dim, 0.0);
}

ControlledPath as_controlled(const Segment& seg, const DelayedRoughPath& drp) {
    if (seg.noise_dim != drp.dim()) throw std::invalid_argument("as_controlled: noise dimension mismatch");
    if (seg.h != drp.grid().h || seg.delay_steps != drp.delay_steps())
        throw std::invalid_argument("as_controlled: segment and driver grids differ");
    ControlledPath cp(drp, IndexRange{seg.base_index, seg.base_index + seg.delay_steps}, seg.dim);
    cp.values = seg.values;
    cp.gubinelli = seg.gubinelli;
    return cp;
}

Segment to_segment(const ControlledPath& cp) {
    const std::size_t n = cp.base.delay_steps();
    if (cp.window.count() != n + 1) throw std::invalid_argument("to_segment: window is not one delay long");
    Segment seg(cp.window.first, n, cp.dim, cp.noise_dim, cp.base.grid().h);
    seg.values = cp.values;
    seg.gubinelli = cp.gubinelli;
    return seg;
}

std::vector<double> remainder(const ControlledPath& cp, std::size_t s, std::size_t t) {
    const std::size_t w = cp.dim, d = cp.noise_dim, a = cp.window.first;
    std::vector<double> out(w);
    const double *xs = cp.base.x(a + s), *xt = cp.base.x(a + t), *g = cp.deriv(s);
    for (std::size_t i = 0; i < w; ++i) {
        double v = cp.value(t)[i] - cp.value(s)[i];
        for (std::size_t j = 0; j < d; ++j) v -= g[i * d + j] * (xt[j] - xs[j]);
        out[i] = v;
    }
    return out;
}

std::vector<double> remainder(const DelayedControlledPath& m, std::size_t s, std::size_t t) {
    const std::size_t p = m.dim, d = m.noise_dim, a = m.window.first;
    std::vector<double> out(p);
    const double *xs = m.base.x(a + s), *xt = m.base.x(a + t), *z0 = m.z0(s), *z1 = m.z1(s);
    const bool lagged = any_nonzero(z1, p * d);
    const double* ls = lagged ? m.base.x_lagged(a + s) : nullptr;
    const double* lt = lagged ? m.base.x_lagged(a + t) : nullptr;
    for (std::size_t i = 0; i < p; ++i) {
        double v = m.value(t)[i] - m.value(s)[i];
        for (std::size_t j = 0; j < d; ++j) {
            v -= z0[i * d + j] * (xt[j] - xs[j]);
            if (lagged) v -= z1[i * d + j] * (lt[j] - ls[j]);
        }
        out[i] = v;
    }
    return out;
}

DelayedControlledPath promote(const ControlledPath& cp) {
    DelayedControlledPath m(cp.base, cp.window, cp.dim);
    m.values = cp.values;
    m.zeta0 = cp.gubinelli;
    return m;
}

namespace {

/// Adds the compensated term for the integrand at window-relative s into out,
/// given the increment and the two area matrices (row-major d x d).
void add_compensated(const DelayedControlledPath& m, std::size_t s, const double* dx, const double* area,
                     const double* delayed, double* out) {
    const std::size_t d = m.noise_dim, w = m.dim / d;
    const double *ms = m.value(s), *z0 = m.z0(s), *z1 = m.z1(s);
    for (std::size_t i = 0; i < w; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            v += ms[i * d + j] * dx[j];
            for (std::size_t k = 0; k < d; ++k) {
                v += z0[(i * d + j) * d + k] * area[k * d + j];
                if (delayed) v += z1[(i * d + j) * d + k] * delayed[k * d + j];
            }
        }
        out[i] += v;
    }
}

void check_integrand(const DelayedControlledPath& m) {
    if (m.noise_dim == 0 || m.dim % m.noise_dim != 0)
        throw std::invalid_argument("integrand must take values in L(R^d, R^w)");
}

}  // namespace

std::vector<double> compensated_term(const DelayedControlledPath& m, std::size_t s, std::size_t t) {
    check_integrand(m);
    const std::size_t d = m.noise_dim, a = m.window.first;
    if (s > t || t >= m.n_points()) throw std::out_of_range("compensated_term: indices outside window");
    std::vector<double> out(m.dim / d, 0.0);
    if (s == t) return out;
    std::vector<double> dx(d);
    for (std::size_t j = 0; j < d; ++j) dx[j] = m.base.x(a + t)[j] - m.base.x(a + s)[j];
    const Eigen::MatrixXd A = reconstruct_area(m.base, a + s, a + t);
    std::vector<double> area(d * d), delayed;
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j) area[k * d + j] = A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    if (any_nonzero(m.z1(s), m.dim * d)) {
        const Eigen::MatrixXd D = reconstruct_delayed_area(m.base, a + s, a + t);
        delayed.resize(d * d);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j)
                delayed[k * d + j] = D(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    }
    add_compensated(m, s, dx.data(), area.data(), delayed.empty() ? nullptr : delayed.data(), out.data());
    return out;
}

ControlledPath delayed_rough_integral(const DelayedControlledPath& m, const DelayedRoughPath& drp,
                                      std::size_t a, std::size_t b) {
    check_integrand(m);
    if (m.noise_dim != drp.dim()) throw std::invalid_argument("delayed_rough_integral: noise dimension mismatch");
    if (!same_grid(m.base.grid(), drp.grid()) || m.base.data() != drp.data())
        throw std::invalid_argument("delayed_rough_integral: integrand is based on a different driver");
    if (a > b || a < m.window.first || b > m.window.last)
        throw std::out_of_range("delayed_rough_integral: [a,b] outside the integrand window");
    const std::size_t d = m.noise_dim, w = m.dim / d, off = m.window.first;
    ControlledPath out(drp, IndexRange{a, b}, w);
    std::vector<double> dx(d), acc(w, 0.0);
    for (std::size_t u = a; u <= b; ++u) {
        std::copy_n(m.value(u - off), m.dim, out.deriv(u - a));
        std::copy(acc.begin(), acc.end(), out.value(u - a));
        if (u == b) break;
        const double *x0 = drp.x(u), *x1 = drp.x(u + 1);
        for (std::size_t j = 0; j < d; ++j) dx[j] = x1[j] - x0[j];
        const double* delayed = any_nonzero(m.z1(u - off), m.dim * d) ? drp.step_delayed_area(u) : nullptr;
        add_compensated(m, u - off, dx.data(), drp.step_area(u), delayed, acc.data());
    }
    return out;
}

double controlled_norm(const ControlledPath& cp, double beta) {
    const std::size_t n = cp.n_points(), w = cp.dim, d = cp.noise_dim, a = cp.window.first;
    const double h = cp.base.grid().h;
    double total = norm2(cp.value(0), w) + norm2(cp.deriv(0), w * d);
    total += kernels::path_hoelder(cp.gubinelli.data(), n, w * d, h, beta);
    total += kernels::pair_sup(n, h, 2.0 * beta, [&](std::size_t s, std::size_t t) {
        const double *xs = cp.base.x(a + s), *xt = cp.base.x(a + t), *g = cp.deriv(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            double v = cp.value(t)[i] - cp.value(s)[i];
            for (std::size_t j = 0; j < d; ++j) v -= g[i * d + j] * (xt[j] - xs[j]);
            acc += v * v;
        }
        return std::sqrt(acc);
    });
    return total;
}

double controlled_norm(const ControlledPath& cp, const HoelderParams& params) {
    return controlled_norm(cp, params.beta);
}

double controlled_norm(const DelayedControlledPath& m, double beta) {
    const std::size_t n = m.n_points(), p = m.dim, d = m.noise_dim;
    const double h = m.base.grid().h;
    double total = norm2(m.value(0), p) + norm2(m.z0(0), p * d) + norm2(m.z1(0), p * d);
    total += kernels::path_hoelder(m.zeta0.data(), n, p * d, h, beta);
    total += kernels::path_hoelder(m.zeta1.data(), n, p * d, h, beta);
    total += kernels::pair_sup(n, h, 2.0 * beta, [&](std::size_t s, std::size_t t) {
        const auto r = remainder(m, s, t);
        return norm2(r.data(), r.size());
    });
    return total;
}

double controlled_norm(const DelayedControlledPath& m, const HoelderParams& params) {
    return controlled_norm(m, params.beta);
}

RoughDistanceTerms rough_distance_terms(const DelayedRoughPath& a, const DelayedRoughPath& b, double gamma,
                                        kernels::Exec exec) {
    if (a.dim() != b.dim() || a.n_points() != b.n_points() || a.grid().h != b.grid().h ||
        a.delay_steps() != b.delay_steps())
        throw std::invalid_argument("rough path distance: grids or dimensions differ");
    const std::size_t n = a.n_points(), d = a.dim(), dd = d * d;
    const double h = a.grid().h;
    RoughDistanceTerms out;
    out.path = kernels::pair_sup(
        n, h, gamma,
        [&](std::size_t s, std::size_t t) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double v = (a.x(t)[j] - a.x(s)[j]) - (b.x(t)[j] - b.x(s)[j]);
                acc += v * v;
            }
            return std::sqrt(acc);
        },
        exec);

    // Chen fold of the area difference along each row.
    auto area_rows = [&](std::size_t first, bool delayed) {
        return [&, first, delayed](std::size_t s) {
            const std::size_t S = first + s;
            return [&, S, first, delayed, acc = std::vector<double>(dd, 0.0)](std::size_t t) mutable {
                const std::size_t u = first + t - 1;
                const double* pa = delayed ? a.step_delayed_area(u) : a.step_area(u);
                const double* pb = delayed ? b.step_delayed_area(u) : b.step_area(u);
                const double* as = delayed ? a.x_lagged(S) : a.x(S);
                const double* au = delayed ? a.x_lagged(u) : a.x(u);
                const double* bs = delayed ? b.x_lagged(S) : b.x(S);
                const double* bu = delayed ? b.x_lagged(u) : b.x(u);
                double norm = 0.0;
                for (std::size_t k = 0; k < d; ++k)
                    for (std::size_t j = 0; j < d; ++j) {
                        const double da = a.x(u + 1)[j] - a.x(u)[j], db = b.x(u + 1)[j] - b.x(u)[j];
                        double& v = acc[k * d + j];
                        v += (pa[k * d + j] - pb[k * d + j]) + (au[k] - as[k]) * da - (bu[k] - bs[k]) * db;
                        norm += v * v;
                    }
                return std::sqrt(norm);
            };
        };
    };
    out.area = kernels::row_sup(n, h, 2.0 * gamma, area_rows(0, false), exec);
    const std::size_t first = std::max(a.first_delayed_index(), b.first_delayed_index());
    if (first + 1 < n) out.delayed_area = kernels::row_sup(n - first, h, 2.0 * gamma, area_rows(first, true), exec);
    return out;
}

double rho_distance(const DelayedRoughPath& a, const DelayedRoughPath& b, double gamma) {
    const auto t = rough_distance_terms(a, b, gamma);
    return t.path + t.area + t.delayed_area;
}

double d2beta_distance(const ControlledPath& x, const ControlledPath& y, double beta) {
    if (x.n_points() != y.n_points() || x.dim != y.dim || x.noise_dim != y.noise_dim ||
        x.base.grid().h != y.base.grid().h)
        throw std::invalid_argument("d2beta_distance: window mismatch");
    const std::size_t n = x.n_points(), w = x.dim, d = x.noise_dim, m = w * d;
    const std::size_t ax = x.window.first, ay = y.window.first;
    const double h = x.base.grid().h;
    const double deriv = kernels::pair_sup(n, h, beta, [&](std::size_t s, std::size_t t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = (x.deriv(t)[i] - x.deriv(s)[i]) - (y.deriv(t)[i] - y.deriv(s)[i]);
            acc += v * v;
        }
        return std::sqrt(acc);
    });
    const double rem = kernels::pair_sup(n, h, 2.0 * beta, [&](std::size_t s, std::size_t t) {
        const double *xs = x.base.x(ax + s), *xt = x.base.x(ax + t), *gx = x.deriv(s);
        const double *ys = y.base.x(ay + s), *yt = y.base.x(ay + t), *gy = y.deriv(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            double v = (x.value(t)[i] - x.value(s)[i]) - (y.value(t)[i] - y.value(s)[i]);
            for (std::size_t j = 0; j < d; ++j) v -= gx[i * d + j] * (xt[j] - xs[j]) - gy[i * d + j] * (yt[j] - ys[j]);
            acc += v * v;
        }
        return std::sqrt(acc);
    });
    return deriv + rem;
}

double d2beta_distance(const ControlledPath& x, const ControlledPath& y, const HoelderParams& params) {
    return d2beta_distance(x, y, params.beta);
}

std::pair<double, double> grr_diagnostic(const ControlledPath& cp, double p, const HoelderParams& params) {
    if (!(p > 2.0)) throw std::invalid_argument("grr_diagnostic: p must exceed 2");
    const std::size_t n = cp.n_points(), w = cp.dim;
    const double h = cp.base.grid().h, alpha = params.alpha;
    auto weight = [&](std::size_t i) { return (i == 0 || i + 1 == n) ? 0.5 * h : h; };
    // Off-diagonal pairs; the first functional integrates the full square, i.e. twice the upper half.
    const double path_sum = kernels::pair_sum(n, [&](std::size_t s, std::size_t t) {
        const double lag = static_cast<double>(t - s) * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            const double v = cp.value(t)[i] - cp.value(s)[i];
            acc += v * v;
        }
        return weight(s) * weight(t) * std::pow(std::sqrt(acc), p) / std::pow(lag, p * alpha + 2.0);
    });
    const double rem_sum = kernels::pair_sum(n, [&](std::size_t s, std::size_t t) {
        const double lag = static_cast<double>(t - s) * h;
        const auto r = remainder(cp, s, t);
        return weight(s) * weight(t) * std::pow(norm2(r.data(), r.size()), p) / std::pow(lag, 2.0 * alpha * p + 2.0);
    });
    return {std::pow(2.0 * path_sum, 1.0 / p), std::pow(rem_sum, 1.0 / p)};
}

}  // namespace rdde
