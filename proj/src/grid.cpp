#include "rdde/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rdde/kernels.hpp"

namespace rdde {

void TimeGrid::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("TimeGrid: step must be positive");
    if (n_points < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    if (delay_steps < 1) throw std::invalid_argument("TimeGrid: delay_steps must be >= 1");
}

bool same_grid(const TimeGrid& a, const TimeGrid& b) {
    return a.t0 == b.t0 && a.n_points == b.n_points && a.h == b.h && a.delay_steps == b.delay_steps;
}

TimeGrid build_grid(double t0, std::size_t delay_steps, std::size_t segments, double h) {
    if (delay_steps < 1) throw std::invalid_argument("build_grid: delay_steps must be >= 1");
    if (segments < 1) throw std::invalid_argument("build_grid: segments must be >= 1");
    TimeGrid g{t0, segments * delay_steps + 1, h, delay_steps};
    g.validate();
    return g;
}

TimeGrid build_grid(double t0, std::size_t delay_steps, std::size_t segments) {
    if (delay_steps < 1) throw std::invalid_argument("build_grid: delay_steps must be >= 1");
    return build_grid(t0, delay_steps, segments, 1.0 / static_cast<double>(delay_steps));
}

SampledPath::SampledPath(const TimeGrid& g, std::size_t d) : grid(g), dim(d), values(g.n_points * d, 0.0) {
    if (d == 0) throw std::invalid_argument("SampledPath: dim must be >= 1");
}

SampledPath sample_function(const TimeGrid& g, std::size_t dim, const std::function<void(double, double*)>& f) {
    SampledPath p(g, dim);
    for (std::size_t i = 0; i < g.n_points; ++i) f(g.time(static_cast<std::ptrdiff_t>(i)), p.at(i));
    return p;
}

Segment::Segment(std::size_t base, std::size_t n_steps, std::size_t w, std::size_t d, double step)
    : base_index(base), delay_steps(n_steps), dim(w), noise_dim(d), h(step),
      values((n_steps + 1) * w, 0.0), gubinelli((n_steps + 1) * w * d, 0.0) {
    validate();
}

void Segment::validate() const {
    if (delay_steps < 1 || dim < 1 || noise_dim < 1) throw std::invalid_argument("Segment: empty shape");
    if (!(h > 0.0)) throw std::invalid_argument("Segment: step must be positive");
    if (values.size() != n_points() * dim) throw std::invalid_argument("Segment: values size mismatch");
    if (gubinelli.size() != n_points() * dim * noise_dim)
        throw std::invalid_argument("Segment: gubinelli size mismatch");
}

bool Segment::same_shape(const Segment& o) const {
    return delay_steps == o.delay_steps && dim == o.dim && noise_dim == o.noise_dim && h == o.h;
}

namespace {
void require_shape(const Segment& a, const Segment& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("Segment: shape mismatch");
}
}  // namespace

Segment& Segment::operator+=(const Segment& o) { return axpy(1.0, o); }
Segment& Segment::operator-=(const Segment& o) { return axpy(-1.0, o); }

Segment& Segment::operator*=(double a) {
    for (auto& v : values) v *= a;
    for (auto& v : gubinelli) v *= a;
    return *this;
}

Segment& Segment::axpy(double a, const Segment& o) {
    require_shape(*this, o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += a * o.values[i];
    for (std::size_t i = 0; i < gubinelli.size(); ++i) gubinelli[i] += a * o.gubinelli[i];
    return *this;
}

Segment operator+(Segment a, const Segment& b) { return a += b; }
Segment operator-(Segment a, const Segment& b) { return a -= b; }
Segment operator*(double a, Segment b) { return b *= a; }

Segment segment_from_function(std::size_t base, std::size_t delay_steps, double h, std::size_t w, std::size_t d,
                              const std::function<void(double, double*)>& f) {
    Segment s(base, delay_steps, w, d, h);
    const double r = static_cast<double>(delay_steps) * h;
    for (std::size_t i = 0; i <= delay_steps; ++i) f(-r + static_cast<double>(i) * h, s.value(i));
    return s;
}

double HoelderParams::compatibility_rhs() const {
    return (1.0 - alpha) * (1.0 - beta - gamma + kappa) / ((1.0 - beta) * (1.0 - 2.0 * alpha + kappa));
}

bool HoelderParams::is_valid() const {
    if (!(1.0 / 3.0 < alpha && alpha < beta && beta < gamma && gamma <= 0.5)) return false;
    if (!(kappa > 0.0 && kappa < gamma)) return false;
    return beta - alpha > compatibility_rhs();
}

void HoelderParams::validate() const {
    if (!(1.0 / 3.0 < alpha && alpha < beta && beta < gamma && gamma <= 0.5))
        throw std::invalid_argument("HoelderParams: need 1/3 < alpha < beta < gamma <= 1/2");
    if (!(kappa > 0.0 && kappa < gamma)) throw std::invalid_argument("HoelderParams: need 0 < kappa < gamma");
    if (!(beta - alpha > compatibility_rhs()))
        throw std::invalid_argument("HoelderParams: beta - alpha = " + std::to_string(beta - alpha) +
                                    " does not exceed the compatibility bound " +
                                    std::to_string(compatibility_rhs()));
}

HoelderParams make_hoelder_params(double alpha, double beta, double gamma, double kappa) {
    HoelderParams p{alpha, beta, gamma, kappa};
    p.validate();
    return p;
}

PairTable::PairTable(IndexRange r, std::size_t d) : range(r), dim(d) {
    if (r.last < r.first) throw std::invalid_argument("PairTable: empty range");
    values.assign(r.count() * r.count() * d, 0.0);
}

double* PairTable::at(std::size_t s, std::size_t t) {
    return values.data() + ((s - range.first) * range.count() + (t - range.first)) * dim;
}

const double* PairTable::at(std::size_t s, std::size_t t) const {
    return values.data() + ((s - range.first) * range.count() + (t - range.first)) * dim;
}

double hoelder_seminorm(const SampledPath& path, double exponent, IndexRange range) {
    if (!(exponent > 0.0 && exponent <= 1.0)) throw std::invalid_argument("hoelder_seminorm: exponent must lie in (0,1]");
    if (range.last <= range.first) throw std::invalid_argument("hoelder_seminorm: empty range");
    if (range.last >= path.grid.n_points) throw std::invalid_argument("hoelder_seminorm: range outside grid");
    return kernels::path_hoelder(path.at(range.first), range.count(), path.dim, path.grid.h, exponent);
}

double hoelder_seminorm(const SampledPath& path, double exponent) {
    return hoelder_seminorm(path, exponent, IndexRange{0, path.grid.n_points - 1});
}

double two_param_hoelder_seminorm(const PairTable& table, double h, double exponent) {
    if (table.range.count() < 2) throw std::invalid_argument("two_param_hoelder_seminorm: empty range");
    if (!(exponent > 0.0)) throw std::invalid_argument("two_param_hoelder_seminorm: exponent must be positive");
    const std::size_t first = table.range.first;
    return kernels::pair_sup(table.range.count(), h, exponent, [&](std::size_t s, std::size_t t) {
        const double* v = table.at(first + s, first + t);
        double acc = 0.0;
        for (std::size_t c = 0; c < table.dim; ++c) acc += v[c] * v[c];
        return std::sqrt(acc);
    });
}

double sup_norm(const SampledPath& path) {
    double best = 0.0;
    for (std::size_t i = 0; i < path.grid.n_points; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < path.dim; ++c) acc += path(i, c) * path(i, c);
        best = std::max(best, std::sqrt(acc));
    }
    return best;
}

double m2_inner(const Segment& a, const Segment& b) {
    require_shape(a, b);
    const std::size_t n = a.n_points(), w = a.dim;
    auto dot = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < w; ++c) acc += a.value(i)[c] * b.value(i)[c];
        return acc;
    };
    double integral = 0.5 * (dot(0) + dot(n - 1));
    for (std::size_t i = 1; i + 1 < n; ++i) integral += dot(i);
    return dot(0) + a.h * integral;
}

double m2_norm(const Segment& seg) { return std::sqrt(std::max(0.0, m2_inner(seg, seg))); }

Segment shift_segment(const Segment& seg, std::size_t new_base, const TimeGrid& grid) {
    if (new_base + seg.delay_steps >= grid.n_points)
        throw std::invalid_argument("shift_segment: target window leaves the grid");
    if (grid.delay_steps != seg.delay_steps) throw std::invalid_argument("shift_segment: delay mismatch");
    Segment out = seg;
    out.base_index = new_base;
    return out;
}

}  // namespace rdde
