#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rdde {

/// Uniform grid aligned to the delay. The delay is defined as delay_steps * h,
/// so shifting by r is an index shift.
struct TimeGrid {
    double t0 = 0.0;
    std::size_t n_points = 2;
    double h = 1.0;
    std::size_t delay_steps = 1;

    double time(std::ptrdiff_t i) const { return t0 + static_cast<double>(i) * h; }
    double delay() const { return static_cast<double>(delay_steps) * h; }
    double length() const { return static_cast<double>(n_points - 1) * h; }
    std::size_t steps() const { return n_points - 1; }

    void validate() const;
};

bool same_grid(const TimeGrid& a, const TimeGrid& b);

/// Grid over [t0, t0 + segments*r] with r = delay_steps * h.
TimeGrid build_grid(double t0, std::size_t delay_steps, std::size_t segments, double h);

/// Same, with the step chosen so that r = 1 up to the rounding of 1/delay_steps.
TimeGrid build_grid(double t0, std::size_t delay_steps, std::size_t segments);

struct SampledPath {
    TimeGrid grid;
    std::size_t dim = 1;
    std::vector<double> values;  // n_points * dim, row-major by grid point

    SampledPath() = default;
    SampledPath(const TimeGrid& g, std::size_t d);

    const double* at(std::size_t i) const { return values.data() + i * dim; }
    double* at(std::size_t i) { return values.data() + i * dim; }
    double operator()(std::size_t i, std::size_t c = 0) const { return values[i * dim + c]; }
};

SampledPath sample_function(const TimeGrid& g, std::size_t dim,
                            const std::function<void(double, double*)>& f);

/// Inclusive index range [first, last] on a grid.
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t count() const { return last - first + 1; }
};

/// A controlled path on one delay window: values in R^w and a Gubinelli
/// derivative in L(R^d, R^w) stored row-major as w x d per point.
struct Segment {
    std::size_t base_index = 0;   // grid index of the left endpoint
    std::size_t delay_steps = 1;
    std::size_t dim = 1;          // w
    std::size_t noise_dim = 1;    // d
    double h = 1.0;
    std::vector<double> values;     // (delay_steps+1) * w
    std::vector<double> gubinelli;  // (delay_steps+1) * w * d

    Segment() = default;
    Segment(std::size_t base, std::size_t n_steps, std::size_t w, std::size_t d, double step);

    std::size_t n_points() const { return delay_steps + 1; }
    const double* value(std::size_t i) const { return values.data() + i * dim; }
    double* value(std::size_t i) { return values.data() + i * dim; }
    const double* deriv(std::size_t i) const { return gubinelli.data() + i * dim * noise_dim; }
    double* deriv(std::size_t i) { return gubinelli.data() + i * dim * noise_dim; }

    void validate() const;
    bool same_shape(const Segment& o) const;

    Segment& operator+=(const Segment& o);
    Segment& operator-=(const Segment& o);
    Segment& operator*=(double a);
    /// this += a * o
    Segment& axpy(double a, const Segment& o);
};

Segment operator+(Segment a, const Segment& b);
Segment operator-(Segment a, const Segment& b);
Segment operator*(double a, Segment b);

/// Segment sampled from a smooth function. A smooth path is controlled with
/// zero Gubinelli derivative.
Segment segment_from_function(std::size_t base, std::size_t delay_steps, double h, std::size_t w,
                              std::size_t d, const std::function<void(double, double*)>& f);

/// Rough exponents. Valid when 1/3 < alpha < beta < gamma <= 1/2, kappa in (0, gamma)
/// and the compatibility inequality between them holds.
struct HoelderParams {
    double alpha = 0.34;
    double beta = 0.49;
    double gamma = 0.499;
    double kappa = 0.001;

    /// Right-hand side of the compatibility inequality (beta - alpha must exceed it).
    double compatibility_rhs() const;
    bool is_valid() const;
    void validate() const;
};

HoelderParams make_hoelder_params(double alpha, double beta, double gamma, double kappa);

/// Two-parameter function on all pairs s <= t of an index range, dense.
struct PairTable {
    IndexRange range;
    std::size_t dim = 1;
    std::vector<double> values;  // count*count*dim, entry (s,t) at ((s-first)*count + t-first)*dim

    PairTable() = default;
    PairTable(IndexRange r, std::size_t d);
    double* at(std::size_t s, std::size_t t);
    const double* at(std::size_t s, std::size_t t) const;
};

/// max over grid pairs s<t in range of |x_t - x_s| / (t-s)^exponent.
double hoelder_seminorm(const SampledPath& path, double exponent, IndexRange range);
double hoelder_seminorm(const SampledPath& path, double exponent);

/// max over grid pairs s<t of |m_{s,t}| / (t-s)^exponent.
double two_param_hoelder_seminorm(const PairTable& table, double h, double exponent);

double sup_norm(const SampledPath& path);

/// (|xi_{-r}|^2 + int |xi_t|^2 dt)^{1/2}, trapezoid rule, Euclidean in components.
double m2_norm(const Segment& seg);
/// Inner product inducing m2_norm.
double m2_inner(const Segment& a, const Segment& b);

/// Re-indexed copy; values unchanged. The target window must lie on grid.
Segment shift_segment(const Segment& seg, std::size_t new_base, const TimeGrid& grid);

}  // namespace rdde
