#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rdde/grid.hpp"
#include "rdde/kernels.hpp"

namespace rdde {

/// Thrown when a delayed quantity needs driver samples before the stored history.
class InsufficientHistory : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Immutable storage behind DelayedRoughPath views.
struct RoughPathData {
    TimeGrid grid;
    std::size_t dim = 1;
    std::vector<double> x;             // n_points * d
    std::vector<double> area;          // (n_points-1) * d * d, entry [k*d + j] = int X^k_{s,u} dX^j_u
    std::vector<double> delayed_area;  // same layout with X^k_{s-r,u-r}; NaN before first_delayed_step
    std::size_t first_delayed_step = 0;
    double gamma = 0.5;
};

/// A path X with per-step Levy area and delayed Levy area, sampled on a grid
/// whose delay is an integer number of steps. Any (s,t) value is obtained from
/// the per-step data by the Chen relations. Copies share storage; shift_driver
/// produces re-based views without touching the data.
class DelayedRoughPath {
public:
    DelayedRoughPath() = default;

    /// Validates sizes and wraps the data. Delayed areas for steps before
    /// first_delayed_step are ignored and stored as NaN.
    static DelayedRoughPath from_steps(const TimeGrid& grid, std::size_t dim, std::vector<double> x,
                                       std::vector<double> area, std::vector<double> delayed_area,
                                       std::size_t first_delayed_step, double gamma);

    DelayedRoughPath view(std::size_t offset, std::size_t n_points) const;

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return data_->dim; }
    std::size_t n_points() const { return grid_.n_points; }
    std::size_t delay_steps() const { return grid_.delay_steps; }
    double gamma() const { return data_->gamma; }
    std::size_t offset() const { return offset_; }
    const std::shared_ptr<const RoughPathData>& data() const { return data_; }

    const double* x(std::size_t i) const { return data_->x.data() + (offset_ + i) * data_->dim; }
    const double* step_area(std::size_t j) const {
        return data_->area.data() + (offset_ + j) * data_->dim * data_->dim;
    }
    const double* step_delayed_area(std::size_t j) const;

    /// X at t_i - r; requires the delay window before t_i to be stored.
    const double* x_lagged(std::size_t i) const;
    bool has_lag(std::size_t i) const { return offset_ + i >= grid_.delay_steps; }
    bool has_delayed_step(std::size_t j) const { return offset_ + j >= data_->first_delayed_step; }
    /// First view index from which delayed steps are available.
    std::size_t first_delayed_index() const;

private:
    std::shared_ptr<const RoughPathData> data_;
    TimeGrid grid_;
    std::size_t offset_ = 0;
};

/// Level-2 quantities as d x d matrices, M(k,j) = entry [k*d + j].
Eigen::MatrixXd reconstruct_area(const DelayedRoughPath& drp, std::size_t s, std::size_t t);
Eigen::MatrixXd reconstruct_delayed_area(const DelayedRoughPath& drp, std::size_t s, std::size_t t);

/// Controlled path (m, m') on an index window of a driver; m' is w x d row-major.
struct ControlledPath {
    DelayedRoughPath base;
    IndexRange window;
    std::size_t dim = 1;
    std::size_t noise_dim = 1;
    std::vector<double> values;
    std::vector<double> gubinelli;

    ControlledPath() = default;
    ControlledPath(const DelayedRoughPath& drp, IndexRange win, std::size_t w);

    std::size_t n_points() const { return window.count(); }
    const double* value(std::size_t i) const { return values.data() + i * dim; }
    double* value(std::size_t i) { return values.data() + i * dim; }
    const double* deriv(std::size_t i) const { return gubinelli.data() + i * dim * noise_dim; }
    double* deriv(std::size_t i) { return gubinelli.data() + i * dim * noise_dim; }
};

/// Path controlled jointly by X and its r-shift: m_{s,t} = z0_s X_{s,t} + z1_s X_{s-r,t-r} + m#_{s,t}.
/// zeta0 and zeta1 are p x d row-major per point.
struct DelayedControlledPath {
    DelayedRoughPath base;
    IndexRange window;
    std::size_t dim = 1;
    std::size_t noise_dim = 1;
    std::vector<double> values;
    std::vector<double> zeta0;
    std::vector<double> zeta1;

    DelayedControlledPath() = default;
    DelayedControlledPath(const DelayedRoughPath& drp, IndexRange win, std::size_t p);

    std::size_t n_points() const { return window.count(); }
    const double* value(std::size_t i) const { return values.data() + i * dim; }
    double* value(std::size_t i) { return values.data() + i * dim; }
    const double* z0(std::size_t i) const { return zeta0.data() + i * dim * noise_dim; }
    double* z0(std::size_t i) { return zeta0.data() + i * dim * noise_dim; }
    const double* z1(std::size_t i) const { return zeta1.data() + i * dim * noise_dim; }
    double* z1(std::size_t i) { return zeta1.data() + i * dim * noise_dim; }
};

/// The segment as a controlled path over its window on drp.
ControlledPath as_controlled(const Segment& seg, const DelayedRoughPath& drp);
Segment to_segment(const ControlledPath& cp);

/// Remainder m#_{s,t} for window-relative indices s <= t.
std::vector<double> remainder(const ControlledPath& cp, std::size_t s, std::size_t t);
std::vector<double> remainder(const DelayedControlledPath& m, std::size_t s, std::size_t t);

/// zeta0 := m', zeta1 := 0.
DelayedControlledPath promote(const ControlledPath& cp);

/// One compensated term m_s X_{s,t} + z0_s X2_{s,t} + z1_s X2_{s,t}(-r) for window-relative
/// s <= t, with the integrand valued in L(R^d, R^w) flattened to p = w*d.
std::vector<double> compensated_term(const DelayedControlledPath& m, std::size_t s, std::size_t t);

/// t -> int_a^t m dX on [a, b] (grid indices of m's driver), as the telescoped sum of
/// one-step compensated terms. The result is controlled with Gubinelli derivative m.
ControlledPath delayed_rough_integral(const DelayedControlledPath& m, const DelayedRoughPath& drp,
                                      std::size_t a, std::size_t b);

/// |m_a| + |m'_a| + ||m'||_beta + ||m#||_{2beta}.
double controlled_norm(const ControlledPath& cp, double beta);
double controlled_norm(const ControlledPath& cp, const HoelderParams& params);
/// |m_a| + |z0_a| + |z1_a| + ||z0||_beta + ||z1||_beta + ||m#||_{2beta}.
double controlled_norm(const DelayedControlledPath& m, double beta);
double controlled_norm(const DelayedControlledPath& m, const HoelderParams& params);

/// Seminorm pieces shared by the rough path distances.
struct RoughDistanceTerms {
    double path = 0.0;
    double area = 0.0;
    double delayed_area = 0.0;
};
RoughDistanceTerms rough_distance_terms(const DelayedRoughPath& a, const DelayedRoughPath& b, double gamma,
                                        kernels::Exec exec = kernels::Exec::automatic);

/// Inhomogeneous distance: path term at gamma plus both area terms at 2 gamma.
double rho_distance(const DelayedRoughPath& a, const DelayedRoughPath& b, double gamma);

/// ||m' - n'||_beta + ||m# - n#||_{2beta}; the two paths may live on different drivers.
double d2beta_distance(const ControlledPath& x, const ControlledPath& y, double beta);
double d2beta_distance(const ControlledPath& x, const ControlledPath& y, const HoelderParams& params);

/// Double-integral functionals bounding the alpha-Hoelder seminorm of m and
/// the 2alpha seminorm of its remainder, by product trapezoid quadrature.
std::pair<double, double> grr_diagnostic(const ControlledPath& cp, double p, const HoelderParams& params);

}  // namespace rdde
