#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rdde/grid.hpp"
#include "rdde/rough_path.hpp"

namespace rdde {

/// sigma(y, z) = sigma1 y + sigma2 z with values in L(R^d, R^w).
/// Entry (i, j, l) of sigma1 sits at (i*d + j)*w + l.
struct LinearDelayField {
    std::size_t w = 1;
    std::size_t d = 1;
    std::vector<double> sigma1;
    std::vector<double> sigma2;

    LinearDelayField() = default;
    LinearDelayField(std::size_t w, std::size_t d);
    static LinearDelayField scalar(double s1, double s2);

    void eval(const double* y, const double* z, double* out) const;
    /// Frobenius norm of the pair (sigma1, sigma2).
    double norm() const;
    void validate() const;
};

/// C^3_b field given by callables. Partials are w*d x w, entry ((i*d + j), l).
struct SmoothDelayField {
    using Map = std::function<void(const double* y, const double* z, double* out)>;
    std::size_t w = 1;
    std::size_t d = 1;
    Map eval;
    Map d1;
    Map d2;
    double bound_sigma = 0.0;   // sup |sigma|
    double bound_d1 = 0.0;      // sup |d1 sigma| (and d2)
    double bound_higher = 0.0;  // bound for second and third derivatives
    std::string name;
};

SmoothDelayField make_smooth(const LinearDelayField& f);
/// sigma = c tanh(L / c) entrywise, L the linear field.
SmoothDelayField make_tanh_field(const LinearDelayField& f, double saturation);

/// Largest relative finite-difference mismatch of the partials at random points.
double check_partials(const SmoothDelayField& f, std::uint64_t seed, std::size_t trials, double scale = 1.0);

using DelayField = std::variant<LinearDelayField, SmoothDelayField>;
std::size_t field_w(const DelayField& f);
std::size_t field_d(const DelayField& f);
void eval_field(const DelayField& f, const double* y, const double* z, double* out);

struct FixedPointConfig {
    std::size_t max_iterations = 200;
    double tolerance = 1e-12;           // on |dy'_a| + d_2beta between successive iterates
    std::size_t min_window = 1;         // grid steps
    double contraction_limit = 0.9;
    double beta = 0.49;
    void validate() const;
};

class ConvergenceFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PicardReport {
    std::size_t iterations = 0;
    std::size_t halvings = 0;
    std::size_t windows = 0;
    std::vector<double> first_window_gaps;  // successive iterate distances on the first sub-window
};

/// Solution on [s, s+r], s the right end of xi, by marching the compensated sum.
Segment solve_linear_step(const Segment& xi, const LinearDelayField& field, const DelayedRoughPath& drp);

/// Same equation by Picard iteration on sub-windows.
Segment solve_nonlinear_step(const Segment& xi, const SmoothDelayField& field, const DelayedRoughPath& drp,
                             const FixedPointConfig& fp = {}, PicardReport* report = nullptr);

Segment solve_step(const Segment& xi, const DelayField& field, const DelayedRoughPath& drp,
                   const FixedPointConfig& fp = {});

/// |xi'_s - sigma(xi_s, xi_{s-r})| at the right end of xi.
double compatibility_defect(const Segment& xi, const DelayField& field);

/// Segment ending at t of the solution started from xi, which ends at s.
/// Off-lattice t needs the compatibility condition at s.
Segment semi_flow(const Segment& xi, std::size_t s, std::size_t t, const DelayField& field,
                  const DelayedRoughPath& drp, const FixedPointConfig& fp = {});

/// phi(n, omega, xi): xi is read as the segment on [-r, 0] of the view, i.e.
/// rebased to index 0; the result sits at index n*delay_steps.
Segment cocycle_apply(const Segment& xi, std::size_t n, const DelayField& field, const DelayedRoughPath& drp,
                      const FixedPointConfig& fp = {});

/// Hoelder norms of the three levels of the driver on an index window.
struct DriverNorms {
    double path = 0.0;
    double area = 0.0;
    double delayed_area = 0.0;
    double sum() const { return path + area + delayed_area; }
};
DriverNorms driver_norms(const DelayedRoughPath& drp, IndexRange window, double gamma);

/// C (1 + r^(gamma-beta) |X|) |xi| exp(C A^(1/(gamma-beta))), A the sum of the driver norms.
/// C absorbs the dependence on r and on the field.
double a_priori_rhs(double xi_norm, const DriverNorms& norms, const HoelderParams& params, double r, double C);

struct StabilityGap {
    double lhs = 0.0;
    double rhs_factor = 0.0;
    double ratio = 0.0;
};
StabilityGap stability_gap(const Segment& xi, const Segment& xi_tilde, const DelayedRoughPath& drp,
                           const DelayedRoughPath& drp_tilde, const DelayField& field, const HoelderParams& params,
                           const FixedPointConfig& fp = {});

}  // namespace rdde
