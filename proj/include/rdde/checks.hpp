#pragma once

// Property suites shared by the verify command and the acceptance tests.
// Residuals are relative to the magnitude of the terms that enter the identity.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdde/config.hpp"
#include "rdde/drivers.hpp"
#include "rdde/solver.hpp"

namespace rdde {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    bool structural = false;  // exact up to rounding by construction
    std::string detail;
};

/// Largest relative residual of the Chen identity over random triples s < u < t,
/// one fresh Ito driver per instance.
CheckResult check_chen(const DriverConfig& base, std::size_t instances, std::uint64_t seed);
CheckResult check_delayed_chen(const DriverConfig& base, std::size_t instances, std::uint64_t seed);

/// int_a^c = int_a^b + int_b^c for random delayed controlled integrands.
CheckResult check_integral_additivity(const DriverConfig& base, std::size_t instances, std::uint64_t seed);

/// phi(n+m, w, x) = phi(n, theta^m w, phi(m, w, x)) for random (n, m) and initial segments.
CheckResult check_cocycle(const DriverConfig& base, const DelayField& field, std::size_t instances,
                          std::uint64_t seed, const FixedPointConfig& fp = {});

/// phi(n, w, a x + b y) = a phi(n, w, x) + b phi(n, w, y).
CheckResult check_linearity(const DriverConfig& base, const LinearDelayField& field, std::size_t instances,
                            std::uint64_t seed);

/// Returned Gubinelli derivative equals sigma(y_u, y_{u-r}) and the seam value is copied.
CheckResult check_derivative_contract(const DriverConfig& base, const DelayField& field, std::size_t instances,
                                      std::uint64_t seed, const FixedPointConfig& fp = {});

/// max/min of lhs/rhs over perturbations lambda * eta, lambda = 1e-1..1e-4, worst over seeds.
CheckResult check_stability(const DriverConfig& base, const DelayField& field, const Segment& xi,
                            const HoelderParams& params, std::size_t seeds, std::uint64_t seed,
                            const FixedPointConfig& fp = {});

struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double max_abs_residual = 0.0;
};
RegressionFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// log(|y| / |xi|) against A^(1/(gamma-beta)) over random linear trials.
CheckResult check_a_priori(const DriverConfig& base, std::size_t trials, std::uint64_t seed, double gamma = 0.45,
                           double beta = 0.35);

struct IntegralOrder {
    std::vector<double> window;  // window lengths
    std::vector<double> defect;  // mean one-step defect per window
    RegressionFit fit;           // log defect against log window
};
/// One-step compensated-term defect against the fine-grid integral on a smooth
/// piecewise-linear driver, windows 2^-first_exp .. 2^-last_exp.
IntegralOrder integral_order(double gamma = 0.45, int first_exp = 3, int last_exp = 9);
CheckResult check_integral_order(double gamma = 0.45);

/// All suites for a configuration, structural checks first.
std::vector<CheckResult> run_verify(const ExperimentConfig& config);

}  // namespace rdde
