#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdde/grid.hpp"
#include "rdde/rough_path.hpp"

namespace rdde {

enum class DriverKind { ito, stratonovich, mollified, piecewise_linear };

std::string to_string(DriverKind k);
DriverKind driver_kind_from_string(const std::string& s);

/// Driver construction parameters. The fine step is delay / (delay_steps * refine)
/// and the coarse step is refine fine steps, so both grids share the delay exactly.
struct DriverConfig {
    std::size_t dim = 1;
    double delay = 1.0;
    std::size_t delay_steps = 16;
    std::size_t segments = 2;
    std::size_t refine = 64;
    std::uint64_t seed = 0;
    DriverKind kind = DriverKind::ito;
    double epsilon = 0.0;             // mollified only
    bool exact_ito_diagonal = false;  // overwrite Ito diagonal by ((dB)^2 - h)/2
    double gamma = 0.499;
    SampledPath source;               // piecewise_linear only: fine path over [-r, segments*r]

    void validate() const;
    double fine_h() const { return delay / static_cast<double>(delay_steps * refine); }
    double coarse_h() const { return fine_h() * static_cast<double>(refine); }
    std::size_t fine_delay_steps() const { return delay_steps * refine; }
    std::size_t coarse_points() const { return (segments + 1) * delay_steps + 1; }
};

/// Fine Brownian path over [-r - pad*h_f, segments*r] with B_0 = 0. Values on
/// the common range do not depend on pad.
SampledPath sample_brownian(const DriverConfig& config, std::size_t pad = 0);

/// Ito lift on the coarse grid over [-r, segments*r]: per-step areas are
/// left-point Riemann sums over the fine sub-steps, delayed areas use the fine
/// path one delay earlier. fine may carry extra history (pad) in front.
DelayedRoughPath lift_ito(const SampledPath& fine, const DriverConfig& config);
DelayedRoughPath lift_ito(const DriverConfig& config);

/// Adds h/2 to the per-step area diagonal; delayed areas are copied verbatim.
DelayedRoughPath to_stratonovich(const DelayedRoughPath& ito);

struct MollifierKernel {
    std::size_t samples = 1;          // E: the kernel spans E fine steps
    double normalization = 1.0;       // c with int c*exp(-1/(z(1-z))) dz = 1
    std::vector<double> density;      // rho(q/E), q = 0..E
    std::vector<double> weights;      // quadrature weights, sum to 1
};

/// Bump density rho(z) = c exp(-1/(z(1-z))) on (0,1).
double mollifier_density(double z, double normalization);
double mollifier_normalization();
MollifierKernel make_mollifier(std::size_t samples);

struct SnappedEpsilon {
    std::size_t steps = 0;
    double value = 0.0;
};
/// Snaps epsilon to a positive multiple of the fine step.
SnappedEpsilon snap_epsilon(double epsilon, double fine_h);

/// B^eps_t = int B_{t - eps z} rho(z) dz by quadrature over kernel samples.
/// The output grid starts kernel.samples fine steps after the input grid.
SampledPath mollify(const SampledPath& b, const MollifierKernel& kernel);
SampledPath mollify(const SampledPath& b, double epsilon);

/// Lift of the piecewise-linear interpolant, integrated exactly on each fine
/// sub-interval. path.grid.delay_steps must be a multiple of delay_steps; the
/// coarse grid starts where path starts.
DelayedRoughPath lift_piecewise_linear(const SampledPath& path, std::size_t delay_steps, double gamma = 0.499);

/// Mollified Brownian lift for the same seed; the fine path must carry at least
/// the kernel length of extra history.
DelayedRoughPath lift_mollified(const SampledPath& fine, const DriverConfig& config);

/// Dispatch on config.kind.
DelayedRoughPath build_driver(const DriverConfig& config);

/// path term + sqrt(area term) + sqrt(delayed area term).
double homogeneous_distance(const DelayedRoughPath& a, const DelayedRoughPath& b, double gamma);

/// Path with every level scaled: x * lambda, areas * lambda^2.
DelayedRoughPath dilate(const DelayedRoughPath& drp, double lambda);

/// Re-based view at t0 + k*r; the new view starts one delay window before its time 0.
DelayedRoughPath shift_driver(const DelayedRoughPath& drp, std::size_t k);

/// Little-endian float64 dump: 32-byte header (magic, dim, delay_steps,
/// n_points as uint64), then t0, h, gamma, first delayed step, path, areas,
/// delayed areas.
void write_driver(const std::string& path, const DelayedRoughPath& drp);
DelayedRoughPath read_driver(const std::string& path);

}  // namespace rdde
