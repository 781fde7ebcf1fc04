#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdde/grid.hpp"
#include "rdde/rough_path.hpp"
#include "rdde/solver.hpp"

namespace rdde {

struct NormKind {
    enum class Tag { m2, sup, hoelder, controlled };
    Tag tag = Tag::m2;
    double alpha = 0.4;  // hoelder / controlled only

    static NormKind m2() { return {Tag::m2, 0.0}; }
    static NormKind sup() { return {Tag::sup, 0.0}; }
    static NormKind hoelder(double a);
    static NormKind controlled(double a);

    std::string name() const;
};

NormKind norm_kind_from_string(const std::string& s);

/// Norm of a segment. The controlled norm reads the driver over the segment window.
///   m2:         (|xi_a|^2 + int |xi|^2)^{1/2}
///   sup:        max |xi_t|
///   hoelder:    max |xi_t| + ||xi||_alpha
///   controlled: |xi_a| + |xi'_a| + ||xi'||_alpha + ||xi#||_{2alpha}
double norm_value(const Segment& seg, const NormKind& kind, const DelayedRoughPath& drp);

struct SpanDistance {
    double value = 0.0;
    std::vector<double> coefficients;  // x - sum c_j b_j attains value
    double m2_start = 0.0;             // value at the M2-optimal coefficients
};

/// Distance from x to the span of basis. M2 is exact (least-squares Gram solve,
/// rank-deficient bases projected onto their range); other norms run a
/// Nelder-Mead descent seeded at the M2 coefficients and return an upper bound
/// on the infimum, never above |x|.
SpanDistance distance_to_span(const Segment& x, const std::vector<Segment>& basis, const NormKind& kind,
                              const DelayedRoughPath& drp);

/// Successive distances d_1 = |x_1|, d_i = d(x_i, <x_1..x_{i-1}>).
std::vector<double> successive_distances(const std::vector<Segment>& vectors, const NormKind& kind,
                                         const DelayedRoughPath& drp);

double volume(const std::vector<Segment>& vectors, const NormKind& kind, const DelayedRoughPath& drp);

/// Replaces x_i by (x_i - p_i) / d_i with p_i the best approximation from the
/// earlier vectors, so every entry has unit norm and the image volume of any
/// linear map factors as Vol(T y) = Vol(T y_hat) Vol(y).
std::vector<Segment> normalize_tuple(const std::vector<Segment>& tuple, const NormKind& kind,
                                     const DelayedRoughPath& drp);

/// Smooth random unit tuples at index 0 of drp (cosine series, zero Gubinelli derivative).
std::vector<std::vector<Segment>> random_unit_tuples(std::size_t k, std::size_t trials, std::size_t w,
                                                     const DelayedRoughPath& drp, const NormKind& kind,
                                                     std::uint64_t seed);

struct DkEstimate {
    double dk = 0.0;       // max over samples of Vol of the k images
    double d1 = 0.0;       // max over the same sample vectors of Vol of one image
    double op_norm = 0.0;  // max over the same sample vectors of |T x| / |x|
    std::vector<std::vector<Segment>> images;  // per tuple, at index n*delay_steps
};

/// Estimates on given unit tuples for T = phi(n, omega, .).
DkEstimate dk_on_samples(const std::vector<std::vector<Segment>>& tuples, const DelayField& field,
                         const DelayedRoughPath& drp, std::size_t n, const NormKind& kind,
                         const FixedPointConfig& fp = {});

/// Lower bound on D_k(phi(n, omega, .)) from random unit tuples plus the orthonormalized cosine basis.
DkEstimate dk_estimate(const DelayField& field, const DelayedRoughPath& drp, std::size_t n, std::size_t k,
                       std::size_t trials, const NormKind& kind, std::uint64_t seed, const FixedPointConfig& fp = {});

/// Cosine basis cos(j pi (t + r)/r), j = 0..k-1, scaled by (1 + j)^-1, one segment each.
std::vector<Segment> cosine_basis(std::size_t k, std::size_t w, const DelayedRoughPath& drp);

struct Cluster {
    double mu = 0.0;
    std::size_t multiplicity = 0;
};

struct SpectrumEstimate {
    std::size_t k = 0;
    NormKind norm;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> per_step_log_vol;  // [step][j]: log Vol_{j+1}(images) - log Vol_{j+1}(basis)
    std::vector<double> Lambda;
    std::vector<double> lambda;
    std::vector<double> Lambda_half_width;
    std::vector<double> half_width;   // of lambda, batch means
    std::vector<Cluster> clusters;
    std::size_t collapsed_from = 0;   // index of the first -inf exponent, k if none
    std::vector<Segment> final_basis;
};

/// Confidence half-width of the mean of xs from batch means.
double batch_means_half_width(const std::vector<double>& xs, std::size_t batches = 20);

/// Groups consecutive exponents whose gap is within gap_factor times their combined half-widths.
std::vector<Cluster> cluster_exponents(const std::vector<double>& lambda, const std::vector<double>& half_width,
                                       double gap_factor = 3.0);

/// Renormalized volume-growth estimate for several measurement norms at once.
/// The basis is re-orthonormalized in M2 after every delay step, whatever the
/// measurement norms, so all estimates share one trajectory.
std::vector<SpectrumEstimate> benettin_multi(const DelayField& field, const DelayedRoughPath& drp,
                                             const std::vector<Segment>& initial, std::size_t n_steps,
                                             const std::vector<NormKind>& norms, std::uint64_t seed,
                                             const FixedPointConfig& fp = {});

SpectrumEstimate benettin_spectrum(const DelayField& field, const DelayedRoughPath& drp, std::size_t k,
                                   std::size_t n_steps, const NormKind& norm, std::uint64_t seed,
                                   const FixedPointConfig& fp = {});

/// Default norms of the comparison: M2, Sup, Hoelder(alpha), Controlled(alpha).
std::vector<NormKind> default_norms(double alpha = 0.4);

std::vector<SpectrumEstimate> norm_independence_report(const DelayField& field, const DelayedRoughPath& drp,
                                                       std::size_t k, std::size_t n_steps, std::uint64_t seed,
                                                       const std::vector<NormKind>& norms = default_norms(),
                                                       const FixedPointConfig& fp = {});

}  // namespace rdde
