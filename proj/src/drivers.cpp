#include "rdde/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rdde/kernels.hpp"
#include "rdde/rng.hpp"

namespace rdde {

std::string to_string(DriverKind k) {
    switch (k) {
        case DriverKind::ito: return "ito";
        case DriverKind::stratonovich: return "stratonovich";
        case DriverKind::mollified: return "mollified";
        case DriverKind::piecewise_linear: return "piecewise_linear";
    }
    return "?";
}

DriverKind driver_kind_from_string(const std::string& s) {
    if (s == "ito") return DriverKind::ito;
    if (s == "stratonovich" || s == "strat") return DriverKind::stratonovich;
    if (s == "mollified") return DriverKind::mollified;
    if (s == "piecewise_linear") return DriverKind::piecewise_linear;
    throw std::invalid_argument("unknown driver kind '" + s + "'");
}

void DriverConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("driver: dim must be >= 1");
    if (!(delay > 0.0) || !std::isfinite(delay)) throw std::invalid_argument("driver: delay must be positive");
    if (delay_steps < 1) throw std::invalid_argument("driver: delay_steps must be >= 1");
    if (segments < 1) throw std::invalid_argument("driver: segments must be >= 1");
    if (refine < 1) throw std::invalid_argument("driver: refine must be >= 1");
    if (!(gamma > 1.0 / 3.0 && gamma <= 0.5)) throw std::invalid_argument("driver: gamma must lie in (1/3, 1/2]");
    if (kind == DriverKind::mollified && !(epsilon > 0.0))
        throw std::invalid_argument("driver: mollified kind needs epsilon > 0");
    if (kind == DriverKind::piecewise_linear && source.values.empty())
        throw std::invalid_argument("driver: piecewise_linear kind needs a source path");
}

SampledPath sample_brownian(const DriverConfig& config, std::size_t pad) {
    config.validate();
    const std::size_t d = config.dim, nr = config.fine_delay_steps();
    const std::size_t back = nr + pad;                       // fine steps before time 0
    const std::size_t forward = config.segments * nr;        // fine steps after time 0
    const double hf = config.fine_h(), sd = std::sqrt(hf);
    const TimeGrid grid{-static_cast<double>(back) * hf, back + forward + 1, hf, nr};
    SampledPath path(grid, d);
    const CounterRng rng(config.seed);

    // Increment of fine step i (from i to i+1, in units relative to time 0) is stored at back + i.
    const std::size_t steps = back + forward;
    std::vector<double> inc(steps * d);
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(steps); ++q) {
        const std::int64_t i = q - static_cast<std::int64_t>(back);
        for (std::size_t c = 0; c < d; ++c) inc[static_cast<std::size_t>(q) * d + c] = sd * rng.normal(c, i);
    }
    // Cumulate away from time 0 in both directions, so values never depend on pad.
    for (std::size_t c = 0; c < d; ++c) {
        path.at(back)[c] = 0.0;
        for (std::size_t m = back; m < steps; ++m) path.at(m + 1)[c] = path.at(m)[c] + inc[m * d + c];
        for (std::size_t m = back; m-- > 0;) path.at(m)[c] = path.at(m + 1)[c] - inc[m * d + c];
    }
    return path;
}

namespace {

std::size_t history_pad(const SampledPath& fine, const DriverConfig& config) {
    const std::size_t needed = (config.segments + 1) * config.fine_delay_steps() + 1;
    if (fine.dim != config.dim) throw std::invalid_argument("lift: fine path dimension mismatch");
    if (fine.grid.delay_steps != config.fine_delay_steps())
        throw std::invalid_argument("lift: fine path delay does not match the configuration");
    if (fine.grid.n_points < needed) throw std::invalid_argument("lift: fine path too short for the horizon");
    return fine.grid.n_points - needed;
}

SampledPath slice(const SampledPath& p, std::size_t first, std::size_t count) {
    if (first + count > p.grid.n_points) throw std::out_of_range("slice outside path");
    TimeGrid g = p.grid;
    g.t0 = p.grid.time(static_cast<std::ptrdiff_t>(first));
    g.n_points = count;
    SampledPath out(g, p.dim);
    std::copy_n(p.at(first), count * p.dim, out.values.begin());
    return out;
}

DelayedRoughPath rebuild(const DelayedRoughPath& like, std::vector<double> x, std::vector<double> area,
                         std::vector<double> delayed) {
    const auto& data = *like.data();
    auto full = DelayedRoughPath::from_steps(data.grid, data.dim, std::move(x), std::move(area), std::move(delayed),
                                             data.first_delayed_step, data.gamma);
    return full.view(like.offset(), like.n_points());
}

}  // namespace

DelayedRoughPath lift_ito(const SampledPath& fine, const DriverConfig& config) {
    config.validate();
    const std::size_t pad = history_pad(fine, config);
    const std::size_t d = config.dim, dd = d * d, R = config.refine, N = config.delay_steps,
                      NR = config.fine_delay_steps();
    const std::size_t nc = config.coarse_points();
    const double hc = config.coarse_h();
    const TimeGrid grid{-config.delay, nc, hc, N};

    std::vector<double> x(nc * d), area((nc - 1) * dd, 0.0), delayed((nc - 1) * dd, 0.0);
    for (std::size_t J = 0; J < nc; ++J) std::copy_n(fine.at(pad + J * R), d, x.begin() + static_cast<std::ptrdiff_t>(J * d));

#pragma omp parallel for schedule(static)
    for (long long JJ = 0; JJ < static_cast<long long>(nc - 1); ++JJ) {
        const auto J = static_cast<std::size_t>(JJ);
        const std::size_t f = pad + J * R;
        double* a = area.data() + J * dd;
        double* b = delayed.data() + J * dd;
        const bool lagged = J >= N;
        for (std::size_t q = 0; q < R; ++q) {
            const double *bf = fine.at(f), *bq = fine.at(f + q), *bn = fine.at(f + q + 1);
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t l = 0; l < d; ++l) a[k * d + l] += (bq[k] - bf[k]) * (bn[l] - bq[l]);
            if (lagged) {
                const double *gf = fine.at(f - NR), *gq = fine.at(f - NR + q);
                for (std::size_t k = 0; k < d; ++k)
                    for (std::size_t l = 0; l < d; ++l) b[k * d + l] += (gq[k] - gf[k]) * (bn[l] - bq[l]);
            }
        }
        if (config.exact_ito_diagonal) {
            for (std::size_t k = 0; k < d; ++k) {
                const double db = fine.at(f + R)[k] - fine.at(f)[k];
                a[k * d + k] = 0.5 * (db * db - hc);
            }
        }
    }
    return DelayedRoughPath::from_steps(grid, d, std::move(x), std::move(area), std::move(delayed), N, config.gamma);
}

DelayedRoughPath lift_ito(const DriverConfig& config) { return lift_ito(sample_brownian(config), config); }

DelayedRoughPath to_stratonovich(const DelayedRoughPath& ito) {
    const auto& data = *ito.data();
    const std::size_t d = data.dim;
    std::vector<double> area = data.area;
    for (std::size_t j = 0; j + 1 < data.grid.n_points; ++j)
        for (std::size_t k = 0; k < d; ++k) area[j * d * d + k * d + k] += 0.5 * data.grid.h;
    return rebuild(ito, data.x, std::move(area), data.delayed_area);
}

double mollifier_density(double z, double normalization) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    return normalization * std::exp(-1.0 / (z * (1.0 - z)));
}

double mollifier_normalization() {
    static const double c = [] {
        boost::math::quadrature::tanh_sinh<double> integrator;
        const double mass = integrator.integrate([](double z) { return mollifier_density(z, 1.0); }, 0.0, 1.0);
        return 1.0 / mass;
    }();
    return c;
}

MollifierKernel make_mollifier(std::size_t samples) {
    if (samples < 1) throw std::invalid_argument("mollifier: need at least one fine step");
    MollifierKernel k;
    k.samples = samples;
    k.normalization = mollifier_normalization();
    k.density.resize(samples + 1);
    k.weights.resize(samples + 1);
    const double E = static_cast<double>(samples);
    double total = 0.0;
    for (std::size_t q = 0; q <= samples; ++q) {
        k.density[q] = mollifier_density(static_cast<double>(q) / E, k.normalization);
        k.weights[q] = k.density[q] / E;  // trapezoid rule; the density vanishes at both ends
        total += k.weights[q];
    }
    if (total > 0.0) {
        for (auto& w : k.weights) w /= total;
    } else {
        // One step kernels sample only the endpoints; fall back to the midpoint value split evenly.
        std::fill(k.weights.begin(), k.weights.end(), 1.0 / static_cast<double>(samples + 1));
    }
    return k;
}

SnappedEpsilon snap_epsilon(double epsilon, double fine_h) {
    if (!(epsilon >= fine_h * (1.0 - 1e-12)))
        throw std::invalid_argument("mollify: epsilon " + std::to_string(epsilon) + " is below the fine step " +
                                    std::to_string(fine_h));
    const auto steps = static_cast<std::size_t>(std::llround(epsilon / fine_h));
    return {steps, static_cast<double>(steps) * fine_h};
}

SampledPath mollify(const SampledPath& b, const MollifierKernel& kernel) {
    const std::size_t E = kernel.samples;
    if (b.grid.n_points <= E) throw std::invalid_argument("mollify: path shorter than the kernel");
    TimeGrid g = b.grid;
    g.t0 = b.grid.time(static_cast<std::ptrdiff_t>(E));
    g.n_points = b.grid.n_points - E;
    SampledPath out(g, b.dim);
    out.values = kernels::convolve(b.values.data(), b.grid.n_points, b.dim, kernel.weights);
    return out;
}

SampledPath mollify(const SampledPath& b, double epsilon) {
    const auto snapped = snap_epsilon(epsilon, b.grid.h);
    return mollify(b, make_mollifier(snapped.steps));
}

DelayedRoughPath lift_piecewise_linear(const SampledPath& path, std::size_t delay_steps, double gamma) {
    if (delay_steps < 1 || path.grid.delay_steps % delay_steps != 0)
        throw std::invalid_argument("lift_piecewise_linear: fine delay must be a multiple of delay_steps");
    const std::size_t R = path.grid.delay_steps / delay_steps, NR = path.grid.delay_steps;
    if (path.grid.steps() % R != 0)
        throw std::invalid_argument("lift_piecewise_linear: path length is not a whole number of coarse steps");
    const std::size_t d = path.dim, dd = d * d, nc = path.grid.steps() / R + 1;
    const TimeGrid grid{path.grid.t0, nc, path.grid.h * static_cast<double>(R), delay_steps};

    std::vector<double> x(nc * d), area((nc - 1) * dd, 0.0), delayed((nc - 1) * dd, 0.0);
    for (std::size_t J = 0; J < nc; ++J) std::copy_n(path.at(J * R), d, x.begin() + static_cast<std::ptrdiff_t>(J * d));

#pragma omp parallel for schedule(static)
    for (long long JJ = 0; JJ < static_cast<long long>(nc - 1); ++JJ) {
        const auto J = static_cast<std::size_t>(JJ);
        const std::size_t f = J * R;
        double* a = area.data() + J * dd;
        double* b = delayed.data() + J * dd;
        const bool lagged = J >= delay_steps;
        for (std::size_t q = 0; q < R; ++q) {
            const double *xs = path.at(f), *xq = path.at(f + q), *xn = path.at(f + q + 1);
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t l = 0; l < d; ++l) {
                    const double dk = xn[k] - xq[k], dl = xn[l] - xq[l];
                    a[k * d + l] += (xq[k] - xs[k]) * dl + 0.5 * dk * dl;
                }
            if (lagged) {
                const double *ys = path.at(f - NR), *yq = path.at(f - NR + q), *yn = path.at(f - NR + q + 1);
                for (std::size_t k = 0; k < d; ++k)
                    for (std::size_t l = 0; l < d; ++l) {
                        const double dk = yn[k] - yq[k], dl = xn[l] - xq[l];
                        b[k * d + l] += (yq[k] - ys[k] + 0.5 * dk) * dl;
                    }
            }
        }
    }
    return DelayedRoughPath::from_steps(grid, d, std::move(x), std::move(area), std::move(delayed), delay_steps,
                                        gamma);
}

DelayedRoughPath lift_mollified(const SampledPath& fine, const DriverConfig& config) {
    const std::size_t pad = history_pad(fine, config);
    const auto snapped = snap_epsilon(config.epsilon, config.fine_h());
    if (pad < snapped.steps) throw std::invalid_argument("lift_mollified: fine path lacks history for the kernel");
    const SampledPath smooth = mollify(fine, make_mollifier(snapped.steps));
    // smooth starts snapped.steps fine steps after fine; time -r sits at pad - snapped.steps.
    const std::size_t count = (config.segments + 1) * config.fine_delay_steps() + 1;
    return lift_piecewise_linear(slice(smooth, pad - snapped.steps, count), config.delay_steps, config.gamma);
}

DelayedRoughPath build_driver(const DriverConfig& config) {
    config.validate();
    switch (config.kind) {
        case DriverKind::ito: return lift_ito(config);
        case DriverKind::stratonovich: return to_stratonovich(lift_ito(config));
        case DriverKind::mollified: {
            const auto snapped = snap_epsilon(config.epsilon, config.fine_h());
            return lift_mollified(sample_brownian(config, snapped.steps), config);
        }
        case DriverKind::piecewise_linear: return lift_piecewise_linear(config.source, config.delay_steps, config.gamma);
    }
    throw std::invalid_argument("unknown driver kind");
}

double homogeneous_distance(const DelayedRoughPath& a, const DelayedRoughPath& b, double gamma) {
    const auto t = rough_distance_terms(a, b, gamma);
    return t.path + std::sqrt(t.area) + std::sqrt(t.delayed_area);
}

DelayedRoughPath dilate(const DelayedRoughPath& drp, double lambda) {
    const auto& data = *drp.data();
    std::vector<double> x = data.x, area = data.area, delayed = data.delayed_area;
    for (auto& v : x) v *= lambda;
    for (auto& v : area) v *= lambda * lambda;
    for (auto& v : delayed) v *= lambda * lambda;
    return rebuild(drp, std::move(x), std::move(area), std::move(delayed));
}

DelayedRoughPath shift_driver(const DelayedRoughPath& drp, std::size_t k) {
    const std::size_t N = drp.delay_steps(), shift = k * N;
    if (shift + N + 1 > drp.n_points())
        throw std::out_of_range("shift_driver: insufficient remaining horizon");
    return drp.view(shift, drp.n_points() - shift);
}

}  // namespace rdde
