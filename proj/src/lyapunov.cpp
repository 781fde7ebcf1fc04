#include "rdde/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "rdde/drivers.hpp"
#include "rdde/kernels.hpp"
#include "rdde/rng.hpp"

namespace rdde {

NormKind NormKind::hoelder(double a) {
    if (!(a > 1.0 / 3.0 && a < 0.5)) throw std::invalid_argument("Hoelder norm exponent must lie in (1/3, 1/2)");
    return {Tag::hoelder, a};
}

NormKind NormKind::controlled(double a) {
    if (!(a > 1.0 / 3.0 && a < 0.5)) throw std::invalid_argument("controlled norm exponent must lie in (1/3, 1/2)");
    return {Tag::controlled, a};
}

std::string NormKind::name() const {
    switch (tag) {
        case Tag::m2: return "M2";
        case Tag::sup: return "Sup";
        case Tag::hoelder: return "Hoelder(" + std::to_string(alpha).substr(0, 4) + ")";
        case Tag::controlled: return "ControlledD(" + std::to_string(alpha).substr(0, 4) + ")";
    }
    return "?";
}

NormKind norm_kind_from_string(const std::string& s) {
    if (s == "M2" || s == "m2") return NormKind::m2();
    if (s == "Sup" || s == "sup") return NormKind::sup();
    auto arg = [&](const std::string& prefix) -> double {
        if (s.size() <= prefix.size() + 2 || s.back() != ')') throw std::invalid_argument("bad norm '" + s + "'");
        return std::stod(s.substr(prefix.size() + 1, s.size() - prefix.size() - 2));
    };
    if (s.rfind("Hoelder(", 0) == 0) return NormKind::hoelder(arg("Hoelder"));
    if (s.rfind("ControlledD(", 0) == 0) return NormKind::controlled(arg("ControlledD"));
    throw std::invalid_argument("unknown norm '" + s + "' (expected M2, Sup, Hoelder(a), ControlledD(a))");
}

double norm_value(const Segment& seg, const NormKind& kind, const DelayedRoughPath& drp) {
    switch (kind.tag) {
        case NormKind::Tag::m2: return m2_norm(seg);
        case NormKind::Tag::sup:
        case NormKind::Tag::hoelder: {
            double sup = 0.0;
            for (std::size_t i = 0; i < seg.n_points(); ++i) {
                double acc = 0.0;
                for (std::size_t c = 0; c < seg.dim; ++c) acc += seg.value(i)[c] * seg.value(i)[c];
                sup = std::max(sup, std::sqrt(acc));
            }
            if (kind.tag == NormKind::Tag::sup) return sup;
            return sup + kernels::path_hoelder(seg.values.data(), seg.n_points(), seg.dim, seg.h, kind.alpha);
        }
        case NormKind::Tag::controlled: return controlled_norm(as_controlled(seg, drp), kind.alpha);
    }
    return 0.0;
}

namespace {

Segment combine(const Segment& x, const std::vector<Segment>& basis, const double* c) {
    Segment r = x;
    for (std::size_t j = 0; j < basis.size(); ++j) r.axpy(-c[j], basis[j]);
    return r;
}

struct NmProblem {
    const Segment* x;
    const std::vector<Segment>* basis;
    const NormKind* kind;
    const DelayedRoughPath* drp;
};

double nm_objective(const gsl_vector* v, void* params) {
    const auto* p = static_cast<const NmProblem*>(params);
    return norm_value(combine(*p->x, *p->basis, v->data), *p->kind, *p->drp);
}

/// One Nelder-Mead run from start with the given initial steps; returns the best value and updates start.
double nelder_mead(NmProblem& prob, std::vector<double>& start, const std::vector<double>& steps, double size_tol) {
    const std::size_t k = start.size();
    gsl_multimin_function fn{&nm_objective, k, &prob};
    gsl_vector* x = gsl_vector_alloc(k);
    gsl_vector* ss = gsl_vector_alloc(k);
    for (std::size_t j = 0; j < k; ++j) {
        gsl_vector_set(x, j, start[j]);
        gsl_vector_set(ss, j, steps[j]);
    }
    gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, k);
    gsl_multimin_fminimizer_set(m, &fn, x, ss);
    for (int it = 0; it < 4000; ++it) {
        if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), size_tol) == GSL_SUCCESS) break;
    }
    const double best = gsl_multimin_fminimizer_minimum(m);
    for (std::size_t j = 0; j < k; ++j) start[j] = gsl_vector_get(gsl_multimin_fminimizer_x(m), j);
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(ss);
    gsl_vector_free(x);
    return best;
}

}  // namespace

SpanDistance distance_to_span(const Segment& x, const std::vector<Segment>& basis, const NormKind& kind,
                              const DelayedRoughPath& drp) {
    SpanDistance out;
    if (basis.empty()) {
        out.value = out.m2_start = norm_value(x, kind, drp);
        return out;
    }
    const std::size_t k = basis.size();
    Eigen::MatrixXd G(k, k);
    Eigen::VectorXd g(k);
    for (std::size_t i = 0; i < k; ++i) {
        g(static_cast<Eigen::Index>(i)) = m2_inner(basis[i], x);
        for (std::size_t j = 0; j <= i; ++j)
            G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = m2_inner(basis[i], basis[j]);
    }
    // Least squares on the Gram system; a singular Gram matrix projects onto its range.
    const Eigen::VectorXd c = G.completeOrthogonalDecomposition().solve(g);
    out.coefficients.assign(c.data(), c.data() + k);
    out.m2_start = norm_value(combine(x, basis, out.coefficients.data()), kind, drp);
    out.value = out.m2_start;
    if (kind.tag == NormKind::Tag::m2) return out;

    gsl_set_error_handler_off();
    NmProblem prob{&x, &basis, &kind, &drp};
    const double xnorm = norm_value(x, kind, drp);
    std::vector<double> cur = out.coefficients, steps(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double bn = norm_value(basis[j], kind, drp);
        steps[j] = std::max(0.1 * std::abs(cur[j]), bn > 0.0 ? 0.1 * xnorm / bn : 0.1);
    }
    double best = out.value;
    std::vector<double> best_c = cur;
    for (int restart = 0; restart < 4; ++restart) {
        const double v = nelder_mead(prob, cur, steps, 1e-9 * (1.0 + xnorm));
        const bool improved = v < best - 1e-13 * (1.0 + best);
        if (v < best) {
            best = v;
            best_c = cur;
        }
        if (!improved && restart > 0) break;
        cur = best_c;
        for (auto& s : steps) s *= 0.3;
    }
    out.value = best;
    out.coefficients = best_c;
    if (xnorm <= out.value) {
        out.value = xnorm;
        std::fill(out.coefficients.begin(), out.coefficients.end(), 0.0);
    }
    return out;
}

std::vector<double> successive_distances(const std::vector<Segment>& vectors, const NormKind& kind,
                                         const DelayedRoughPath& drp) {
    std::vector<double> out;
    std::vector<Segment> prefix;
    for (const auto& v : vectors) {
        out.push_back(distance_to_span(v, prefix, kind, drp).value);
        prefix.push_back(v);
    }
    return out;
}

double volume(const std::vector<Segment>& vectors, const NormKind& kind, const DelayedRoughPath& drp) {
    if (vectors.empty()) throw std::invalid_argument("volume: empty list");
    double vol = 1.0;
    for (double d : successive_distances(vectors, kind, drp)) vol *= d;
    return vol;
}

std::vector<Segment> normalize_tuple(const std::vector<Segment>& tuple, const NormKind& kind,
                                     const DelayedRoughPath& drp) {
    std::vector<Segment> out, prefix;
    for (const auto& v : tuple) {
        const auto dist = distance_to_span(v, prefix, kind, drp);
        if (!(dist.value > 0.0)) throw std::invalid_argument("normalize_tuple: linearly dependent tuple");
        Segment y = prefix.empty() ? v : combine(v, prefix, dist.coefficients.data());
        y *= 1.0 / dist.value;
        out.push_back(std::move(y));
        prefix.push_back(v);
    }
    return out;
}

std::vector<Segment> cosine_basis(std::size_t k, std::size_t w, const DelayedRoughPath& drp) {
    const std::size_t N = drp.delay_steps();
    const double h = drp.grid().h, r = static_cast<double>(N) * h;
    std::vector<Segment> out;
    for (std::size_t j = 0; j < k; ++j)
        out.push_back(segment_from_function(0, N, h, w, drp.dim(), [&](double t, double* v) {
            for (std::size_t c = 0; c < w; ++c)
                v[c] = std::cos(static_cast<double>(j + c) * std::numbers::pi * (t + r) / r) / static_cast<double>(1 + j);
        }));
    return out;
}

std::vector<std::vector<Segment>> random_unit_tuples(std::size_t k, std::size_t trials, std::size_t w,
                                                     const DelayedRoughPath& drp, const NormKind& kind,
                                                     std::uint64_t seed) {
    const std::size_t N = drp.delay_steps(), terms = 6;
    const double h = drp.grid().h, r = static_cast<double>(N) * h;
    const CounterRng rng(seed);
    std::vector<std::vector<Segment>> out(trials);
    for (std::size_t t = 0; t < trials; ++t)
        for (std::size_t j = 0; j < k; ++j) {
            const std::uint64_t stream = 1000 + t * k + j;
            Segment s = segment_from_function(0, N, h, w, drp.dim(), [&](double time, double* v) {
                for (std::size_t c = 0; c < w; ++c) {
                    double acc = 0.0;
                    for (std::size_t m = 0; m < terms; ++m)
                        acc += rng.normal(stream, static_cast<std::int64_t>(m * w + c)) *
                               std::cos(static_cast<double>(m) * std::numbers::pi * (time + r) / r) /
                               static_cast<double>(1 + m);
                    v[c] = acc;
                }
            });
            s *= 1.0 / norm_value(s, kind, drp);
            out[t].push_back(std::move(s));
        }
    return out;
}

DkEstimate dk_on_samples(const std::vector<std::vector<Segment>>& tuples, const DelayField& field,
                         const DelayedRoughPath& drp, std::size_t n, const NormKind& kind,
                         const FixedPointConfig& fp) {
    DkEstimate out;
    out.images.resize(tuples.size());
    std::vector<double> vols(tuples.size(), 0.0), d1(tuples.size(), 0.0), op(tuples.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long ti = 0; ti < static_cast<long long>(tuples.size()); ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        std::vector<Segment> images;
        for (const auto& x : tuples[t]) images.push_back(cocycle_apply(x, n, field, drp, fp));
        const auto dists = successive_distances(images, kind, drp);
        double vol = 1.0;
        for (double d : dists) vol *= d;
        vols[t] = vol;
        for (std::size_t j = 0; j < images.size(); ++j) {
            const double img = norm_value(images[j], kind, drp);
            d1[t] = std::max(d1[t], img);
            op[t] = std::max(op[t], img / norm_value(tuples[t][j], kind, drp));
        }
        out.images[t] = std::move(images);
    }
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        out.dk = std::max(out.dk, vols[t]);
        out.d1 = std::max(out.d1, d1[t]);
        out.op_norm = std::max(out.op_norm, op[t]);
    }
    return out;
}

DkEstimate dk_estimate(const DelayField& field, const DelayedRoughPath& drp, std::size_t n, std::size_t k,
                       std::size_t trials, const NormKind& kind, std::uint64_t seed, const FixedPointConfig& fp) {
    if (k < 1) throw std::invalid_argument("dk_estimate: k must be >= 1");
    const std::size_t w = field_w(field);
    auto tuples = random_unit_tuples(k, trials, w, drp, kind, seed);
    tuples.push_back(normalize_tuple(cosine_basis(k, w, drp), kind, drp));
    return dk_on_samples(tuples, field, drp, n, kind, fp);
}

double batch_means_half_width(const std::vector<double>& xs, std::size_t batches) {
    const std::size_t n = xs.size();
    batches = std::min(batches, n);
    if (batches < 2) return std::numeric_limits<double>::infinity();
    const std::size_t size = n / batches;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < size; ++i) acc += xs[b * size + i];
        means[b] = acc / static_cast<double>(size);
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(batches - 1);
    const boost::math::students_t dist(static_cast<double>(batches - 1));
    const double q = boost::math::quantile(dist, 0.975);
    return q * std::sqrt(var / static_cast<double>(batches));
}

std::vector<Cluster> cluster_exponents(const std::vector<double>& lambda, const std::vector<double>& half_width,
                                       double gap_factor) {
    std::vector<Cluster> out;
    std::size_t start = 0;
    auto close = [&](std::size_t a, std::size_t b) {
        if (std::isinf(lambda[a]) || std::isinf(lambda[b])) return lambda[a] == lambda[b];
        return std::abs(lambda[a] - lambda[b]) <= gap_factor * (half_width[a] + half_width[b]);
    };
    for (std::size_t j = 1; j <= lambda.size(); ++j) {
        if (j < lambda.size() && close(j - 1, j)) continue;
        Cluster c;
        c.multiplicity = j - start;
        double acc = 0.0;
        for (std::size_t i = start; i < j; ++i) acc += lambda[i];
        c.mu = acc / static_cast<double>(c.multiplicity);
        out.push_back(c);
        start = j;
    }
    return out;
}

std::vector<SpectrumEstimate> benettin_multi(const DelayField& field, const DelayedRoughPath& drp,
                                             const std::vector<Segment>& initial, std::size_t n_steps,
                                             const std::vector<NormKind>& norms, std::uint64_t seed,
                                             const FixedPointConfig& fp) {
    const std::size_t k = initial.size(), N = drp.delay_steps(), nn = norms.size();
    if (k < 1 || k > 8) throw std::invalid_argument("benettin: need 1 <= k <= 8");
    if (n_steps < 1) throw std::invalid_argument("benettin: need at least one step");
    if ((n_steps + 1) * N >= drp.n_points())
        throw std::out_of_range("benettin: driver horizon shorter than the requested steps");
    const double ninf = -std::numeric_limits<double>::infinity();

    // Start from the M2-orthonormalized initial basis.
    std::vector<Segment> basis;
    {
        std::vector<Segment> tmp;
        for (const auto& v : initial) {
            Segment u = shift_segment(v, 0, drp.grid());
            for (const auto& q : tmp) u.axpy(-m2_inner(q, u), q);
            const double nrm = m2_norm(u);
            if (!(nrm > 0.0)) throw std::invalid_argument("benettin: initial basis is linearly dependent");
            u *= 1.0 / nrm;
            tmp.push_back(u);
        }
        basis = tmp;
    }

    std::vector<SpectrumEstimate> out(nn);
    for (std::size_t a = 0; a < nn; ++a) {
        out[a].k = k;
        out[a].norm = norms[a];
        out[a].n_steps = n_steps;
        out[a].seed = seed;
        out[a].per_step_log_vol.assign(n_steps, std::vector<double>(k, ninf));
    }
    // log d_j of the current basis in each measurement norm.
    std::vector<std::vector<double>> log_basis(nn, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < nn; ++a) {
        if (norms[a].tag == NormKind::Tag::m2) continue;
        const auto d = successive_distances(basis, norms[a], drp);
        for (std::size_t j = 0; j < k; ++j) log_basis[a][j] = std::log(d[j]);
    }
    std::vector<std::vector<double>> increments(k, std::vector<double>(n_steps, 0.0));
    std::size_t alive = k;

    for (std::size_t step = 0; step < n_steps; ++step) {
        const DelayedRoughPath omega = shift_driver(drp, step);
        std::vector<Segment> images(alive);
#pragma omp parallel for schedule(dynamic) if (alive > 1)
        for (long long jj = 0; jj < static_cast<long long>(alive); ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            images[j] = solve_step(basis[j], field, omega, fp);
        }
        // Modified Gram-Schmidt in M2; the diagonal is the M2 successive distance.
        std::vector<Segment> q = images;
        std::vector<double> logR(alive, ninf);
        std::size_t next_alive = alive;
        for (std::size_t j = 0; j < alive; ++j) {
            for (std::size_t i = 0; i < j; ++i) q[j].axpy(-m2_inner(q[i], q[j]), q[i]);
            const double nrm = m2_norm(q[j]);
            if (!(nrm > 1e-300) || !std::isfinite(nrm)) {
                next_alive = j;
                break;
            }
            logR[j] = std::log(nrm);
            q[j] *= 1.0 / nrm;
        }
        // Measurement: per-step increment of log d_j for every norm.
        for (std::size_t a = 0; a < nn; ++a) {
            std::vector<double> log_img(alive, ninf);
            if (norms[a].tag == NormKind::Tag::m2) {
                log_img = logR;
            } else {
                const auto d = successive_distances(std::vector<Segment>(images.begin(), images.begin() + next_alive),
                                                    norms[a], omega);
                for (std::size_t j = 0; j < next_alive; ++j) log_img[j] = std::log(d[j]);
            }
            double cum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                if (j < next_alive) {
                    const double inc = log_img[j] - log_basis[a][j];
                    cum += inc;
                    if (a == 0) increments[j][step] = inc;
                    out[a].per_step_log_vol[step][j] = cum;
                    // Basis after renormalization: same distances scaled by 1/R_jj.
                    log_basis[a][j] = log_img[j] - logR[j];
                }
            }
        }
        if (next_alive < alive) {
            for (std::size_t a = 0; a < nn; ++a) out[a].collapsed_from = std::min(out[a].collapsed_from == 0 ? k : out[a].collapsed_from, next_alive);
            alive = next_alive;
            if (alive == 0) break;
        }
        basis.assign(q.begin(), q.begin() + alive);
        for (auto& b : basis) b.base_index = 0;
    }

    for (std::size_t a = 0; a < nn; ++a) {
        auto& est = out[a];
        if (est.collapsed_from == 0) est.collapsed_from = alive;
        est.Lambda.assign(k, ninf);
        est.lambda.assign(k, ninf);
        est.Lambda_half_width.assign(k, std::numeric_limits<double>::infinity());
        est.half_width.assign(k, std::numeric_limits<double>::infinity());
        std::vector<double> prev(n_steps, 0.0);
        for (std::size_t j = 0; j < est.collapsed_from; ++j) {
            std::vector<double> cum(n_steps), inc(n_steps);
            for (std::size_t s = 0; s < n_steps; ++s) {
                cum[s] = est.per_step_log_vol[s][j];
                inc[s] = cum[s] - prev[s];
            }
            double acc = 0.0;
            for (double v : cum) acc += v;
            est.Lambda[j] = acc / static_cast<double>(n_steps);
            est.lambda[j] = est.Lambda[j] - (j == 0 ? 0.0 : est.Lambda[j - 1]);
            est.Lambda_half_width[j] = batch_means_half_width(cum);
            est.half_width[j] = batch_means_half_width(inc);
            prev = cum;
        }
        est.clusters = cluster_exponents(est.lambda, est.half_width);
        est.final_basis = basis;
    }
    return out;
}

SpectrumEstimate benettin_spectrum(const DelayField& field, const DelayedRoughPath& drp, std::size_t k,
                                   std::size_t n_steps, const NormKind& norm, std::uint64_t seed,
                                   const FixedPointConfig& fp) {
    return benettin_multi(field, drp, cosine_basis(k, field_w(field), drp), n_steps, {norm}, seed, fp)[0];
}

std::vector<NormKind> default_norms(double alpha) {
    return {NormKind::m2(), NormKind::sup(), NormKind::hoelder(alpha), NormKind::controlled(alpha)};
}

std::vector<SpectrumEstimate> norm_independence_report(const DelayField& field, const DelayedRoughPath& drp,
                                                       std::size_t k, std::size_t n_steps, std::uint64_t seed,
                                                       const std::vector<NormKind>& norms,
                                                       const FixedPointConfig& fp) {
    return benettin_multi(field, drp, cosine_basis(k, field_w(field), drp), n_steps, norms, seed, fp);
}

}  // namespace rdde
