#include "rdde/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rdde/checks.hpp"
#include "rdde/counterexample.hpp"
#include "rdde/lyapunov.hpp"

namespace rdde {

using nlohmann::json;

std::string artifact_version() { return "0.1.0"; }

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_header(std::ostream& os, const std::string& command, const ExperimentConfig& config, const json& snapped) {
    os << "# rdde " << artifact_version() << '\n';
    os << "# command: " << command << '\n';
    os << "# config: " << to_json(config).dump() << '\n';
    os << "# snapped: " << snapped.dump() << '\n';
}

namespace {

json grid_snapshot(const ExperimentConfig& c) {
    const DriverConfig d = c.driver_config();
    return {{"fine_h", d.fine_h()}, {"coarse_h", d.coarse_h()}, {"fine_delay_steps", d.fine_delay_steps()},
            {"delay", d.coarse_h() * static_cast<double>(d.delay_steps)}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json finite_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(finite_or_null(x));
    return a;
}

}  // namespace

Trajectory simulate_trajectory(const Segment& xi, const DelayField& field, const DelayedRoughPath& drp,
                               const FixedPointConfig& fp) {
    const std::size_t N = drp.delay_steps(), w = field_w(field), d = field_d(field);
    const std::size_t segments = (drp.n_points() - 1) / N - 1;
    Trajectory out;
    out.grid = drp.grid();
    out.w = w;
    out.d = d;
    Segment cur = shift_segment(xi, 0, drp.grid());
    auto append = [&](const Segment& s, std::size_t from) {
        for (std::size_t i = from; i < s.n_points(); ++i) {
            out.y.insert(out.y.end(), s.value(i), s.value(i) + w);
            out.dy.insert(out.dy.end(), s.deriv(i), s.deriv(i) + w * d);
        }
    };
    append(cur, 0);
    for (std::size_t n = 0; n < segments; ++n) {
        cur = solve_step(cur, field, drp, fp);
        append(cur, 1);
    }
    out.grid.n_points = out.y.size() / w;
    return out;
}

WongZakaiResult wong_zakai_ladder(const DriverConfig& base, const DelayField& field, const Segment& xi,
                                  const std::vector<double>& epsilons, const FixedPointConfig& fp) {
    WongZakaiResult out;
    std::vector<std::pair<double, SnappedEpsilon>> valid;
    std::size_t pad = 0;
    for (double e : epsilons) {
        if (e < base.fine_h()) {
            out.skipped.push_back(e);
            continue;
        }
        const auto s = snap_epsilon(e, base.fine_h());
        valid.emplace_back(e, s);
        pad = std::max(pad, s.steps);
    }
    DriverConfig cfg = base;
    cfg.kind = DriverKind::ito;
    const SampledPath fine = sample_brownian(cfg, pad);
    const DelayedRoughPath strat = to_stratonovich(lift_ito(fine, cfg));
    const Trajectory ref = simulate_trajectory(xi, field, strat, fp);
    out.rows.resize(valid.size());
#pragma omp parallel for schedule(dynamic)
    for (long long ii = 0; ii < static_cast<long long>(valid.size()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        DriverConfig mc = cfg;
        mc.kind = DriverKind::mollified;
        mc.epsilon = valid[i].first;
        const DelayedRoughPath moll = lift_mollified(fine, mc);
        const Trajectory y = simulate_trajectory(xi, field, moll, fp);
        WongZakaiRow row;
        row.epsilon_requested = valid[i].first;
        row.epsilon = valid[i].second.value;
        row.kernel_steps = valid[i].second.steps;
        row.rho_distance = rho_distance(moll, strat, base.gamma);
        row.homogeneous_distance = homogeneous_distance(moll, strat, base.gamma);
        for (std::size_t p = 0; p < y.grid.n_points; ++p) {
            double acc = 0.0;
            for (std::size_t k = 0; k < y.w; ++k) {
                const double g = y.y[p * y.w + k] - ref.y[p * y.w + k];
                acc += g * g;
            }
            row.sup_gap = std::max(row.sup_gap, std::sqrt(acc));
        }
        out.rows[i] = row;
    }
    return out;
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& csv) {
    config.validate();
    const auto drp = build_driver(config.driver_config());
    const Trajectory tr = simulate_trajectory(config.make_initial(), config.make_field(), drp, config.fixed_point);
    json snapped = grid_snapshot(config);
    if (config.driver == DriverKind::mollified)
        snapped["epsilon"] = snap_epsilon(config.epsilon, config.driver_config().fine_h()).value;
    write_header(csv, "simulate", config, snapped);
    csv << "t";
    for (std::size_t k = 0; k < tr.w; ++k) csv << ",y_" << k;
    for (std::size_t k = 0; k < tr.w; ++k)
        for (std::size_t j = 0; j < tr.d; ++j) csv << ",dy_" << k << '_' << j;
    csv << '\n';
    for (std::size_t p = 0; p < tr.grid.n_points; ++p) {
        csv << format_real(tr.grid.time(static_cast<std::ptrdiff_t>(p)));
        for (std::size_t k = 0; k < tr.w; ++k) csv << ',' << format_real(tr.y[p * tr.w + k]);
        for (std::size_t q = 0; q < tr.w * tr.d; ++q) csv << ',' << format_real(tr.dy[p * tr.w * tr.d + q]);
        csv << '\n';
    }
    return 0;
}

int cmd_wong_zakai(const ExperimentConfig& config, std::ostream& csv) {
    config.validate();
    const DriverConfig base = config.driver_config();
    const auto res = wong_zakai_ladder(base, config.make_field(), config.make_initial(), config.epsilons,
                                       config.fixed_point);
    json snapped = grid_snapshot(config);
    json eps = json::array();
    for (const auto& r : res.rows) eps.push_back(r.epsilon);
    snapped["epsilons"] = eps;
    write_header(csv, "wong-zakai", config, snapped);
    for (double e : res.skipped) csv << "# skipped epsilon " << format_real(e) << ": below the fine step\n";
    csv << "epsilon_requested,epsilon,rho_distance,homogeneous_distance,sup_gap\n";
    for (const auto& r : res.rows)
        csv << format_real(r.epsilon_requested) << ',' << format_real(r.epsilon) << ',' << format_real(r.rho_distance)
            << ',' << format_real(r.homogeneous_distance) << ',' << format_real(r.sup_gap) << '\n';
    return 0;
}

int cmd_lyapunov(const ExperimentConfig& config, std::ostream& out, std::ostream* csv) {
    config.validate();
    DriverConfig dc = config.driver_config();
    dc.segments = std::max(dc.segments, config.n_steps);
    const auto drp = build_driver(dc);
    const DelayField field = config.make_field();
    const auto norms = config.norm_kinds();
    std::vector<SpectrumEstimate> est;
    if (norms.size() == 1)
        est.push_back(benettin_spectrum(field, drp, config.k, config.n_steps, norms[0], config.seed, config.fixed_point));
    else
        est = norm_independence_report(field, drp, config.k, config.n_steps, config.seed, norms, config.fixed_point);

    json snapped = grid_snapshot(config);
    snapped["driver_segments"] = dc.segments;
    json report;
    report["header"] = {{"version", artifact_version()}, {"command", "lyapunov"}, {"config", to_json(config)},
                        {"snapped", snapped}};
    report["initial_basis"] = "cosine, orthonormalized in M2; assumed generic";
    json list = json::array();
    for (const auto& e : est) {
        json clusters = json::array();
        for (const auto& c : e.clusters) clusters.push_back({{"mu", finite_or_null(c.mu)}, {"multiplicity", c.multiplicity}});
        list.push_back({{"norm", e.norm.name()},
                        {"k", e.k},
                        {"n_steps", e.n_steps},
                        {"seed", e.seed},
                        {"lambda", finite_array(e.lambda)},
                        {"lambda_half_width", finite_array(e.half_width)},
                        {"Lambda", finite_array(e.Lambda)},
                        {"Lambda_half_width", finite_array(e.Lambda_half_width)},
                        {"collapsed_from", e.collapsed_from},
                        {"clusters", clusters}});
    }
    report["estimates"] = list;
    out << report.dump(2) << '\n';

    if (csv) {
        write_header(*csv, "lyapunov", config, snapped);
        *csv << "step,norm";
        for (std::size_t j = 0; j < config.k; ++j) *csv << ",log_vol_" << j + 1;
        *csv << '\n';
        for (std::size_t s = 0; s < config.n_steps; ++s)
            for (const auto& e : est) {
                *csv << s << ',' << e.norm.name();
                for (double v : e.per_step_log_vol[s]) *csv << ',' << format_real(v);
                *csv << '\n';
            }
    }
    return 0;
}

int cmd_no_semiflow(const ExperimentConfig& config, std::ostream& csv) {
    config.validate();
    const auto rows = no_semiflow_table(config.n_max, config.seed, config.young_max, config.fine_step);
    write_header(csv, "no-semiflow", config,
                 {{"fine_step", 1.0 / std::round(1.0 / config.fine_step)}, {"young_max", std::min(config.young_max, config.n_max)}});
    csv << "N,S_N,young_integral,analytic_mean\n";
    for (const auto& r : rows)
        csv << r.n << ',' << format_real(r.s_n) << ',' << format_real(r.young) << ',' << format_real(r.analytic_mean)
            << '\n';
    return 0;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& out) {
    config.validate();
    const auto results = run_verify(config);
    json report;
    report["header"] = {{"version", artifact_version()}, {"command", "verify"}, {"config", to_json(config)},
                        {"snapped", grid_snapshot(config)}};
    json checks = json::array();
    bool all = true;
    for (const auto& r : results) {
        checks.push_back({{"name", r.name},
                          {"value", finite_or_null(r.value)},
                          {"threshold", r.threshold},
                          {"pass", r.pass},
                          {"structural", r.structural},
                          {"detail", r.detail}});
        all = all && r.pass;
    }
    report["checks"] = checks;
    report["pass"] = all;
    out << report.dump(2) << '\n';
    return all ? 0 : 3;
}

}  // namespace rdde
