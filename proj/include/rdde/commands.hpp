#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdde/config.hpp"
#include "rdde/drivers.hpp"
#include "rdde/solver.hpp"

namespace rdde {

std::string artifact_version();

/// Solution over the whole driver horizon from xi on [-r, 0].
struct Trajectory {
    TimeGrid grid;  // view grid, index 0 at -r
    std::size_t w = 1;
    std::size_t d = 1;
    std::vector<double> y;   // n_points * w
    std::vector<double> dy;  // n_points * w * d
};
Trajectory simulate_trajectory(const Segment& xi, const DelayField& field, const DelayedRoughPath& drp,
                               const FixedPointConfig& fp = {});

struct WongZakaiRow {
    double epsilon_requested = 0.0;
    double epsilon = 0.0;  // snapped to the fine grid
    std::size_t kernel_steps = 0;
    double rho_distance = 0.0;
    double homogeneous_distance = 0.0;
    double sup_gap = 0.0;  // sup over the horizon of |y^eps - y^Strat|
};
struct WongZakaiResult {
    std::vector<WongZakaiRow> rows;
    std::vector<double> skipped;  // requested values below the fine step
};
/// Mollified lifts of one Brownian sample against its Stratonovich lift.
WongZakaiResult wong_zakai_ladder(const DriverConfig& base, const DelayField& field, const Segment& xi,
                                  const std::vector<double>& epsilons, const FixedPointConfig& fp = {});

/// Header comment block: version, command, one-line config, snapped parameters.
void write_header(std::ostream& os, const std::string& command, const ExperimentConfig& config,
                  const nlohmann::json& snapped);
/// 17 significant digits.
std::string format_real(double v);

int cmd_simulate(const ExperimentConfig& config, std::ostream& csv);
int cmd_wong_zakai(const ExperimentConfig& config, std::ostream& csv);
/// JSON report to json; per-step log volumes to csv when given.
int cmd_lyapunov(const ExperimentConfig& config, std::ostream& json, std::ostream* csv);
int cmd_no_semiflow(const ExperimentConfig& config, std::ostream& csv);
/// Returns 3 when a property fails.
int cmd_verify(const ExperimentConfig& config, std::ostream& json);

}  // namespace rdde
