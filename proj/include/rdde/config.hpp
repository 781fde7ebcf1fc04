#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdde/drivers.hpp"
#include "rdde/grid.hpp"
#include "rdde/lyapunov.hpp"
#include "rdde/solver.hpp"

namespace rdde {

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Field specification:
///   "scalar-pure-delay"  dy = y(t - r) dX (sigma2 scales it)
///   "linear"             sigma1, sigma2 given as flat w*d*w arrays
///   "tanh"               c tanh(L / c) of the linear map L, c = saturation
struct FieldSpec {
    std::string type = "scalar-pure-delay";
    std::size_t w = 1;
    std::vector<double> sigma1;
    std::vector<double> sigma2;
    double saturation = 1.0;
};

/// Initial segment on [-r, 0], components identical:
///   "constant" value a; "affine" a + b t; "cosine" sum_j c_j cos(j pi (t + r) / r).
struct InitialSpec {
    std::string type = "constant";
    std::vector<double> coefficients{1.0};
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t dim = 1;  // noise dimension d
    double delay = 1.0;
    std::size_t delay_steps = 16;
    std::size_t refine = 64;
    std::size_t segments = 4;
    HoelderParams params;
    FieldSpec field;
    InitialSpec initial;
    DriverKind driver = DriverKind::ito;
    double epsilon = 0.05;           // mollified driver only
    bool exact_ito_diagonal = false;
    FixedPointConfig fixed_point;
    // lyapunov
    std::vector<std::string> norms{"M2", "Sup", "Hoelder(0.4)", "ControlledD(0.4)"};
    std::size_t k = 1;
    std::size_t n_steps = 200;
    // wong-zakai
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
    // no-semiflow
    std::size_t n_max = 10000;
    std::size_t young_max = 50;
    double fine_step = 1e-4;
    // verify
    std::size_t instances = 100;
    std::string output;

    void validate() const;
    DriverConfig driver_config() const;
    DelayField make_field() const;
    Segment make_initial() const;
    std::vector<NormKind> norm_kinds() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace rdde
