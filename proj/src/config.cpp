#include "rdde/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace rdde {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config." + field + ": " + what);
}

template <class T>
T read(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        fail(field, "wrong type (" + std::string(j.type_name()) + ")");
    }
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(where.empty() ? "root" : where, "expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (dim < 1) fail("dim", "must be >= 1");
    if (!(delay > 0.0) || !std::isfinite(delay)) fail("delay", "must be positive");
    if (delay_steps < 2) fail("delay_steps", "must be >= 2");
    if (refine < 1) fail("refine", "must be >= 1");
    if (segments < 1) fail("segments", "must be >= 1");
    if (!params.is_valid())
        fail("params", "need 1/3 < alpha < beta < gamma <= 1/2, 0 < kappa < gamma and beta - alpha > " +
                           std::to_string(params.compatibility_rhs()));
    if (field.type == "scalar-pure-delay") {
        if (dim != 1) fail("field.type", "scalar-pure-delay needs dim = 1");
        if (field.sigma2.size() > 1) fail("field.sigma2", "scalar-pure-delay takes at most one coefficient");
    } else if (field.type == "linear" || field.type == "tanh") {
        const std::size_t n = field.w * dim * field.w;
        if (field.w < 1) fail("field.w", "must be >= 1");
        if (field.sigma1.size() != n) fail("field.sigma1", "needs w*d*w = " + std::to_string(n) + " entries");
        if (field.sigma2.size() != n) fail("field.sigma2", "needs w*d*w = " + std::to_string(n) + " entries");
        for (double v : field.sigma1)
            if (!std::isfinite(v)) fail("field.sigma1", "non-finite entry");
        for (double v : field.sigma2)
            if (!std::isfinite(v)) fail("field.sigma2", "non-finite entry");
        if (field.type == "tanh" && !(field.saturation > 0.0)) fail("field.saturation", "must be positive");
    } else {
        fail("field.type", "unknown field '" + field.type + "' (scalar-pure-delay, linear, tanh)");
    }
    if (initial.type != "constant" && initial.type != "affine" && initial.type != "cosine")
        fail("initial.type", "unknown initial segment '" + initial.type + "' (constant, affine, cosine)");
    if (initial.coefficients.empty()) fail("initial.coefficients", "must not be empty");
    if (initial.type == "constant" && initial.coefficients.size() != 1) fail("initial.coefficients", "constant takes one value");
    if (initial.type == "affine" && initial.coefficients.size() != 2) fail("initial.coefficients", "affine takes two values");
    if (driver == DriverKind::piecewise_linear)
        fail("driver", "piecewise_linear needs a source path and is only available through the library");
    const double fine_h = delay / static_cast<double>(delay_steps * refine);
    if (driver == DriverKind::mollified && !(epsilon >= fine_h))
        fail("epsilon", "must be at least the fine step " + std::to_string(fine_h));
    try {
        fixed_point.validate();
    } catch (const std::invalid_argument& e) {
        fail("fixed_point", e.what());
    }
    if (norms.empty()) fail("norms", "must not be empty");
    for (const auto& n : norms) {
        try {
            norm_kind_from_string(n);
        } catch (const std::invalid_argument& e) {
            fail("norms", e.what());
        }
    }
    if (k < 1 || k > 8) fail("k", "must lie in [1, 8]");
    if (n_steps < 1) fail("n_steps", "must be >= 1");
    if (epsilons.empty()) fail("epsilons", "must not be empty");
    for (double e : epsilons)
        if (!(e > 0.0) || !std::isfinite(e)) fail("epsilons", "entries must be positive");
    if (n_max < 1) fail("n_max", "must be >= 1");
    if (!(fine_step > 0.0 && fine_step <= 1.0)) fail("fine_step", "must lie in (0, 1]");
    if (instances < 1) fail("instances", "must be >= 1");
}

DriverConfig ExperimentConfig::driver_config() const {
    DriverConfig c;
    c.dim = dim;
    c.delay = delay;
    c.delay_steps = delay_steps;
    c.segments = segments;
    c.refine = refine;
    c.seed = seed;
    c.kind = driver;
    c.epsilon = epsilon;
    c.exact_ito_diagonal = exact_ito_diagonal;
    c.gamma = params.gamma;
    return c;
}

DelayField ExperimentConfig::make_field() const {
    if (field.type == "scalar-pure-delay")
        return LinearDelayField::scalar(0.0, field.sigma2.empty() ? 1.0 : field.sigma2[0]);
    LinearDelayField f(field.w, dim);
    f.sigma1 = field.sigma1;
    f.sigma2 = field.sigma2;
    f.validate();
    if (field.type == "linear") return f;
    return make_tanh_field(f, field.saturation);
}

Segment ExperimentConfig::make_initial() const {
    const std::size_t w = field.type == "scalar-pure-delay" ? 1 : field.w;
    const double h = delay / static_cast<double>(delay_steps);
    const auto& c = initial.coefficients;
    const std::string type = initial.type;
    const double r = delay;
    return segment_from_function(0, delay_steps, h, w, dim, [&](double t, double* v) {
        double x = 0.0;
        if (type == "constant") {
            x = c[0];
        } else if (type == "affine") {
            x = c[0] + c[1] * t;
        } else {
            for (std::size_t j = 0; j < c.size(); ++j)
                x += c[j] * std::cos(static_cast<double>(j) * std::numbers::pi * (t + r) / r);
        }
        for (std::size_t i = 0; i < w; ++i) v[i] = x;
    });
}

std::vector<NormKind> ExperimentConfig::norm_kinds() const {
    std::vector<NormKind> out;
    for (const auto& n : norms) out.push_back(norm_kind_from_string(n));
    return out;
}

ExperimentConfig config_from_json(const json& j) {
    check_keys(j, "", {"seed", "dim", "delay", "delay_steps", "refine", "segments", "params", "field", "initial",
                       "driver", "epsilon", "exact_ito_diagonal", "fixed_point", "norms", "k", "n_steps",
                       "epsilons", "n_max", "young_max", "fine_step", "instances", "output"});
    ExperimentConfig c;
    if (j.contains("seed")) c.seed = read<std::uint64_t>(j["seed"], "seed");
    if (j.contains("dim")) c.dim = read<std::size_t>(j["dim"], "dim");
    if (j.contains("delay")) c.delay = read<double>(j["delay"], "delay");
    if (j.contains("delay_steps")) c.delay_steps = read<std::size_t>(j["delay_steps"], "delay_steps");
    if (j.contains("refine")) c.refine = read<std::size_t>(j["refine"], "refine");
    if (j.contains("segments")) c.segments = read<std::size_t>(j["segments"], "segments");
    if (j.contains("params")) {
        const auto& p = j["params"];
        check_keys(p, "params", {"alpha", "beta", "gamma", "kappa"});
        if (p.contains("alpha")) c.params.alpha = read<double>(p["alpha"], "params.alpha");
        if (p.contains("beta")) c.params.beta = read<double>(p["beta"], "params.beta");
        if (p.contains("gamma")) c.params.gamma = read<double>(p["gamma"], "params.gamma");
        if (p.contains("kappa")) c.params.kappa = read<double>(p["kappa"], "params.kappa");
    }
    if (j.contains("field")) {
        const auto& f = j["field"];
        if (f.is_string()) {
            c.field.type = f.get<std::string>();
        } else {
            check_keys(f, "field", {"type", "w", "sigma1", "sigma2", "saturation"});
            if (f.contains("type")) c.field.type = read<std::string>(f["type"], "field.type");
            if (f.contains("w")) c.field.w = read<std::size_t>(f["w"], "field.w");
            if (f.contains("sigma1")) c.field.sigma1 = read<std::vector<double>>(f["sigma1"], "field.sigma1");
            if (f.contains("sigma2")) c.field.sigma2 = read<std::vector<double>>(f["sigma2"], "field.sigma2");
            if (f.contains("saturation")) c.field.saturation = read<double>(f["saturation"], "field.saturation");
        }
    }
    if (j.contains("initial")) {
        const auto& s = j["initial"];
        check_keys(s, "initial", {"type", "coefficients"});
        if (s.contains("type")) c.initial.type = read<std::string>(s["type"], "initial.type");
        if (s.contains("coefficients"))
            c.initial.coefficients = read<std::vector<double>>(s["coefficients"], "initial.coefficients");
    }
    if (j.contains("driver")) {
        try {
            c.driver = driver_kind_from_string(read<std::string>(j["driver"], "driver"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            fail("driver", e.what());
        }
    }
    if (j.contains("epsilon")) c.epsilon = read<double>(j["epsilon"], "epsilon");
    if (j.contains("exact_ito_diagonal")) c.exact_ito_diagonal = read<bool>(j["exact_ito_diagonal"], "exact_ito_diagonal");
    if (j.contains("fixed_point")) {
        const auto& p = j["fixed_point"];
        check_keys(p, "fixed_point", {"max_iterations", "tolerance", "min_window", "contraction_limit", "beta"});
        auto& fp = c.fixed_point;
        if (p.contains("max_iterations")) fp.max_iterations = read<std::size_t>(p["max_iterations"], "fixed_point.max_iterations");
        if (p.contains("tolerance")) fp.tolerance = read<double>(p["tolerance"], "fixed_point.tolerance");
        if (p.contains("min_window")) fp.min_window = read<std::size_t>(p["min_window"], "fixed_point.min_window");
        if (p.contains("contraction_limit"))
            fp.contraction_limit = read<double>(p["contraction_limit"], "fixed_point.contraction_limit");
        if (p.contains("beta")) fp.beta = read<double>(p["beta"], "fixed_point.beta");
    }
    if (j.contains("norms")) c.norms = read<std::vector<std::string>>(j["norms"], "norms");
    if (j.contains("k")) c.k = read<std::size_t>(j["k"], "k");
    if (j.contains("n_steps")) c.n_steps = read<std::size_t>(j["n_steps"], "n_steps");
    if (j.contains("epsilons")) c.epsilons = read<std::vector<double>>(j["epsilons"], "epsilons");
    if (j.contains("n_max")) c.n_max = read<std::size_t>(j["n_max"], "n_max");
    if (j.contains("young_max")) c.young_max = read<std::size_t>(j["young_max"], "young_max");
    if (j.contains("fine_step")) c.fine_step = read<double>(j["fine_step"], "fine_step");
    if (j.contains("instances")) c.instances = read<std::size_t>(j["instances"], "instances");
    if (j.contains("output")) c.output = read<std::string>(j["output"], "output");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["dim"] = c.dim;
    j["delay"] = c.delay;
    j["delay_steps"] = c.delay_steps;
    j["refine"] = c.refine;
    j["segments"] = c.segments;
    j["params"] = {{"alpha", c.params.alpha}, {"beta", c.params.beta}, {"gamma", c.params.gamma}, {"kappa", c.params.kappa}};
    j["field"] = {{"type", c.field.type}, {"w", c.field.w}, {"sigma1", c.field.sigma1}, {"sigma2", c.field.sigma2},
                  {"saturation", c.field.saturation}};
    j["initial"] = {{"type", c.initial.type}, {"coefficients", c.initial.coefficients}};
    j["driver"] = to_string(c.driver);
    j["epsilon"] = c.epsilon;
    j["exact_ito_diagonal"] = c.exact_ito_diagonal;
    j["fixed_point"] = {{"max_iterations", c.fixed_point.max_iterations},
                        {"tolerance", c.fixed_point.tolerance},
                        {"min_window", c.fixed_point.min_window},
                        {"contraction_limit", c.fixed_point.contraction_limit},
                        {"beta", c.fixed_point.beta}};
    j["norms"] = c.norms;
    j["k"] = c.k;
    j["n_steps"] = c.n_steps;
    j["epsilons"] = c.epsilons;
    j["n_max"] = c.n_max;
    j["young_max"] = c.young_max;
    j["fine_step"] = c.fine_step;
    j["instances"] = c.instances;
    j["output"] = c.output;
    return j;
}

}  // namespace rdde
