#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "rdde/commands.hpp"
#include "rdde/config.hpp"

namespace {

std::string csv_sibling(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? path.substr(0, dot) : path;
    return stem + "_steps.csv";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rough delay equations: drivers, solvers, cocycle and Lyapunov spectra"};
    app.require_subcommand(1);
    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    app.add_option("--config", config_path, "JSON experiment configuration");
    app.add_option("--out", out_path, "Output file (default: stdout)");
    app.add_option("--seed", seed, "Seed, overrides the configuration");
    app.add_option("--jobs", jobs, "Worker threads (default: OpenMP default)")->check(CLI::NonNegativeNumber);
    app.fallthrough();
    for (const char* name : {"simulate", "wong-zakai", "lyapunov", "no-semiflow", "verify"}) app.add_subcommand(name);
    app.get_subcommand("simulate")->description("Trajectory CSV of (t, y, y')");
    app.get_subcommand("wong-zakai")->description("Mollified drivers against the Stratonovich lift");
    app.get_subcommand("lyapunov")->description("Lyapunov spectrum estimates (JSON) and per-step log volumes (CSV)");
    app.get_subcommand("no-semiflow")->description("Fourier counterexample: S_N against the Young integral");
    app.get_subcommand("verify")->description("Property suites; exit status 3 on failure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (jobs > 0) omp_set_num_threads(jobs);

    rdde::ExperimentConfig config;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw rdde::ConfigError("config: cannot open " + config_path);
            try {
                is >> j;
            } catch (const nlohmann::json::parse_error& e) {
                throw rdde::ConfigError("config: " + config_path + " is not valid JSON: " + e.what());
            }
        }
        if (seed) j["seed"] = *seed;
        if (!out_path.empty()) j["output"] = out_path;
        config = rdde::config_from_json(j);
    } catch (const rdde::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        std::ofstream file;
        if (!config.output.empty()) {
            file.open(config.output);
            if (!file) throw std::runtime_error("cannot open output " + config.output);
        }
        std::ostream& out = config.output.empty() ? std::cout : file;
        int status = 0;
        if (cmd == "simulate") {
            status = rdde::cmd_simulate(config, out);
        } else if (cmd == "wong-zakai") {
            status = rdde::cmd_wong_zakai(config, out);
        } else if (cmd == "lyapunov") {
            std::ofstream steps;
            if (!config.output.empty()) steps.open(csv_sibling(config.output));
            status = rdde::cmd_lyapunov(config, out, steps.is_open() ? &steps : nullptr);
        } else if (cmd == "no-semiflow") {
            status = rdde::cmd_no_semiflow(config, out);
        } else {
            status = rdde::cmd_verify(config, out);
        }
        return status;
    } catch (const rdde::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
