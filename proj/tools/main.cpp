// main.cpp — colsim command-line front end

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "colsim/commands.hpp"

namespace {

using colsim::cli::ExperimentConfig;
using colsim::cli::ResultTable;

struct GlobalOptions {
    std::string config_path;
    std::string out_path;
    std::string backend;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

ExperimentConfig load_config(const GlobalOptions& opts) {
    ExperimentConfig config = opts.config_path.empty()
                                  ? ExperimentConfig{}
                                  : ExperimentConfig::from_file(opts.config_path);
    if (!opts.backend.empty()) config.map.backend = opts.backend;
    if (opts.seed_set) config.run.seed = opts.seed;
    if (opts.threads > 0) config.threads = opts.threads;
    config.validate();
    return config;
}

int emit(const ResultTable& table, const GlobalOptions& opts) {
    if (opts.out_path.empty()) {
        std::cout << table.to_csv();
    } else {
        table.write(opts.out_path);
    }
    if (table.metadata.contains("threshold_exceeded") &&
        table.metadata["threshold_exceeded"].get<bool>()) {
        std::cerr << "colsim: diagnostic threshold exceeded (detailed balance defect above "
                  << colsim::cli::kMapCheckThreshold << ")\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"colsim — collisional-reservoir simulator: scattering maps, "
                 "thermalization checks, Poissonian collision dynamics"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "JSON configuration file");
    app.add_option("--out", opts.out_path,
                   "Output CSV path (a JSON mirror with metadata is written next to it); "
                   "stdout when omitted");
    app.add_option("--seed", opts.seed, "Override run.seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    app.add_option("--threads", opts.threads, "Worker threads");
    app.add_option("--backend", opts.backend, "Override map.backend (approx|exact)")
        ->check(CLI::IsMember({"approx", "exact"}));

    auto* map_check = app.add_subcommand(
        "map-check", "Build the collision map and report quality diagnostics");
    auto* trajectory = app.add_subcommand(
        "trajectory", "Sample the Poissonian collision process over time");
    auto* steady =
        app.add_subcommand("steady", "Solve for the steady state at the configured rate");
    auto* sweep = app.add_subcommand(
        "sweep", "Steady-state sweep over gamma/delta/dx axes");
    auto* estimate = app.add_subcommand(
        "estimate", "Closed-form coherence estimate over the sweep grid");
    for (CLI::App* sub : {map_check, trajectory, steady, sweep, estimate})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig config = load_config(opts);
        ResultTable table;
        if (map_check->parsed()) table = colsim::cli::cmd_map_check(config);
        else if (trajectory->parsed()) table = colsim::cli::cmd_trajectory(config);
        else if (steady->parsed()) table = colsim::cli::cmd_steady(config);
        else if (sweep->parsed()) table = colsim::cli::cmd_sweep(config);
        else if (estimate->parsed()) table = colsim::cli::cmd_estimate(config);
        return emit(table, opts);
    } catch (const colsim::cli::ConfigError& e) {
        std::cerr << "colsim: configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "colsim: invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "colsim: numerical failure: " << e.what() << '\n';
        return 2;
    }
}
