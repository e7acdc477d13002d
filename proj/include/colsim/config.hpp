// config.hpp — Experiment configuration: JSON schema, validation, model assembly

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "colsim/collision_map.hpp"
#include "colsim/scattering.hpp"

namespace colsim::cli {

// Invalid configuration (exit code 1), as opposed to numerical failure (2).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ModelConfig {
    double delta = 0.6;
    double lambda = 1.0;
    double barrier_length = 1.0;
    double mass = 0.1;
    double hbar = 1.0;
    int dimension = 2;
    std::optional<std::vector<double>> energies;                 // custom levels
    std::optional<std::vector<std::vector<std::array<double, 2>>>> coupling;  // [re, im]
};

struct ParticleConfig {
    double beta = 0.1;
    double dx = 1.0;
    double x0 = -10.0;
};

struct MapSettings {
    std::string backend = "approx";
    int nodes = 400;
    double p_cut_tolerance = 1e-14;
};

struct RunConfig {
    double gamma = 5.0;
    std::vector<double> gamma_grid;  // optional multi-rate steady solve
    double t_max = 10.0;
    double sample_dt = 0.1;
    std::uint64_t seed = 1;
    int trajectories = 1;
    bool renormalize = false;
    bool dephase = false;
};

struct SweepAxis {
    std::string name;  // gamma | delta | dx
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    std::string scale = "linear";  // linear | log

    std::vector<double> values() const;
};

struct EstimateConfig {
    double s_const = 0.01;
};

struct ExperimentConfig {
    ModelConfig model;
    ParticleConfig particle;
    MapSettings map;
    RunConfig run;
    std::vector<SweepAxis> sweep;
    EstimateConfig estimate;
    int threads = 1;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json to_json() const;

    // Throws ConfigError with a field-precise message.
    void validate() const;

    ScatteringModel build_model() const;
    ScatteringModel build_model(double delta_override) const;
    ParticleDensity build_particle() const;
    ParticleDensity build_particle(double dx_override) const;
    QuadratureSpec quadrature() const;
    Backend backend() const;
};

}  // namespace colsim::cli
