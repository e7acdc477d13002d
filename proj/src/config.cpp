// config.cpp — JSON parsing and validation of the experiment configuration

#include "colsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace colsim::cli {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::set<std::string>& known,
                        const std::string& section) {
    for (const auto& item : obj.items())
        if (!known.count(item.key()))
            throw ConfigError("unknown field '" + section + "." + item.key() + "'");
}

template <typename T>
void read(const json& obj, const std::string& section, const std::string& key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + section + "." + key + "' has the wrong type");
    }
}

void require_positive(double value, const std::string& field) {
    if (!(value > 0)) throw ConfigError("field '" + field + "' must be positive");
}

}  // namespace

std::vector<double> SweepAxis::values() const {
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = min;
        return grid;
    }
    if (scale == "log") {
        const double ratio = max / min;
        for (int i = 0; i < count; ++i)
            grid[i] = min * std::pow(ratio, static_cast<double>(i) / (count - 1));
    } else {
        for (int i = 0; i < count; ++i)
            grid[i] = min + (max - min) * static_cast<double>(i) / (count - 1);
    }
    grid.front() = min;
    grid.back() = max;
    return grid;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig config;
    require_known_keys(
        j, {"model", "particle", "map", "run", "sweep", "estimate", "threads"}, "config");

    if (j.contains("model")) {
        const json& m = j.at("model");
        require_known_keys(m,
                           {"delta", "lambda", "barrier_length", "mass", "hbar",
                            "dimension", "energies", "coupling"},
                           "model");
        read(m, "model", "delta", config.model.delta);
        read(m, "model", "lambda", config.model.lambda);
        read(m, "model", "barrier_length", config.model.barrier_length);
        read(m, "model", "mass", config.model.mass);
        read(m, "model", "hbar", config.model.hbar);
        read(m, "model", "dimension", config.model.dimension);
        if (m.contains("energies")) {
            std::vector<double> energies;
            read(m, "model", "energies", energies);
            config.model.energies = energies;
        }
        if (m.contains("coupling")) {
            std::vector<std::vector<std::array<double, 2>>> coupling;
            read(m, "model", "coupling", coupling);
            config.model.coupling = coupling;
        }
    }
    if (j.contains("particle")) {
        const json& p = j.at("particle");
        require_known_keys(p, {"beta", "dx", "x0"}, "particle");
        read(p, "particle", "beta", config.particle.beta);
        read(p, "particle", "dx", config.particle.dx);
        read(p, "particle", "x0", config.particle.x0);
    }
    if (j.contains("map")) {
        const json& m = j.at("map");
        require_known_keys(m, {"backend", "nodes", "p_cut_tolerance"}, "map");
        read(m, "map", "backend", config.map.backend);
        read(m, "map", "nodes", config.map.nodes);
        read(m, "map", "p_cut_tolerance", config.map.p_cut_tolerance);
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        require_known_keys(r,
                           {"gamma", "gamma_grid", "t_max", "sample_dt", "seed",
                            "trajectories", "renormalize", "dephase"},
                           "run");
        read(r, "run", "gamma", config.run.gamma);
        read(r, "run", "gamma_grid", config.run.gamma_grid);
        read(r, "run", "t_max", config.run.t_max);
        read(r, "run", "sample_dt", config.run.sample_dt);
        read(r, "run", "seed", config.run.seed);
        read(r, "run", "trajectories", config.run.trajectories);
        read(r, "run", "renormalize", config.run.renormalize);
        read(r, "run", "dephase", config.run.dephase);
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        require_known_keys(s, {"axes"}, "sweep");
        if (s.contains("axes")) {
            for (const json& axis_json : s.at("axes")) {
                require_known_keys(axis_json, {"name", "min", "max", "count", "scale"},
                                   "sweep.axes[]");
                SweepAxis axis;
                read(axis_json, "sweep.axes[]", "name", axis.name);
                read(axis_json, "sweep.axes[]", "min", axis.min);
                read(axis_json, "sweep.axes[]", "max", axis.max);
                read(axis_json, "sweep.axes[]", "count", axis.count);
                read(axis_json, "sweep.axes[]", "scale", axis.scale);
                config.sweep.push_back(axis);
            }
        }
    }
    if (j.contains("estimate")) {
        const json& e = j.at("estimate");
        require_known_keys(e, {"s_const"}, "estimate");
        read(e, "estimate", "s_const", config.estimate.s_const);
    }
    read(j, "config", "threads", config.threads);
    return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    json j;
    j["model"] = {{"delta", model.delta},
                  {"lambda", model.lambda},
                  {"barrier_length", model.barrier_length},
                  {"mass", model.mass},
                  {"hbar", model.hbar},
                  {"dimension", model.dimension}};
    if (model.energies) j["model"]["energies"] = *model.energies;
    if (model.coupling) j["model"]["coupling"] = *model.coupling;
    j["particle"] = {{"beta", particle.beta}, {"dx", particle.dx}, {"x0", particle.x0}};
    j["map"] = {{"backend", map.backend},
                {"nodes", map.nodes},
                {"p_cut_tolerance", map.p_cut_tolerance}};
    j["run"] = {{"gamma", run.gamma},           {"gamma_grid", run.gamma_grid},
                {"t_max", run.t_max},           {"sample_dt", run.sample_dt},
                {"seed", run.seed},             {"trajectories", run.trajectories},
                {"renormalize", run.renormalize}, {"dephase", run.dephase}};
    json axes = json::array();
    for (const SweepAxis& axis : sweep)
        axes.push_back({{"name", axis.name},
                        {"min", axis.min},
                        {"max", axis.max},
                        {"count", axis.count},
                        {"scale", axis.scale}});
    j["sweep"] = {{"axes", axes}};
    j["estimate"] = {{"s_const", estimate.s_const}};
    j["threads"] = threads;
    return j;
}

void ExperimentConfig::validate() const {
    require_positive(model.delta, "model.delta");
    if (model.lambda < 0) throw ConfigError("field 'model.lambda' must be non-negative");
    require_positive(model.barrier_length, "model.barrier_length");
    require_positive(model.mass, "model.mass");
    require_positive(model.hbar, "model.hbar");
    if (model.dimension < 1) throw ConfigError("field 'model.dimension' must be >= 1");
    if (model.energies.has_value() != model.coupling.has_value())
        throw ConfigError("fields 'model.energies' and 'model.coupling' must be given together");
    if (model.energies) {
        const auto& e = *model.energies;
        if (e.empty()) throw ConfigError("field 'model.energies' must be non-empty");
        for (std::size_t i = 0; i + 1 < e.size(); ++i)
            if (!(e[i] < e[i + 1]))
                throw ConfigError("field 'model.energies' must be strictly ascending");
        if (model.coupling->size() != e.size())
            throw ConfigError("field 'model.coupling' must be a square matrix matching energies");
        for (const auto& row : *model.coupling)
            if (row.size() != e.size())
                throw ConfigError("field 'model.coupling' must be a square matrix matching energies");
    }

    require_positive(particle.beta, "particle.beta");
    require_positive(particle.dx, "particle.dx");
    if (4.0 * M_PI * particle.dx * std::sqrt(model.mass / particle.beta) < model.hbar)
        throw ConfigError(
            "particle parameters violate the validity condition "
            "4*pi*dx*sqrt(m/beta) >= hbar");

    if (map.backend != "approx" && map.backend != "exact")
        throw ConfigError("field 'map.backend' must be 'approx' or 'exact'");
    if (map.nodes < 16) throw ConfigError("field 'map.nodes' must be >= 16");
    if (!(map.p_cut_tolerance > 0 && map.p_cut_tolerance < 1))
        throw ConfigError("field 'map.p_cut_tolerance' must lie in (0, 1)");

    if (run.gamma < 0) throw ConfigError("field 'run.gamma' must be non-negative");
    for (double g : run.gamma_grid)
        if (g < 0) throw ConfigError("field 'run.gamma_grid' entries must be non-negative");
    require_positive(run.t_max, "run.t_max");
    require_positive(run.sample_dt, "run.sample_dt");
    if (run.trajectories < 1) throw ConfigError("field 'run.trajectories' must be >= 1");

    for (const SweepAxis& axis : sweep) {
        if (axis.name != "gamma" && axis.name != "delta" && axis.name != "dx")
            throw ConfigError("field 'sweep.axes[].name' must be gamma, delta or dx");
        if (axis.count < 1) throw ConfigError("field 'sweep.axes[].count' must be >= 1");
        if (axis.count > 1 && !(axis.min < axis.max))
            throw ConfigError("field 'sweep.axes[].min' must be below max");
        if (axis.scale != "linear" && axis.scale != "log")
            throw ConfigError("field 'sweep.axes[].scale' must be 'linear' or 'log'");
        if (axis.scale == "log" && !(axis.min > 0))
            throw ConfigError("field 'sweep.axes[].min' must be positive on a log scale");
        require_positive(axis.min, "sweep.axes[].min");
    }

    require_positive(estimate.s_const, "estimate.s_const");
    if (threads < 1) throw ConfigError("field 'threads' must be >= 1");
}

ScatteringModel ExperimentConfig::build_model() const {
    return build_model(model.delta);
}

ScatteringModel ExperimentConfig::build_model(double delta_override) const {
    if (model.energies) {
        const auto& e = *model.energies;
        RealVector energies(static_cast<Index>(e.size()));
        for (std::size_t i = 0; i < e.size(); ++i) energies(static_cast<Index>(i)) = e[i];
        Matrix coupling(energies.size(), energies.size());
        for (std::size_t r = 0; r < e.size(); ++r)
            for (std::size_t c = 0; c < e.size(); ++c)
                coupling(static_cast<Index>(r), static_cast<Index>(c)) =
                    Complex((*model.coupling)[r][c][0], (*model.coupling)[r][c][1]);
        return ScatteringModel(energies, HermitianOperator(coupling),
                               model.barrier_length, model.mass, model.hbar);
    }
    if (model.dimension != 2)
        throw ConfigError(
            "field 'model.dimension' other than 2 requires explicit energies/coupling");
    return ScatteringModel::qubit(delta_override, model.lambda, model.barrier_length,
                                  model.mass, model.hbar);
}

ParticleDensity ExperimentConfig::build_particle() const {
    return build_particle(particle.dx);
}

ParticleDensity ExperimentConfig::build_particle(double dx_override) const {
    return ParticleDensity(particle.beta, model.mass, dx_override, particle.x0,
                           model.hbar);
}

QuadratureSpec ExperimentConfig::quadrature() const {
    QuadratureSpec quad;
    quad.nodes = map.nodes;
    quad.p_cut_tolerance = map.p_cut_tolerance;
    return quad;
}

Backend ExperimentConfig::backend() const { return backend_from_string(map.backend); }

}  // namespace colsim::cli
