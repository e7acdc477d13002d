// commands.cpp — Implementation of the CLI subcommands

#include "colsim/commands.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "colsim/dynamics.hpp"
#include "colsim/parallel.hpp"

namespace colsim::cli {

namespace {

using nlohmann::json;

constexpr double kSteadyTol = 1e-10;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

json diagnostics_json(const MapDiagnostics& diag) {
    return {{"trace_defect", diag.trace_defect},
            {"hermiticity_defect", diag.hermiticity_defect},
            {"choi_min_eigenvalue", diag.choi_min_eigenvalue},
            {"detailed_balance_defect", diag.detailed_balance_defect},
            {"convergence_defect", diag.convergence_defect}};
}

json base_metadata(const ExperimentConfig& config, const std::string& command) {
    json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["seed"] = config.run.seed;
    meta["config"] = config.to_json();
    return meta;
}

DensityMatrix top_level_state(Index dim) {
    Matrix rho = Matrix::Zero(dim, dim);
    rho(dim - 1, dim - 1) = 1.0;
    return DensityMatrix(rho);
}

Superoperator collision_superop(const CollisionMap& map, bool dephase) {
    if (!dephase) return map.superop;
    return compose(full_dephasing(map.superop.dim()), map.superop);
}

std::vector<double> axis_values(const ExperimentConfig& config, const std::string& name,
                                double fallback) {
    for (const SweepAxis& axis : config.sweep)
        if (axis.name == name) return axis.values();
    return {fallback};
}

void append_state_columns(std::vector<double>& row, const Matrix& rho) {
    row.push_back(rho(0, 0).real());
    row.push_back(rho(1, 1).real());
    row.push_back(rho(0, 1).real());
    row.push_back(rho(0, 1).imag());
    row.push_back(std::abs(rho(0, 1)));
}

}  // namespace

ResultTable cmd_map_check(const ExperimentConfig& config) {
    config.validate();
    const ScatteringModel model = config.build_model();
    const ParticleDensity particle = config.build_particle();
    const CollisionMap map =
        build_map(model, particle, config.backend(), config.quadrature(), config.threads);

    double unitarity_max = 0.0, microrev_max = 0.0, phase_max = 0.0;
    for (double energy : diagnostic_energy_grid(model, particle.beta)) {
        const AmplitudeSet amps = amplitudes(model, energy, config.backend());
        unitarity_max = std::max(unitarity_max, unitarity_defect(amps));
        microrev_max = std::max(microrev_max, microrev_defect(amps));
        phase_max = std::max(phase_max, phase_microrev_defect(amps));
    }

    ResultTable table;
    table.columns = {"trace_defect",           "hermiticity_defect",
                     "choi_min_eigenvalue",    "detailed_balance_defect",
                     "unitarity_defect_max",   "microrev_defect_max",
                     "phase_microrev_defect_max", "convergence_defect"};
    table.add_row({map.diagnostics.trace_defect, map.diagnostics.hermiticity_defect,
                   map.diagnostics.choi_min_eigenvalue,
                   map.diagnostics.detailed_balance_defect, unitarity_max, microrev_max,
                   phase_max, map.diagnostics.convergence_defect});

    table.metadata = base_metadata(config, "map-check");
    table.metadata["map_builds"] = 1;
    table.metadata["diagnostics"] = diagnostics_json(map.diagnostics);
    table.metadata["warnings"] = map.warnings;
    table.metadata["threshold_exceeded"] =
        map.diagnostics.detailed_balance_defect > kMapCheckThreshold;
    return table;
}

ResultTable cmd_trajectory(const ExperimentConfig& config) {
    config.validate();
    const ScatteringModel model = config.build_model();
    const ParticleDensity particle = config.build_particle();
    const CollisionMap map =
        build_map(model, particle, config.backend(), config.quadrature(), config.threads);
    const Superoperator collision = collision_superop(map, config.run.dephase);
    const DensityMatrix rho0 = top_level_state(model.dim());
    const double gamma = config.run.gamma;

    ResultTable table;
    table.columns = {"t",        "gamma_t",  "rho00",     "rho11",
                     "re_rho01", "im_rho01", "abs_rho01", "collisions_so_far"};

    if (config.run.trajectories == 1) {
        const TrajectoryRecord record =
            sample_trajectory(collision, model.energies, model.hbar, gamma,
                              config.run.t_max, config.run.sample_dt, config.run.seed,
                              rho0, config.run.renormalize);
        std::size_t collision_idx = 0;
        for (std::size_t i = 0; i < record.sample_times.size(); ++i) {
            const double t = record.sample_times[i];
            while (collision_idx < record.collision_times.size() &&
                   record.collision_times[collision_idx] <= t)
                ++collision_idx;
            std::vector<double> row{t, gamma * t};
            append_state_columns(row, record.states[i].matrix());
            row.push_back(static_cast<double>(collision_idx));
            table.add_row(std::move(row));
        }
    } else {
        std::vector<double> times;
        for (double t = 0.0; t <= config.run.t_max + 1e-12; t += config.run.sample_dt)
            times.push_back(std::min(t, config.run.t_max));
        const EnsembleMean mean = ensemble_mean(
            collision, model.energies, model.hbar, gamma, times, config.run.trajectories,
            config.run.seed, rho0.matrix(), config.run.renormalize, config.threads);
        for (std::size_t i = 0; i < times.size(); ++i) {
            std::vector<double> row{times[i], gamma * times[i]};
            append_state_columns(row, mean.states[i]);
            row.push_back(mean.mean_collisions[i]);
            table.add_row(std::move(row));
        }
    }

    table.metadata = base_metadata(config, "trajectory");
    table.metadata["map_builds"] = 1;
    table.metadata["diagnostics"] = diagnostics_json(map.diagnostics);
    table.metadata["warnings"] = map.warnings;
    return table;
}

namespace {

const std::vector<std::string> kSteadyColumns = {
    "gamma",     "delta",    "dx",       "rho00",        "rho11", "re_rho01",
    "im_rho01",  "abs_rho01", "residual", "trace_defect", "status"};

std::vector<double> steady_row(const CollisionMap& map, const ScatteringModel& model,
                               double gamma, double delta, double dx, bool dephase) {
    std::vector<double> row{gamma, delta, dx};
    try {
        const Liouvillian liou =
            liouvillian(collision_superop(map, dephase), model.energies, model.hbar, gamma);
        const SteadyStateSolution solution = steady_state(liou, kSteadyTol);
        append_state_columns(row, solution.state.matrix());
        row.push_back(solution.residual);
        row.push_back(map.diagnostics.trace_defect);
        row.push_back(0.0);
    } catch (const std::exception&) {
        row.assign({gamma, delta, dx, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN,
                    map.diagnostics.trace_defect, 2.0});
    }
    return row;
}

}  // namespace

ResultTable cmd_steady(const ExperimentConfig& config) {
    config.validate();
    const ScatteringModel model = config.build_model();
    const ParticleDensity particle = config.build_particle();
    const CollisionMap map =
        build_map(model, particle, config.backend(), config.quadrature(), config.threads);

    std::vector<double> gammas = config.run.gamma_grid;
    if (gammas.empty()) gammas.push_back(config.run.gamma);

    ResultTable table;
    table.columns = kSteadyColumns;
    for (double gamma : gammas)
        table.add_row(steady_row(map, model, gamma, config.model.delta,
                                 config.particle.dx, config.run.dephase));

    table.metadata = base_metadata(config, "steady");
    table.metadata["map_builds"] = 1;
    table.metadata["diagnostics"] = diagnostics_json(map.diagnostics);
    table.metadata["warnings"] = map.warnings;
    return table;
}

ResultTable cmd_sweep(const ExperimentConfig& config) {
    config.validate();
    const std::vector<double> deltas = axis_values(config, "delta", config.model.delta);
    const std::vector<double> dxs = axis_values(config, "dx", config.particle.dx);
    const std::vector<double> gammas = axis_values(config, "gamma", config.run.gamma);

    const std::size_t groups = deltas.size() * dxs.size();
    std::vector<std::vector<std::vector<double>>> group_rows(groups);
    std::vector<json> group_diagnostics(groups);
    std::atomic<int> map_builds{0};

    parallel_for(groups, config.threads, [&](std::size_t g) {
        const double delta = deltas[g / dxs.size()];
        const double dx = dxs[g % dxs.size()];
        auto& rows = group_rows[g];
        try {
            const ScatteringModel model = config.build_model(delta);
            const ParticleDensity particle = config.build_particle(dx);
            const CollisionMap map =
                build_map(model, particle, config.backend(), config.quadrature());
            map_builds.fetch_add(1);
            group_diagnostics[g] = diagnostics_json(map.diagnostics);
            for (double gamma : gammas)
                rows.push_back(steady_row(map, model, gamma, delta, dx, config.run.dephase));
        } catch (const std::exception&) {
            for (double gamma : gammas)
                rows.push_back({gamma, delta, dx, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN,
                                kNaN, 2.0});
        }
    });

    ResultTable table;
    table.columns = kSteadyColumns;
    for (std::size_t g = 0; g < groups; ++g)
        for (auto& row : group_rows[g]) table.add_row(std::move(row));

    table.metadata = base_metadata(config, "sweep");
    table.metadata["map_builds"] = map_builds.load();
    if (!group_diagnostics.empty() && !group_diagnostics.front().is_null())
        table.metadata["diagnostics"] = group_diagnostics.front();
    return table;
}

ResultTable cmd_estimate(const ExperimentConfig& config) {
    config.validate();
    const std::vector<double> deltas = axis_values(config, "delta", config.model.delta);
    const std::vector<double> dxs = axis_values(config, "dx", config.particle.dx);
    const std::vector<double> gammas = axis_values(config, "gamma", config.run.gamma);

    ResultTable table;
    table.columns = {"gamma", "delta", "dx", "omega", "estimate"};
    for (double delta : deltas)
        for (double dx : dxs)
            for (double gamma : gammas) {
                const double omega = delta / config.model.hbar;
                const double value =
                    coherence_estimate(gamma, omega, config.particle.beta,
                                       config.model.mass, dx, config.estimate.s_const);
                table.add_row({gamma, delta, dx, omega, value});
            }

    table.metadata = base_metadata(config, "estimate");
    table.metadata["map_builds"] = 0;
    return table;
}

}  // namespace colsim::cli
