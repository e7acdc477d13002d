// commands.hpp — Experiment orchestration behind the CLI subcommands

#pragma once

#include "colsim/config.hpp"
#include "colsim/result_table.hpp"

namespace colsim::cli {

inline constexpr const char* kVersion = "0.1.0";

// Detailed-balance threshold above which map-check reports failure.
inline constexpr double kMapCheckThreshold = 1e-6;

// Map quality diagnostics plus amplitude defects over the energy grid.
// metadata["threshold_exceeded"] drives the nonzero exit status.
ResultTable cmd_map_check(const ExperimentConfig& config);

// Single-realization or ensemble-mean time series of the bombarded system.
ResultTable cmd_trajectory(const ExperimentConfig& config);

// Steady state of the collision-averaged dynamics at one or more rates.
ResultTable cmd_steady(const ExperimentConfig& config);

// Cartesian sweep over (delta, dx, gamma); the map is rebuilt only when
// (delta, dx) change.
ResultTable cmd_sweep(const ExperimentConfig& config);

// Closed-form coherence estimate over the same sweep grid.
ResultTable cmd_estimate(const ExperimentConfig& config);

}  // namespace colsim::cli
