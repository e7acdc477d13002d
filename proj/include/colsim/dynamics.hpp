// dynamics.hpp — Evolution engines: dephased concatenation, Poissonian trajectories,
// master equation, steady state and its small-rate expansion

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colsim/collision_map.hpp"
#include "colsim/linalg.hpp"
#include "colsim/scattering.hpp"

namespace colsim {

// Generator of the collision-averaged dynamics: free phases plus rate × (map − id),
// acting on the row-major vectorized state.
struct Liouvillian {
    Matrix generator;
    double gamma = 0.0;
    double hbar = 1.0;
    RealVector energies;
};

struct SolverInfo {
    double condition = 0.0;
    std::string method;        // "lu" or "svd"
    double min_eigenvalue = 0.0;
    bool negative_flagged = false;
};

struct SteadyStateSolution {
    DensityMatrix state;
    double residual = 0.0;
    SolverInfo solver_info;
};

struct PerturbativeSolution {
    DensityMatrix rho0;  // diagonal zeroth order
    Matrix rho1;         // traceless Hermitian first order
    int order = 1;
};

struct TrajectoryRecord {
    std::vector<double> sample_times;     // grid and collision instants, ascending
    std::vector<DensityMatrix> states;    // parallel to sample_times
    std::vector<double> collision_times;
    std::uint64_t seed = 0;
};

// diag(e^{−βe_j})/Z.
DensityMatrix gibbs_state(const RealVector& energies, double beta);

// Projector onto the diagonal in the energy eigenbasis.
Superoperator full_dephasing(Index dim);

// States (D·map)^k ρ0 for k = 1..n. Requires map trace defect ≤ 1e−6.
std::vector<DensityMatrix> iterate_dephased(const CollisionMap& map,
                                            const DensityMatrix& rho0, int n);

// Single realization of the Poisson collision process: free phases between
// collisions, the collision superoperator at exponentially distributed
// instants. States are recorded on the uniform grid and after every collision.
TrajectoryRecord sample_trajectory(const Superoperator& collision,
                                   const RealVector& energies, double hbar,
                                   double gamma, double t_max, double sample_dt,
                                   std::uint64_t seed, const DensityMatrix& rho0,
                                   bool renormalize = false);

// States (plain matrices) and collision counts of one trajectory stream,
// evaluated at the given times.
struct SampledTrajectory {
    std::vector<Matrix> states;
    std::vector<std::size_t> collision_counts;
};

SampledTrajectory trajectory_states_at(const Superoperator& collision,
                                       const RealVector& energies, double hbar,
                                       double gamma, const std::vector<double>& times,
                                       std::uint64_t base_seed, std::uint64_t stream,
                                       const Matrix& rho0, bool renormalize = false);

// Per-trajectory samples, [trajectory][time]; statistics are left to the
// caller so reduction order stays fixed.
std::vector<SampledTrajectory> ensemble_states(
    const Superoperator& collision, const RealVector& energies, double hbar,
    double gamma, const std::vector<double>& times, int trajectories,
    std::uint64_t base_seed, const Matrix& rho0, bool renormalize = false,
    int threads = 1);

// Mean over `trajectories` streams, reduced in stream order.
struct EnsembleMean {
    std::vector<Matrix> states;
    std::vector<double> mean_collisions;
};

EnsembleMean ensemble_mean(const Superoperator& collision, const RealVector& energies,
                           double hbar, double gamma, const std::vector<double>& times,
                           int trajectories, std::uint64_t base_seed, const Matrix& rho0,
                           bool renormalize = false, int threads = 1);

Liouvillian liouvillian(const Superoperator& collision, const RealVector& energies,
                        double hbar, double gamma);
Liouvillian liouvillian(const CollisionMap& map, const ScatteringModel& model,
                        double gamma);

// Null vector of the generator under the unit-trace constraint. Direct solve
// with the last row replaced by the trace functional; singular-value fallback
// when the conditioning degrades.
SteadyStateSolution steady_state(const Liouvillian& liou, double tol = 1e-10);

// exp(t·generator) ρ0 on the time grid, by eigendecomposition of the generator
// with an adaptive embedded Runge–Kutta fallback for ill-conditioned
// eigenbases. The fallback can be forced to cross-check the two routes.
enum class EvolveMethod { automatic, integrator };

std::vector<DensityMatrix> evolve_master(const Liouvillian& liou,
                                         const DensityMatrix& rho0,
                                         const std::vector<double>& t_grid,
                                         EvolveMethod method = EvolveMethod::automatic);

// Zeroth order (thermal) plus first order in the collision rate.
PerturbativeSolution perturbative_steady(const CollisionMap& map,
                                         const ScatteringModel& model, double beta);

// Closed-form magnitude scale of the steady-state coherence,
// s²(Γ/ω)e^{−βmΔx²ω²/2}.
double coherence_estimate(double gamma, double omega, double beta, double mass,
                          double dx, double s_const);

}  // namespace colsim
