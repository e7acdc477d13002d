// collision_map.hpp — Collision superoperator from momentum quadrature against the incident state

#pragma once

#include <string>
#include <vector>

#include "colsim/linalg.hpp"
#include "colsim/scattering.hpp"

namespace colsim {

// Incident particle: effusion momentum distribution at inverse temperature β
// localized around x0 with spatial dispersion Δx.
struct ParticleDensity {
    ParticleDensity(double beta_in, double mass_in, double dx_in, double x0_in,
                    double hbar_in);

    double beta;
    double mass;
    double dx;
    double x0;
    double hbar;
};

struct QuadratureSpec {
    int nodes = 400;               // total Gauss–Legendre nodes per tensor entry
    double p_cut_tolerance = 1e-14;  // effusion weight kept above this level

    void validate() const;
};

struct MapDiagnostics {
    double trace_defect = 0.0;
    double hermiticity_defect = 0.0;   // before pair symmetrization
    double choi_min_eigenvalue = 0.0;
    double detailed_balance_defect = 0.0;
    double convergence_defect = 0.0;   // max entry change under node doubling
};

struct CollisionMap {
    Superoperator superop;
    MapDiagnostics diagnostics;
    RealVector energies;
    double beta = 0.0;
    std::vector<std::string> warnings;
};

// μ_eff(p) = (βp/m) e^{−βp²/(2m)}; throws std::domain_error for p < 0.
double effusion_pdf(const ParticleDensity& particle, double p);

// Momentum-representation density matrix of the incident particle.
Complex rho_u(const ParticleDensity& particle, double p, double p_prime);

// Momentum quadrature of the per-collision superoperator, with the
// Hermiticity pair symmetrization applied and all diagnostics filled.
CollisionMap build_map(const ScatteringModel& model, const ParticleDensity& particle,
                       Backend backend, const QuadratureSpec& quad = {},
                       int threads = 1);

// Energy-representation transition probabilities
// P_{j→j'} = β e^{βe_j} Σ_α ∫ dε e^{−βε} |s_{j'j}(ε)|²; the independent
// oracle for the population block of build_map.
RealMatrix transition_probs_energy(const ScatteringModel& model, double beta,
                                   Backend backend, const QuadratureSpec& quad = {});

// max_{j,j'} |e^{−βe_j} P_{j→j'} − e^{−βe_{j'}} P_{j'→j}|.
double detailed_balance_defect(const RealMatrix& probs, const RealVector& energies,
                               double beta);

// Wraps an existing superoperator with freshly computed diagnostics.
CollisionMap make_collision_map(Superoperator superop, RealVector energies, double beta);

// Recomputes the recomputable diagnostics of a map; the pre-symmetrization
// hermiticity and convergence values are carried over from the build record.
MapDiagnostics map_diagnostics(const CollisionMap& map);

}  // namespace colsim
