// scattering.hpp — Collision Hamiltonian and multichannel transmission/reflection amplitudes

#pragma once

#include <string>
#include <vector>

#include "colsim/linalg.hpp"

namespace colsim {

enum class Backend { approx, exact };

Backend backend_from_string(const std::string& name);
std::string to_string(Backend backend);

// System energies, coupling operator (in the system eigenbasis), square
// barrier of length L, particle mass and ħ. Immutable; the full-Hamiltonian
// eigensystem is precomputed at construction.
struct ScatteringModel {
    ScatteringModel(RealVector energies_in, HermitianOperator coupling_in,
                    double barrier_length_in, double mass_in, double hbar_in);

    // Qubit with levels ∓Δ/2 and coupling λ(σx + σy).
    static ScatteringModel qubit(double delta, double lambda, double barrier_length,
                                 double mass, double hbar);

    RealVector energies;         // strictly ascending
    HermitianOperator coupling;  // V
    double barrier_length;       // L > 0
    double mass;                 // m > 0
    double hbar;                 // ħ > 0

    Matrix h_total;               // diag(energies) + V
    Eigendecomposition total_eig; // of h_total
    double e_max;                 // max eigenvalue over both H_S and H_tot

    Index dim() const { return energies.size(); }
};

// Transmission s⁽⁺⁾ and reflection s⁽⁻⁾ amplitude matrices at total energy E.
// Rows/columns of closed channels are zero; open_channels flags E ≥ e_j.
struct AmplitudeSet {
    double energy = 0.0;
    Matrix transmission;
    Matrix reflection;
    std::vector<bool> open_channels;
};

// k_j = sqrt(2m(E − e_j))/ħ; throws std::domain_error for a closed channel.
double channel_wavevector(const ScatteringModel& model, double energy, Index channel);

// High-energy approximation: identity below e_max; above, the phase-corrected
// matrix element of e^{iLK(E)} with K(E) = sqrt(2m(E − H_tot))/ħ. Reflection
// is neglected entirely.
AmplitudeSet approx_amplitudes(const ScatteringModel& model, double energy);

// Exact square-barrier solution: plane waves in the outer channels matched to
// eigenmodes of H_tot inside [0, L]; amplitudes flux-normalized so that
// open-channel unitarity holds.
AmplitudeSet exact_amplitudes(const ScatteringModel& model, double energy);

AmplitudeSet amplitudes(const ScatteringModel& model, double energy, Backend backend);

// ‖Σ_α s⁽α⁾†s⁽α⁾ − I‖_max over the open-channel block.
double unitarity_defect(const AmplitudeSet& amps);
// max over open channels and α of | |s_{j'j}|² − |s_{jj'}|² |.
double microrev_defect(const AmplitudeSet& amps);
// max over open channels and α of |s_{j'j} − s_{jj'}| (reported, not asserted).
double phase_microrev_defect(const AmplitudeSet& amps);

// 100 geometrically spaced energies on [e_max, e_max + 20/β] for the
// amplitude diagnostics (linear fallback when e_max ≤ 0).
std::vector<double> diagnostic_energy_grid(const ScatteringModel& model, double beta,
                                           int count = 100);

// Energies where amplitudes have square-root kinks (channel thresholds, the
// eigenvalues of H_tot, and e_max); used as quadrature breakpoints.
std::vector<double> amplitude_thresholds(const ScatteringModel& model);

}  // namespace colsim
