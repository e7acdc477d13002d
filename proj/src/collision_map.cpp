// collision_map.cpp — Quadrature construction of the collision superoperator

#include "colsim/collision_map.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "colsim/parallel.hpp"
#include "colsim/quadrature.hpp"

namespace colsim {

namespace {

constexpr int kPanelOrder = 16;
constexpr double kConvergenceWarn = 1e-6;
constexpr double kChoiWarn = -1e-6;

int panel_budget(int nodes) { return std::max(1, nodes / kPanelOrder); }

struct EntryIndices {
    Index j, k, jp, kp;
};

EntryIndices unpack_entry(Index flat, Index d) {
    EntryIndices e;
    e.kp = flat % d;
    flat /= d;
    e.jp = flat % d;
    flat /= d;
    e.k = flat % d;
    e.j = flat / d;
    return e;
}

// Integration plan for one tensor entry: domain [p_inf, p_cut] split at the
// momenta where either amplitude argument crosses a scattering threshold.
struct EntryPlan {
    double p_inf = 0.0;
    double p_cut = 0.0;
    double e_j = 0.0;
    double e_kp = 0.0;
    double delta_j = 0.0;  // Δ_{j'j}
    double delta_k = 0.0;  // Δ_{k'k}
    std::vector<double> breakpoints;
};

EntryPlan make_entry_plan(const ScatteringModel& model, const ParticleDensity& particle,
                          double p_cut_tolerance, const EntryIndices& idx,
                          const std::vector<double>& thresholds) {
    EntryPlan plan;
    const double m = model.mass;
    plan.e_j = model.energies(idx.j);
    plan.e_kp = model.energies(idx.kp);
    plan.delta_j = model.energies(idx.jp) - plan.e_j;
    plan.delta_k = plan.e_kp - model.energies(idx.k);
    const double delta = plan.delta_j - plan.delta_k;

    plan.p_inf = std::sqrt(2.0 * m * std::max({0.0, plan.delta_j, delta}));
    const double p_cut_base =
        std::sqrt(2.0 * m * std::log(1.0 / p_cut_tolerance) / particle.beta);
    // Shift the cutoff so the outgoing momentum π(p_cut) also reaches the
    // effusion tail.
    plan.p_cut = std::sqrt(p_cut_base * p_cut_base + 2.0 * m * std::max(0.0, delta));

    for (double threshold : thresholds) {
        // E_p + e_j = threshold
        const double arg1 = 2.0 * m * (threshold - plan.e_j);
        if (arg1 > 0.0) plan.breakpoints.push_back(std::sqrt(arg1));
        // E_p − Δ_{j'j} + e_{k'} = threshold
        const double arg2 = 2.0 * m * (threshold + plan.delta_j - plan.e_kp);
        if (arg2 > 0.0) plan.breakpoints.push_back(std::sqrt(arg2));
    }
    return plan;
}

Complex integrate_entry(const ScatteringModel& model, const ParticleDensity& particle,
                        Backend backend, const EntryIndices& idx, const EntryPlan& plan,
                        int panels) {
    if (!(plan.p_cut > plan.p_inf)) return Complex{};
    const double m = model.mass;
    const double delta = plan.delta_j - plan.delta_k;

    const double e_min = model.energies(0);
    const auto integrand = [&](double p) -> Complex {
        const double pi_p = std::sqrt(std::max(0.0, p * p - 2.0 * m * delta));
        if (pi_p <= 0.0) return Complex{};
        const double e_p = p * p / (2.0 * m);
        const double energy_ket = e_p + plan.e_j;
        const double energy_bra = e_p - plan.delta_j + plan.e_kp;
        // Within rounding of the bottom threshold every amplitude is weighted
        // to zero by the flux and effusion factors.
        if (energy_ket <= e_min || energy_bra <= e_min) return Complex{};
        const AmplitudeSet amps_ket = amplitudes(model, energy_ket, backend);
        const AmplitudeSet amps_bra =
            energy_bra == energy_ket ? amps_ket : amplitudes(model, energy_bra, backend);
        const Complex channel_sum =
            amps_ket.transmission(idx.jp, idx.j) *
                std::conj(amps_bra.transmission(idx.kp, idx.k)) +
            amps_ket.reflection(idx.jp, idx.j) *
                std::conj(amps_bra.reflection(idx.kp, idx.k));
        return rho_u(particle, p, pi_p) * std::sqrt(p / pi_p) * channel_sum;
    };

    const std::vector<Segment> segments =
        plan_segments(plan.p_inf, plan.p_cut, plan.breakpoints, panels);
    return integrate_segments(segments, integrand, kPanelOrder);
}

double trace_defect_of(const Superoperator& s) {
    const Index d = s.dim();
    double defect = 0.0;
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k) {
            Complex column_sum{};
            for (Index jp = 0; jp < d; ++jp) column_sum += s.entry(j, k, jp, jp);
            const Complex expected = (j == k) ? 1.0 : 0.0;
            defect = std::max(defect, std::abs(column_sum - expected));
        }
    return defect;
}

double hermiticity_defect_of(const Superoperator& s) {
    const Index d = s.dim();
    double defect = 0.0;
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k)
            for (Index jp = 0; jp < d; ++jp)
                for (Index kp = 0; kp < d; ++kp)
                    defect = std::max(defect,
                                      std::abs(s.entry(j, k, jp, kp) -
                                               std::conj(s.entry(k, j, kp, jp))));
    return defect;
}

void symmetrize_hermiticity_pairs(Superoperator& s) {
    const Index d = s.dim();
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k)
            for (Index jp = 0; jp < d; ++jp)
                for (Index kp = 0; kp < d; ++kp) {
                    if (j * d * d * d + k * d * d + jp * d + kp >
                        k * d * d * d + j * d * d + kp * d + jp)
                        continue;  // visit each pair once
                    const Complex a = s.entry(j, k, jp, kp);
                    const Complex b = std::conj(s.entry(k, j, kp, jp));
                    const Complex mean = 0.5 * (a + b);
                    s.entry(j, k, jp, kp) = mean;
                    s.entry(k, j, kp, jp) = std::conj(mean);
                }
}

double choi_min_eigenvalue_of(const Superoperator& s) {
    const Index d = s.dim();
    Matrix c(d * d, d * d);
    for (Index j = 0; j < d; ++j)
        for (Index jp = 0; jp < d; ++jp)
            for (Index k = 0; k < d; ++k)
                for (Index kp = 0; kp < d; ++kp)
                    c(j * d + jp, k * d + kp) = s.entry(j, k, jp, kp);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(c), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

RealMatrix population_block(const Superoperator& s) {
    const Index d = s.dim();
    RealMatrix probs(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index jp = 0; jp < d; ++jp) probs(j, jp) = s.entry(j, j, jp, jp).real();
    return probs;
}

double db_defect_of(const Superoperator& s, const RealVector& energies, double beta) {
    return detailed_balance_defect(population_block(s), energies, beta);
}

}  // namespace

ParticleDensity::ParticleDensity(double beta_in, double mass_in, double dx_in,
                                 double x0_in, double hbar_in)
    : beta(beta_in), mass(mass_in), dx(dx_in), x0(x0_in), hbar(hbar_in) {
    if (!(beta > 0)) throw std::invalid_argument("ParticleDensity: beta must be positive");
    if (!(mass > 0)) throw std::invalid_argument("ParticleDensity: mass must be positive");
    if (!(dx > 0)) throw std::invalid_argument("ParticleDensity: dx must be positive");
    if (!(hbar > 0)) throw std::invalid_argument("ParticleDensity: hbar must be positive");
    if (4.0 * M_PI * dx * std::sqrt(mass / beta) < hbar)
        throw std::invalid_argument(
            "ParticleDensity: phase-space validity condition 4*pi*dx*sqrt(m/beta) >= hbar "
            "violated");
}

void QuadratureSpec::validate() const {
    if (nodes < 16) throw std::invalid_argument("QuadratureSpec: nodes must be >= 16");
    if (!(p_cut_tolerance > 0.0) || !(p_cut_tolerance < 1.0))
        throw std::invalid_argument("QuadratureSpec: p_cut_tolerance must lie in (0, 1)");
}

double effusion_pdf(const ParticleDensity& particle, double p) {
    if (p < 0) throw std::domain_error("effusion_pdf: momentum must be non-negative");
    return particle.beta * p / particle.mass *
           std::exp(-particle.beta * p * p / (2.0 * particle.mass));
}

Complex rho_u(const ParticleDensity& particle, double p, double p_prime) {
    const double mean = 0.5 * (p + p_prime);
    if (mean < 0) throw std::domain_error("rho_u: mean momentum must be non-negative");
    const double diff = p - p_prime;
    const double gauss =
        std::exp(-particle.dx * particle.dx * diff * diff / (2.0 * particle.hbar * particle.hbar));
    const Complex phase = std::exp(Complex(0.0, -diff * particle.x0 / particle.hbar));
    return effusion_pdf(particle, mean) * gauss * phase;
}

CollisionMap build_map(const ScatteringModel& model, const ParticleDensity& particle,
                       Backend backend, const QuadratureSpec& quad, int threads) {
    quad.validate();
    const Index d = model.dim();
    const std::vector<double> thresholds = amplitude_thresholds(model);
    const int panels = panel_budget(quad.nodes);

    Superoperator superop(d);
    double convergence_defect = 0.0;
    std::vector<Complex> values(d * d * d * d);
    std::vector<double> entry_changes(d * d * d * d, 0.0);

    parallel_for(static_cast<std::size_t>(d * d * d * d), threads, [&](std::size_t flat) {
        const EntryIndices idx = unpack_entry(static_cast<Index>(flat), d);
        const EntryPlan plan =
            make_entry_plan(model, particle, quad.p_cut_tolerance, idx, thresholds);
        const Complex coarse = integrate_entry(model, particle, backend, idx, plan, panels);
        const Complex fine =
            integrate_entry(model, particle, backend, idx, plan, 2 * panels);
        values[flat] = coarse;
        entry_changes[flat] = std::abs(coarse - fine);
    });

    for (Index flat = 0; flat < d * d * d * d; ++flat) {
        const EntryIndices idx = unpack_entry(flat, d);
        superop.entry(idx.j, idx.k, idx.jp, idx.kp) = values[flat];
        convergence_defect = std::max(convergence_defect, entry_changes[flat]);
    }

    if (!superop.matrix().allFinite())
        throw std::runtime_error("build_map: non-finite tensor entry");

    MapDiagnostics diag;
    diag.hermiticity_defect = hermiticity_defect_of(superop);
    symmetrize_hermiticity_pairs(superop);
    diag.convergence_defect = convergence_defect;
    diag.trace_defect = trace_defect_of(superop);
    diag.choi_min_eigenvalue = choi_min_eigenvalue_of(superop);
    diag.detailed_balance_defect = db_defect_of(superop, model.energies, particle.beta);

    std::vector<std::string> warnings;
    if (convergence_defect > kConvergenceWarn)
        warnings.push_back("quadrature not converged: entry change " +
                           std::to_string(convergence_defect) + " under node doubling");
    if (diag.choi_min_eigenvalue < kChoiWarn)
        warnings.push_back("map is not completely positive: Choi eigenvalue " +
                           std::to_string(diag.choi_min_eigenvalue));
    return CollisionMap{std::move(superop), diag, model.energies, particle.beta,
                        std::move(warnings)};
}

RealMatrix transition_probs_energy(const ScatteringModel& model, double beta,
                                   Backend backend, const QuadratureSpec& quad) {
    quad.validate();
    if (!(beta > 0))
        throw std::invalid_argument("transition_probs_energy: beta must be positive");
    const Index d = model.dim();
    const std::vector<double> thresholds = amplitude_thresholds(model);
    const int panels = panel_budget(quad.nodes);
    const double energy_cut =
        model.energies(d - 1) + std::log(1.0 / quad.p_cut_tolerance) / beta;

    RealMatrix probs(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index jp = 0; jp < d; ++jp) {
            const double lower = std::max(model.energies(j), model.energies(jp));
            const auto integrand = [&](double energy) -> double {
                const AmplitudeSet amps = amplitudes(model, energy, backend);
                const double weight =
                    std::norm(amps.transmission(jp, j)) + std::norm(amps.reflection(jp, j));
                return std::exp(-beta * (energy - model.energies(j))) * weight;
            };
            const std::vector<Segment> segments =
                plan_segments(lower, energy_cut, thresholds, panels);
            probs(j, jp) = beta * integrate_segments(segments, integrand, kPanelOrder);
        }
    return probs;
}

double detailed_balance_defect(const RealMatrix& probs, const RealVector& energies,
                               double beta) {
    const Index d = probs.rows();
    if (probs.cols() != d || energies.size() != d)
        throw std::invalid_argument("detailed_balance_defect: dimension mismatch");
    for (Index j = 0; j < d; ++j)
        for (Index jp = 0; jp < d; ++jp)
            if (probs(j, jp) < -1e-12 || probs(j, jp) > 1.0 + 1e-9)
                throw std::domain_error("detailed_balance_defect: entry outside [0, 1]");
    // Work with weights relative to the ground state so large β stays finite.
    const double e0 = energies.minCoeff();
    double defect = 0.0;
    for (Index j = 0; j < d; ++j)
        for (Index jp = 0; jp < d; ++jp) {
            const double forward = std::exp(-beta * (energies(j) - e0)) * probs(j, jp);
            const double backward = std::exp(-beta * (energies(jp) - e0)) * probs(jp, j);
            defect = std::max(defect, std::abs(forward - backward));
        }
    return defect;
}

CollisionMap make_collision_map(Superoperator superop, RealVector energies, double beta) {
    if (superop.dim() != energies.size())
        throw std::invalid_argument("make_collision_map: dimension mismatch");
    MapDiagnostics diag;
    diag.hermiticity_defect = hermiticity_defect_of(superop);
    diag.trace_defect = trace_defect_of(superop);
    diag.choi_min_eigenvalue = choi_min_eigenvalue_of(superop);
    diag.detailed_balance_defect = db_defect_of(superop, energies, beta);
    return CollisionMap{std::move(superop), diag, std::move(energies), beta, {}};
}

MapDiagnostics map_diagnostics(const CollisionMap& map) {
    MapDiagnostics diag;
    diag.trace_defect = trace_defect_of(map.superop);
    diag.hermiticity_defect = map.diagnostics.hermiticity_defect;
    diag.choi_min_eigenvalue = choi_min_eigenvalue_of(map.superop);
    diag.detailed_balance_defect = db_defect_of(map.superop, map.energies, map.beta);
    diag.convergence_defect = map.diagnostics.convergence_defect;
    return diag;
}

}  // namespace colsim
