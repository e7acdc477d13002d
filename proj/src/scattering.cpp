// scattering.cpp — Approximate and exact multichannel square-barrier amplitudes

#include "colsim/scattering.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace colsim {

namespace {

constexpr Complex kImagUnit{0.0, 1.0};

// Complex wavevector sqrt(2m(E − e))/ħ; positive imaginary part for a closed
// channel so that e^{ikx} decays to the right.
Complex complex_wavevector(double energy, double threshold, double mass, double hbar) {
    const double arg = 2.0 * mass * (energy - threshold);
    if (arg >= 0.0) return Complex(std::sqrt(arg) / hbar, 0.0);
    return Complex(0.0, std::sqrt(-arg) / hbar);
}

Complex cos_kx(Complex q, double x) { return std::cos(q * x); }

// sin(qx)/q, analytic in q² (→ x as q → 0).
Complex sinc_kx(Complex q, double x) {
    if (std::abs(q) * std::abs(x) < 1e-8) {
        const Complex qx = q * x;
        return x * (1.0 - qx * qx / 6.0);
    }
    return std::sin(q * x) / q;
}

}  // namespace

Backend backend_from_string(const std::string& name) {
    if (name == "approx") return Backend::approx;
    if (name == "exact") return Backend::exact;
    throw std::invalid_argument("backend must be 'approx' or 'exact', got '" + name + "'");
}

std::string to_string(Backend backend) {
    return backend == Backend::approx ? "approx" : "exact";
}

ScatteringModel::ScatteringModel(RealVector energies_in, HermitianOperator coupling_in,
                                 double barrier_length_in, double mass_in, double hbar_in)
    : energies(std::move(energies_in)),
      coupling(std::move(coupling_in)),
      barrier_length(barrier_length_in),
      mass(mass_in),
      hbar(hbar_in) {
    const Index d = energies.size();
    if (d < 1) throw std::invalid_argument("ScatteringModel: need at least one level");
    if (coupling.dim() != d)
        throw std::invalid_argument("ScatteringModel: coupling dimension mismatch");
    for (Index j = 0; j + 1 < d; ++j)
        if (!(energies(j) < energies(j + 1)))
            throw std::invalid_argument("ScatteringModel: energies must be strictly ascending");
    if (!(barrier_length > 0)) throw std::invalid_argument("ScatteringModel: barrier_length must be positive");
    if (!(mass > 0)) throw std::invalid_argument("ScatteringModel: mass must be positive");
    if (!(hbar > 0)) throw std::invalid_argument("ScatteringModel: hbar must be positive");

    Matrix h = coupling.matrix();
    for (Index j = 0; j < d; ++j) h(j, j) += energies(j);
    h_total = h;
    total_eig = eig_hermitian(HermitianOperator(h_total));
    e_max = std::max(energies(d - 1), total_eig.values(d - 1));
}

ScatteringModel ScatteringModel::qubit(double delta, double lambda, double barrier_length,
                                       double mass, double hbar) {
    if (!(delta > 0)) throw std::invalid_argument("qubit: delta must be positive");
    RealVector energies(2);
    energies << -0.5 * delta, 0.5 * delta;
    Matrix v(2, 2);
    v << 0.0, lambda * Complex(1.0, -1.0), lambda * Complex(1.0, 1.0), 0.0;
    return ScatteringModel(energies, HermitianOperator(v), barrier_length, mass, hbar);
}

double channel_wavevector(const ScatteringModel& model, double energy, Index channel) {
    if (channel < 0 || channel >= model.dim())
        throw std::invalid_argument("channel_wavevector: channel out of range");
    const double gap = energy - model.energies(channel);
    if (gap < 0)
        throw std::domain_error("channel_wavevector: channel closed at this energy");
    return std::sqrt(2.0 * model.mass * gap) / model.hbar;
}

AmplitudeSet approx_amplitudes(const ScatteringModel& model, double energy) {
    if (!std::isfinite(energy))
        throw std::invalid_argument("approx_amplitudes: energy must be finite");
    const Index d = model.dim();
    AmplitudeSet amps;
    amps.energy = energy;
    amps.reflection = Matrix::Zero(d, d);
    amps.open_channels.resize(d);
    for (Index j = 0; j < d; ++j) amps.open_channels[j] = energy >= model.energies(j);

    if (energy < model.e_max) {
        amps.transmission = Matrix::Identity(d, d);
        return amps;
    }

    const double m = model.mass;
    const double hbar = model.hbar;
    const double L = model.barrier_length;
    Vector phase(d);
    for (Index n = 0; n < d; ++n) {
        const double q = std::sqrt(2.0 * m * (energy - model.total_eig.values(n))) / hbar;
        phase(n) = std::exp(kImagUnit * (L * q));
    }
    const Matrix barrier =
        model.total_eig.vectors * phase.asDiagonal() * model.total_eig.vectors.adjoint();

    amps.transmission = Matrix(d, d);
    for (Index jp = 0; jp < d; ++jp)
        for (Index j = 0; j < d; ++j) {
            const double kj = channel_wavevector(model, energy, j);
            const double kjp = channel_wavevector(model, energy, jp);
            amps.transmission(jp, j) =
                std::exp(-kImagUnit * (0.5 * L * (kjp + kj))) * barrier(jp, j);
        }
    return amps;
}

AmplitudeSet exact_amplitudes(const ScatteringModel& model, double energy) {
    const Index d = model.dim();
    if (!(energy > model.energies(0)))
        throw std::domain_error("exact_amplitudes: no open channel at this energy");

    const double m = model.mass;
    const double hbar = model.hbar;
    const double L = model.barrier_length;

    std::vector<Complex> k(d);   // outer channel wavevectors
    std::vector<Complex> q(d);   // interior mode wavevectors
    for (Index j = 0; j < d; ++j) {
        k[j] = complex_wavevector(energy, model.energies(j), m, hbar);
        q[j] = complex_wavevector(energy, model.total_eig.values(j), m, hbar);
    }
    const Matrix& w = model.total_eig.vectors;

    // Unknown layout: [r_0..r_{d-1}, t_0..t_{d-1}, c_0..c_{d-1}, d_0..d_{d-1}],
    // with the interior wave Σ_n (c_n cos(q_n x) + d_n sin(q_n x)/q_n) w_n and
    // the transmitted wave t_j e^{i k_j (x − L)}.
    Matrix a = Matrix::Zero(4 * d, 4 * d);
    Matrix rhs = Matrix::Zero(4 * d, d);
    for (Index j = 0; j < d; ++j) {
        // Value at x = 0: δ_{jj0} + r_j − Σ_n W_{jn} c_n = 0.
        a(j, j) = 1.0;
        for (Index n = 0; n < d; ++n) a(j, 2 * d + n) = -w(j, n);
        // Derivative at x = 0: i k_j δ_{jj0} − i k_j r_j − Σ_n W_{jn} d_n = 0.
        a(d + j, j) = -kImagUnit * k[j];
        for (Index n = 0; n < d; ++n) a(d + j, 3 * d + n) = -w(j, n);
        // Value at x = L: t_j − Σ_n W_{jn}(c_n cos + d_n sinc) = 0.
        a(2 * d + j, d + j) = 1.0;
        for (Index n = 0; n < d; ++n) {
            a(2 * d + j, 2 * d + n) = -w(j, n) * cos_kx(q[n], L);
            a(2 * d + j, 3 * d + n) = -w(j, n) * sinc_kx(q[n], L);
        }
        // Derivative at x = L: i k_j t_j − Σ_n W_{jn}(−c_n q_n sin + d_n cos) = 0.
        a(3 * d + j, d + j) = kImagUnit * k[j];
        for (Index n = 0; n < d; ++n) {
            a(3 * d + j, 2 * d + n) = w(j, n) * q[n] * q[n] * sinc_kx(q[n], L);
            a(3 * d + j, 3 * d + n) = -w(j, n) * cos_kx(q[n], L);
        }
    }
    for (Index j0 = 0; j0 < d; ++j0) {
        if (energy < model.energies(j0)) continue;  // closed incident channel
        rhs(j0, j0) = -1.0;                      // incident value moved right
        rhs(d + j0, j0) = -kImagUnit * k[j0];    // incident derivative moved right
    }

    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible())
        throw std::runtime_error("exact_amplitudes: singular matching system at E = " +
                                 std::to_string(energy));
    const Matrix solution = lu.solve(rhs);

    AmplitudeSet amps;
    amps.energy = energy;
    amps.transmission = Matrix::Zero(d, d);
    amps.reflection = Matrix::Zero(d, d);
    amps.open_channels.resize(d);
    for (Index j = 0; j < d; ++j) amps.open_channels[j] = energy >= model.energies(j);

    for (Index j0 = 0; j0 < d; ++j0) {
        if (!amps.open_channels[j0] || k[j0].real() <= 0.0) continue;
        for (Index jp = 0; jp < d; ++jp) {
            if (!amps.open_channels[jp] || k[jp].real() <= 0.0) continue;
            const double flux = std::sqrt(k[jp].real() / k[j0].real());
            const Complex r = solution(jp, j0);
            const Complex t = solution(d + jp, j0);
            amps.reflection(jp, j0) = flux * r;
            // Reference the transmitted amplitude to e^{i k x} so that free
            // propagation gives exactly 1.
            amps.transmission(jp, j0) =
                flux * t * std::exp(-kImagUnit * (k[jp].real() * L));
        }
    }
    return amps;
}

AmplitudeSet amplitudes(const ScatteringModel& model, double energy, Backend backend) {
    return backend == Backend::approx ? approx_amplitudes(model, energy)
                                      : exact_amplitudes(model, energy);
}

namespace {

std::vector<Index> open_indices(const AmplitudeSet& amps) {
    std::vector<Index> open;
    for (size_t j = 0; j < amps.open_channels.size(); ++j)
        if (amps.open_channels[j]) open.push_back(static_cast<Index>(j));
    return open;
}

}  // namespace

double unitarity_defect(const AmplitudeSet& amps) {
    const auto open = open_indices(amps);
    const Matrix gram = amps.transmission.adjoint() * amps.transmission +
                        amps.reflection.adjoint() * amps.reflection;
    double defect = 0.0;
    for (Index j : open)
        for (Index l : open) {
            const Complex expected = (j == l) ? 1.0 : 0.0;
            defect = std::max(defect, std::abs(gram(j, l) - expected));
        }
    return defect;
}

double microrev_defect(const AmplitudeSet& amps) {
    const auto open = open_indices(amps);
    double defect = 0.0;
    for (const Matrix* s : {&amps.transmission, &amps.reflection})
        for (Index j : open)
            for (Index l : open)
                defect = std::max(defect, std::abs(std::norm((*s)(j, l)) -
                                                   std::norm((*s)(l, j))));
    return defect;
}

double phase_microrev_defect(const AmplitudeSet& amps) {
    const auto open = open_indices(amps);
    double defect = 0.0;
    for (const Matrix* s : {&amps.transmission, &amps.reflection})
        for (Index j : open)
            for (Index l : open)
                defect = std::max(defect, std::abs((*s)(j, l) - (*s)(l, j)));
    return defect;
}

std::vector<double> diagnostic_energy_grid(const ScatteringModel& model, double beta,
                                           int count) {
    if (!(beta > 0)) throw std::invalid_argument("diagnostic_energy_grid: beta must be positive");
    if (count < 2) throw std::invalid_argument("diagnostic_energy_grid: need at least 2 points");
    const double lo = model.e_max;
    const double hi = model.e_max + 20.0 / beta;
    std::vector<double> grid(count);
    if (lo > 0) {
        const double ratio = hi / lo;
        for (int i = 0; i < count; ++i)
            grid[i] = lo * std::pow(ratio, static_cast<double>(i) / (count - 1));
    } else {
        for (int i = 0; i < count; ++i)
            grid[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> amplitude_thresholds(const ScatteringModel& model) {
    std::vector<double> thresholds;
    for (Index j = 0; j < model.dim(); ++j) {
        thresholds.push_back(model.energies(j));
        thresholds.push_back(model.total_eig.values(j));
    }
    thresholds.push_back(model.e_max);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    return thresholds;
}

}  // namespace colsim
