// dynamics.cpp — Implementation of the evolution engines

#include "colsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "colsim/parallel.hpp"
#include "colsim/rng.hpp"

namespace colsim {

namespace {

// Guard rails for states produced by evolution rather than by hand: trace may
// drift by the per-collision map defect and positivity by the reported
// complete-positivity defect of the approximate map.
constexpr double kEvolvedEigFloor = -1e-4;

// Per-column trace defect of a collision superoperator, the per-application
// drift bound of the state trace.
double superop_trace_defect(const Superoperator& s) {
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

double evolved_trace_tol(double steps, double per_step_drift) {
    return 1e-12 + 2.0 * std::max(1.0, steps) * std::max(per_step_drift, 1e-11);
}

void apply_free_phases(Vector& v, const RealVector& energies, double dt, double hbar) {
    const Index d = energies.size();
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k) {
            const double delta = energies(j) - energies(k);
            if (delta != 0.0)
                v(j * d + k) *= std::exp(Complex(0.0, -delta * dt / hbar));
        }
}

Vector phased_copy(const Vector& v, const RealVector& energies, double dt, double hbar) {
    Vector out = v;
    apply_free_phases(out, energies, dt, hbar);
    return out;
}

// Dormand–Prince 5(4) adaptive step for the autonomous system v' = G v.
std::vector<Vector> integrate_rk45(const Matrix& generator, const Vector& v0,
                                   const std::vector<double>& t_grid, double tol) {
    static const double a[7][6] = {
        {},
        {1. / 5},
        {3. / 40, 9. / 40},
        {44. / 45, -56. / 15, 32. / 9},
        {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
        {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
        {35. / 384, 0., 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
    static const double b5[7] = {35. / 384,      0., 500. / 1113, 125. / 192,
                                 -2187. / 6784, 11. / 84, 0.};
    static const double b4[7] = {5179. / 57600,   0.,           7571. / 16695, 393. / 640,
                                 -92097. / 339200, 187. / 2100, 1. / 40};

    std::vector<Vector> out;
    out.reserve(t_grid.size());
    Vector v = v0;
    double t = 0.0;
    double h = 1e-3;
    for (double target : t_grid) {
        while (t < target - 1e-14) {
            if (h < 1e-13)
                throw std::runtime_error("evolve_master: integrator step underflow");
            h = std::min(h, target - t);
            Vector k[7];
            for (int s = 0; s < 7; ++s) {
                Vector arg = v;
                for (int l = 0; l < s; ++l)
                    if (a[s][l] != 0.0) arg += (h * a[s][l]) * k[l];
                k[s] = generator * arg;
            }
            Vector v5 = v, err = Vector::Zero(v.size());
            for (int s = 0; s < 7; ++s) {
                if (b5[s] != 0.0) v5 += (h * b5[s]) * k[s];
                err += (h * (b5[s] - b4[s])) * k[s];
            }
            const double scale = tol * std::max(1.0, v.norm());
            const double err_norm = err.norm() / scale;
            if (err_norm <= 1.0) {
                t += h;
                v = v5;
            }
            h *= std::clamp(0.9 * std::pow(std::max(err_norm, 1e-12), -0.2), 0.2, 5.0);
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace

DensityMatrix gibbs_state(const RealVector& energies, double beta) {
    if (!(beta > 0)) throw std::invalid_argument("gibbs_state: beta must be positive");
    const Index d = energies.size();
    const double e_min = energies.minCoeff();
    RealVector weights(d);
    for (Index j = 0; j < d; ++j) weights(j) = std::exp(-beta * (energies(j) - e_min));
    weights /= weights.sum();
    Matrix rho = Matrix::Zero(d, d);
    for (Index j = 0; j < d; ++j) rho(j, j) = weights(j);
    return DensityMatrix(rho);
}

Superoperator full_dephasing(Index dim) {
    if (dim < 1) throw std::invalid_argument("full_dephasing: dim must be >= 1");
    Superoperator s(dim);
    for (Index j = 0; j < dim; ++j) s.entry(j, j, j, j) = 1.0;
    return s;
}

std::vector<DensityMatrix> iterate_dephased(const CollisionMap& map,
                                            const DensityMatrix& rho0, int n) {
    if (map.diagnostics.trace_defect > 1e-6)
        throw std::invalid_argument("iterate_dephased: map trace defect exceeds 1e-6");
    if (n < 0) throw std::invalid_argument("iterate_dephased: n must be non-negative");
    const Superoperator composite = compose(full_dephasing(map.superop.dim()), map.superop);
    std::vector<DensityMatrix> states;
    states.reserve(n);
    Matrix rho = rho0.matrix();
    const double drift = map.diagnostics.trace_defect;
    for (int step = 1; step <= n; ++step) {
        rho = apply_superop(composite, rho);
        states.emplace_back(hermitize(rho), evolved_trace_tol(step, drift),
                            kEvolvedEigFloor);
    }
    return states;
}

namespace {

// Shared trajectory engine. `on_grid` receives (time, state-at-time, count of
// collisions so far); `on_collision` the post-collision state and new count.
template <typename GridFn, typename CollisionFn>
void run_trajectory(const Superoperator& collision, const RealVector& energies,
                    double hbar, double gamma, const std::vector<double>& grid,
                    CounterRng rng, const Matrix& rho0, bool renormalize,
                    GridFn&& on_grid, CollisionFn&& on_collision) {
    Vector v = vec_state(rho0);
    double t_anchor = 0.0;
    std::size_t next = 0;
    std::size_t collisions = 0;
    const double t_end = grid.empty() ? 0.0 : grid.back();
    while (true) {
        const double tau =
            gamma > 0 ? rng.next_exponential(gamma) : std::numeric_limits<double>::infinity();
        const double t_col = t_anchor + tau;
        while (next < grid.size() && grid[next] <= t_col) {
            on_grid(grid[next], phased_copy(v, energies, grid[next] - t_anchor, hbar),
                    collisions);
            ++next;
        }
        if (t_col > t_end || !std::isfinite(t_col)) break;
        apply_free_phases(v, energies, tau, hbar);
        v = vec_state(apply_superop(collision, unvec_state(v, collision.dim())));
        if (renormalize) {
            const Complex tr = unvec_state(v, collision.dim()).trace();
            v /= tr.real();
        }
        t_anchor = t_col;
        ++collisions;
        on_collision(t_col, v, collisions);
    }
}

std::vector<double> uniform_grid(double t_max, double sample_dt) {
    if (!(t_max > 0)) throw std::invalid_argument("trajectory: t_max must be positive");
    if (!(sample_dt > 0)) throw std::invalid_argument("trajectory: sample_dt must be positive");
    std::vector<double> grid;
    for (double t = 0.0; t <= t_max + 1e-12; t += sample_dt) grid.push_back(std::min(t, t_max));
    return grid;
}

}  // namespace

TrajectoryRecord sample_trajectory(const Superoperator& collision,
                                   const RealVector& energies, double hbar,
                                   double gamma, double t_max, double sample_dt,
                                   std::uint64_t seed, const DensityMatrix& rho0,
                                   bool renormalize) {
    if (gamma < 0) throw std::invalid_argument("sample_trajectory: gamma must be >= 0");
    TrajectoryRecord record;
    record.seed = seed;
    const std::vector<double> grid = uniform_grid(t_max, sample_dt);
    const Index d = collision.dim();
    const double drift = superop_trace_defect(collision);
    const auto push_state = [&](double t, const Vector& v, std::size_t count) {
        record.sample_times.push_back(t);
        record.states.emplace_back(
            hermitize(unvec_state(v, d)),
            evolved_trace_tol(static_cast<double>(count + 1), drift), kEvolvedEigFloor);
    };
    run_trajectory(
        collision, energies, hbar, gamma, grid, CounterRng(seed, 0), rho0.matrix(),
        renormalize, push_state,
        [&](double t, const Vector& v, std::size_t count) {
            record.collision_times.push_back(t);
            push_state(t, v, count);
        });
    return record;
}

SampledTrajectory trajectory_states_at(const Superoperator& collision,
                                       const RealVector& energies, double hbar,
                                       double gamma, const std::vector<double>& times,
                                       std::uint64_t base_seed, std::uint64_t stream,
                                       const Matrix& rho0, bool renormalize) {
    SampledTrajectory sampled;
    sampled.states.reserve(times.size());
    sampled.collision_counts.reserve(times.size());
    run_trajectory(
        collision, energies, hbar, gamma, times, CounterRng(base_seed, stream), rho0,
        renormalize,
        [&](double, const Vector& v, std::size_t count) {
            sampled.states.push_back(unvec_state(v, collision.dim()));
            sampled.collision_counts.push_back(count);
        },
        [](double, const Vector&, std::size_t) {});
    return sampled;
}

std::vector<SampledTrajectory> ensemble_states(
    const Superoperator& collision, const RealVector& energies, double hbar,
    double gamma, const std::vector<double>& times, int trajectories,
    std::uint64_t base_seed, const Matrix& rho0, bool renormalize, int threads) {
    if (trajectories < 1)
        throw std::invalid_argument("ensemble_states: need at least one trajectory");
    std::vector<SampledTrajectory> all(trajectories);
    parallel_for(static_cast<std::size_t>(trajectories), threads, [&](std::size_t i) {
        all[i] = trajectory_states_at(collision, energies, hbar, gamma, times, base_seed,
                                      i, rho0, renormalize);
    });
    return all;
}

EnsembleMean ensemble_mean(const Superoperator& collision, const RealVector& energies,
                           double hbar, double gamma, const std::vector<double>& times,
                           int trajectories, std::uint64_t base_seed, const Matrix& rho0,
                           bool renormalize, int threads) {
    const auto all = ensemble_states(collision, energies, hbar, gamma, times,
                                     trajectories, base_seed, rho0, renormalize, threads);
    EnsembleMean mean;
    mean.states.assign(times.size(), Matrix::Zero(collision.dim(), collision.dim()));
    mean.mean_collisions.assign(times.size(), 0.0);
    for (int i = 0; i < trajectories; ++i)
        for (std::size_t g = 0; g < times.size(); ++g) {
            mean.states[g] += all[i].states[g];
            mean.mean_collisions[g] += static_cast<double>(all[i].collision_counts[g]);
        }
    for (auto& m : mean.states) m /= static_cast<double>(trajectories);
    for (auto& c : mean.mean_collisions) c /= static_cast<double>(trajectories);
    return mean;
}

Liouvillian liouvillian(const Superoperator& collision, const RealVector& energies,
                        double hbar, double gamma) {
    if (gamma < 0) throw std::invalid_argument("liouvillian: gamma must be >= 0");
    if (!(hbar > 0)) throw std::invalid_argument("liouvillian: hbar must be positive");
    const Index d = energies.size();
    if (collision.dim() != d) throw std::invalid_argument("liouvillian: dimension mismatch");
    Liouvillian liou;
    liou.gamma = gamma;
    liou.hbar = hbar;
    liou.energies = energies;
    liou.generator = gamma * (collision.matrix() -
                              Matrix::Identity(d * d, d * d));
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k)
            liou.generator(j * d + k, j * d + k) +=
                Complex(0.0, -(energies(j) - energies(k)) / hbar);
    return liou;
}

Liouvillian liouvillian(const CollisionMap& map, const ScatteringModel& model,
                        double gamma) {
    return liouvillian(map.superop, model.energies, model.hbar, gamma);
}

SteadyStateSolution steady_state(const Liouvillian& liou, double tol) {
    if (!(liou.gamma > 0))
        throw std::invalid_argument("steady_state: requires a positive collision rate");
    const Index n = liou.generator.rows();
    const Index d = liou.energies.size();

    Matrix a = liou.generator;
    Vector b = Vector::Zero(n);
    a.row(n - 1).setZero();
    for (Index j = 0; j < d; ++j) a(n - 1, j * d + j) = 1.0;
    b(n - 1) = 1.0;

    SolverInfo info;
    Vector x;
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    info.condition = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (info.condition < 1e12) {
        info.method = "lu";
        x = lu.solve(b);
    } else {
        info.method = "svd";
        Eigen::JacobiSVD<Matrix> svd(liou.generator, Eigen::ComputeFullV);
        const auto& sigma = svd.singularValues();
        if (n >= 2 && sigma(n - 2) < 1e-10 * sigma(0))
            throw std::runtime_error(
                "steady_state: generator null space is degenerate (more than one "
                "stationary direction)");
        x = svd.matrixV().col(n - 1);
        const Complex tr = unvec_state(x, d).trace();
        if (std::abs(tr) < 1e-12)
            throw std::runtime_error("steady_state: traceless null vector");
        x /= tr;
    }

    Matrix rho = hermitize(unvec_state(x, d));
    rho /= rho.trace().real();

    const double residual = max_abs(unvec_state(liou.generator * vec_state(rho), d));
    if (!(residual <= tol))
        throw std::runtime_error("steady_state: residual " + std::to_string(residual) +
                                 " exceeds tolerance");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(rho, Eigen::EigenvaluesOnly);
    info.min_eigenvalue = eig.eigenvalues().minCoeff();
    info.negative_flagged = info.min_eigenvalue < -1e-8;

    SteadyStateSolution solution{DensityMatrix(rho, 1e-12, kEvolvedEigFloor), residual,
                                 info};
    return solution;
}

std::vector<DensityMatrix> evolve_master(const Liouvillian& liou,
                                         const DensityMatrix& rho0,
                                         const std::vector<double>& t_grid,
                                         EvolveMethod method) {
    if (t_grid.empty()) return {};
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0) throw std::invalid_argument("evolve_master: times must be >= 0");
        if (i > 0 && t_grid[i] < t_grid[i - 1])
            throw std::invalid_argument("evolve_master: times must be ascending");
    }
    const Index d = liou.energies.size();
    const Vector v0 = vec_state(rho0.matrix());

    std::vector<Vector> evolved;
    Eigen::ComplexEigenSolver<Matrix> eig(liou.generator);
    bool eigen_ok =
        method == EvolveMethod::automatic && eig.info() == Eigen::Success;
    if (eigen_ok) {
        Eigen::PartialPivLU<Matrix> vectors_lu(eig.eigenvectors());
        const double rcond = vectors_lu.rcond();
        if (rcond > 0 && 1.0 / rcond < 1e8) {
            const Vector coeffs = vectors_lu.solve(v0);
            for (double t : t_grid) {
                Vector scaled(coeffs.size());
                for (Index i = 0; i < coeffs.size(); ++i)
                    scaled(i) = coeffs(i) * std::exp(eig.eigenvalues()(i) * t);
                evolved.push_back(eig.eigenvectors() * scaled);
            }
        } else {
            eigen_ok = false;
        }
    }
    if (!eigen_ok) evolved = integrate_rk45(liou.generator, v0, t_grid, 1e-10);

    // Trace leakage rate of the generator, for the drift allowance below.
    double trace_rate = 0.0;
    for (Index col = 0; col < d * d; ++col) {
        Complex column_trace{};
        for (Index j = 0; j < d; ++j) column_trace += liou.generator(j * d + j, col);
        trace_rate = std::max(trace_rate, std::abs(column_trace));
    }

    std::vector<DensityMatrix> states;
    states.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        states.emplace_back(hermitize(unvec_state(evolved[i], d)),
                            evolved_trace_tol(1.0 + t_grid[i], trace_rate),
                            kEvolvedEigFloor);
    return states;
}

PerturbativeSolution perturbative_steady(const CollisionMap& map,
                                         const ScatteringModel& model, double beta) {
    const Index d = model.dim();
    if (map.superop.dim() != d)
        throw std::invalid_argument("perturbative_steady: dimension mismatch");
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k)
            if (j != k && std::abs(model.energies(j) - model.energies(k)) < 1e-12)
                throw std::invalid_argument(
                    "perturbative_steady: degenerate level pair is unsupported");
    if (map_diagnostics(map).detailed_balance_defect > 1e-6)
        throw std::invalid_argument(
            "perturbative_steady: population block violates detailed balance");

    const DensityMatrix rho0 = gibbs_state(model.energies, beta);
    const Superoperator& s = map.superop;

    Matrix rho1 = Matrix::Zero(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k) {
            if (j == k) continue;
            const double delta = model.energies(j) - model.energies(k);
            Complex feed{};
            for (Index jp = 0; jp < d; ++jp)
                feed += s.entry(jp, jp, j, k) * rho0.entry(jp, jp);
            rho1(j, k) = Complex(0.0, -model.hbar / delta) * feed;
        }

    // Diagonal correction: (I − P)ρ¹_diag = coherence feedback, closed by the
    // trace-zero constraint in place of the last row.
    RealMatrix a = RealMatrix::Identity(d, d);
    RealVector b = RealVector::Zero(d);
    for (Index j = 0; j < d; ++j) {
        Complex feedback{};
        for (Index jp = 0; jp < d; ++jp)
            for (Index kp = 0; kp < d; ++kp) {
                if (jp == kp) continue;
                feedback += s.entry(jp, kp, j, j) * rho1(jp, kp);
            }
        b(j) = feedback.real();
        for (Index jp = 0; jp < d; ++jp) a(j, jp) -= s.entry(jp, jp, j, j).real();
    }
    a.row(d - 1).setOnes();
    b(d - 1) = 0.0;
    const RealVector diag = a.partialPivLu().solve(b);
    for (Index j = 0; j < d; ++j) rho1(j, j) = diag(j);

    return PerturbativeSolution{rho0, hermitize(rho1), 1};
}

double coherence_estimate(double gamma, double omega, double beta, double mass,
                          double dx, double s_const) {
    for (double arg : {gamma, omega, beta, mass, dx, s_const})
        if (!(arg > 0))
            throw std::invalid_argument("coherence_estimate: all arguments must be positive");
    return s_const * s_const * (gamma / omega) *
           std::exp(-0.5 * beta * mass * dx * dx * omega * omega);
}

}  // namespace colsim
