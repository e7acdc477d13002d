// linalg.hpp — Dense complex operator and superoperator algebra for few-level systems

#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace colsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix hermitize(const Matrix& m) {
    return 0.5 * (m + m.adjoint().eval());
}

// Operator guaranteed Hermitian: symmetrized at construction, rejected if the
// defect ‖H − H†‖_max exceeds the tolerance.
class HermitianOperator {
public:
    explicit HermitianOperator(const Matrix& m, double defect_tol = 1e-10);

    const Matrix& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

// Unit-trace positive Hermitian state. Evolution code may pass drift-scaled
// tolerances; the defaults are the at-rest invariants.
class DensityMatrix {
public:
    explicit DensityMatrix(const Matrix& m, double trace_tol = 1e-12,
                           double eig_floor = -1e-10);

    const Matrix& matrix() const { return op_.matrix(); }
    Index dim() const { return op_.dim(); }
    Complex entry(Index j, Index k) const { return op_.matrix()(j, k); }

private:
    HermitianOperator op_;
};

struct Eigendecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // unitary, columns are eigenvectors
};

// H = U diag(λ) U†, eigenvalues ascending.
Eigendecomposition eig_hermitian(const HermitianOperator& h);

// U diag(f(λ)) U†. Throws if f is non-finite on any eigenvalue.
Matrix matrix_function(const HermitianOperator& h,
                       const std::function<Complex(double)>& f);

// Linear map on d×d states, stored as a d²×d² matrix acting on the
// row-major vectorization a = j·d + k. The tensor entry with input pair
// (j,k) and output pair (j',k') lives at matrix(j'·d+k', j·d+k).
class Superoperator {
public:
    explicit Superoperator(Index dim)
        : dim_(dim), m_(Matrix::Zero(dim * dim, dim * dim)) {
        if (dim < 1) throw std::invalid_argument("Superoperator: dim must be >= 1");
    }
    Superoperator(Index dim, Matrix m) : dim_(dim), m_(std::move(m)) {
        if (m_.rows() != dim * dim || m_.cols() != dim * dim)
            throw std::invalid_argument("Superoperator: matrix must be d^2 x d^2");
    }

    static Superoperator identity(Index dim) {
        return Superoperator(dim, Matrix::Identity(dim * dim, dim * dim));
    }

    Index dim() const { return dim_; }
    const Matrix& matrix() const { return m_; }
    Matrix& matrix() { return m_; }

    Complex entry(Index j, Index k, Index jp, Index kp) const {
        return m_(jp * dim_ + kp, j * dim_ + k);
    }
    Complex& entry(Index j, Index k, Index jp, Index kp) {
        return m_(jp * dim_ + kp, j * dim_ + k);
    }

private:
    Index dim_;
    Matrix m_;
};

// Row-major vectorization helpers (the one convention used everywhere).
Vector vec_state(const Matrix& rho);
Matrix unvec_state(const Vector& v, Index dim);

// ρ'_{j'k'} = Σ_{jk} S^{jk}_{j'k'} ρ_{jk}. No normalization or hermitization.
Matrix apply_superop(const Superoperator& s, const Matrix& rho);
Matrix apply_superop(const Superoperator& s, const DensityMatrix& rho);

// Applies s1 first, then s2.
Superoperator compose(const Superoperator& s2, const Superoperator& s1);

// Phase superoperator of the free evolution in the energy eigenbasis:
// ρ_{jk} ↦ e^{−i(e_j−e_k)τ/ħ} ρ_{jk}.
Superoperator unitary_superop(const RealVector& energies, double tau, double hbar);

// Choi matrix C(j·d+j', k·d+k') = S^{jk}_{j'k'}; positive semidefinite iff the
// map is completely positive.
HermitianOperator choi_matrix(const Superoperator& s, double herm_tol = 1e-8);

}  // namespace colsim
