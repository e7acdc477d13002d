// linalg.cpp — Implementation of the dense operator/superoperator layer

#include "colsim/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace colsim {

HermitianOperator::HermitianOperator(const Matrix& m, double defect_tol) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument("HermitianOperator: matrix must be square, dim >= 1");
    if (!m.allFinite())
        throw std::invalid_argument("HermitianOperator: non-finite entries");
    const double defect = max_abs(m - m.adjoint().eval());
    if (defect > defect_tol)
        throw std::invalid_argument("HermitianOperator: hermiticity defect " +
                                    std::to_string(defect) + " exceeds tolerance");
    m_ = hermitize(m);
}

DensityMatrix::DensityMatrix(const Matrix& m, double trace_tol, double eig_floor)
    : op_(m) {
    const double tr_defect = std::abs(op_.matrix().trace() - Complex(1.0, 0.0));
    if (tr_defect > trace_tol)
        throw std::invalid_argument("DensityMatrix: trace defect " +
                                    std::to_string(tr_defect) + " exceeds tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op_.matrix(), Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < eig_floor)
        throw std::invalid_argument("DensityMatrix: eigenvalue " +
                                    std::to_string(min_eig) + " below floor");
}

Eigendecomposition eig_hermitian(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig_hermitian: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix matrix_function(const HermitianOperator& h,
                       const std::function<Complex(double)>& f) {
    const Eigendecomposition eig = eig_hermitian(h);
    Vector fvals(eig.values.size());
    for (Index i = 0; i < eig.values.size(); ++i) {
        const Complex v = f(eig.values(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::domain_error("matrix_function: f non-finite at eigenvalue " +
                                    std::to_string(eig.values(i)));
        fvals(i) = v;
    }
    return eig.vectors * fvals.asDiagonal() * eig.vectors.adjoint();
}

Vector vec_state(const Matrix& rho) {
    const Index d = rho.rows();
    Vector v(d * d);
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k) v(j * d + k) = rho(j, k);
    return v;
}

Matrix unvec_state(const Vector& v, Index dim) {
    Matrix rho(dim, dim);
    for (Index j = 0; j < dim; ++j)
        for (Index k = 0; k < dim; ++k) rho(j, k) = v(j * dim + k);
    return rho;
}

Matrix apply_superop(const Superoperator& s, const Matrix& rho) {
    if (rho.rows() != s.dim() || rho.cols() != s.dim())
        throw std::invalid_argument("apply_superop: dimension mismatch");
    return unvec_state(s.matrix() * vec_state(rho), s.dim());
}

Matrix apply_superop(const Superoperator& s, const DensityMatrix& rho) {
    return apply_superop(s, rho.matrix());
}

Superoperator compose(const Superoperator& s2, const Superoperator& s1) {
    if (s1.dim() != s2.dim())
        throw std::invalid_argument("compose: dimension mismatch");
    return Superoperator(s1.dim(), s2.matrix() * s1.matrix());
}

Superoperator unitary_superop(const RealVector& energies, double tau, double hbar) {
    if (tau < 0) throw std::invalid_argument("unitary_superop: tau must be >= 0");
    if (hbar <= 0) throw std::invalid_argument("unitary_superop: hbar must be positive");
    const Index d = energies.size();
    Superoperator s(d);
    for (Index j = 0; j < d; ++j)
        for (Index k = 0; k < d; ++k) {
            const double delta = energies(j) - energies(k);
            s.entry(j, k, j, k) = std::exp(Complex(0.0, -delta * tau / hbar));
        }
    return s;
}

HermitianOperator choi_matrix(const Superoperator& s, double herm_tol) {
    const Index d = s.dim();
    Matrix c(d * d, d * d);
    for (Index j = 0; j < d; ++j)
        for (Index jp = 0; jp < d; ++jp)
            for (Index k = 0; k < d; ++k)
                for (Index kp = 0; kp < d; ++kp)
                    c(j * d + jp, k * d + kp) = s.entry(j, k, jp, kp);
    return HermitianOperator(c, herm_tol);
}

}  // namespace colsim
