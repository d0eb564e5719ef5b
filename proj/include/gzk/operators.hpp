#pragma once

// Fourier-collocation assembly of the linearized operator about a wave and
// of its zero-mean relatives. Matrices are represented in the orthonormal
// trigonometric basis, so self-adjoint operators become symmetric matrices
// and the L2 inner product is the Euclidean dot product. The zero-mean
// subspace is realized by dropping the n = 0 mode, which makes the
// derivative invertible by construction.

#include <Eigen/Dense>
#include <algorithm>
#include <sstream>
#include <utility>

#include "gzk/fourier.hpp"
#include "gzk/types.hpp"
#include "gzk/wave.hpp"

namespace gzk {

enum class OperatorKind { linearized, projected, shifted, conjugated, transverse };
enum class BasisKind { full, zero_mean };

inline std::string to_string(OperatorKind o) {
    switch (o) {
        case OperatorKind::linearized: return "L";
        case OperatorKind::projected: return "QL";
        case OperatorKind::shifted: return "R";
        case OperatorKind::conjugated: return "P";
        case OperatorKind::transverse: return "DQL";
    }
    return "?";
}

/// Dense matrix of one operator with basis metadata.
struct SpectralOperator {
    MatrixXd mat;
    BasisKind basis = BasisKind::full;
    OperatorKind origin = OperatorKind::linearized;
    double k = 0.0;
    bool symmetric = true;
    int N = 0;  // collocation size the matrix was assembled at

    int dim() const { return static_cast<int>(mat.rows()); }
};

namespace detail {

/// Potential phi^p sampled at the assembly grid, with a resolution check on
/// its spectral tail.
inline VectorXd potential_on_grid(const PeriodicWave& wave, int N, double drop_tol = 1e-10) {
    const VectorXd phi = resample_values(wave, N, drop_tol);
    VectorXd V(N);
    for (int j = 0; j < N; ++j) V[j] = pow_p(phi[j], wave.params.p);
    const VectorXcd vc = dft(V);
    double vmax = 0.0, tail = 0.0;
    for (int n = 0; n < N; ++n) {
        const double a = std::abs(vc[n]);
        vmax = std::max(vmax, a);
        int m = n <= N / 2 ? n : n - N;
        if (std::abs(m) >= N / 2 - 1) tail = std::max(tail, a);
    }
    if (tail > 1e-8 * std::max(vmax, 1e-300)) {
        std::ostringstream os;
        os << "operator assembly: phi^p under-resolved at N = " << N
           << " (tail " << tail << ", max " << vmax << ")";
        throw ResolutionError(os.str());
    }
    return V;
}

inline MatrixXd full_matrix(const PeriodicWave& wave, const TrigBasis& basis) {
    const VectorXd V = potential_on_grid(wave, basis.N);
    MatrixXd A = (basis.Phi * V.asDiagonal() * basis.Phi.transpose());
    A = -A;
    A.diagonal() += (basis.omega.array().square() + wave.params.c).matrix();
    A = 0.5 * (A + A.transpose()).eval();  // enforce exact symmetry
    return A;
}

}  // namespace detail

/// -d^2/dx^2 + c - phi^p on the full basis; real symmetric.
inline SpectralOperator assemble_L(const PeriodicWave& wave, int N) {
    TrigBasis basis(N, wave.params.L);
    SpectralOperator op;
    op.mat = detail::full_matrix(wave, basis);
    op.basis = BasisKind::full;
    op.origin = OperatorKind::linearized;
    op.symmetric = true;
    op.N = N;
    return op;
}

/// Projection of the linearized operator onto the zero-mean subspace:
/// the full matrix with the mean row and column removed.
inline SpectralOperator assemble_QL(const PeriodicWave& wave, int N) {
    TrigBasis basis(N, wave.params.L);
    const MatrixXd A = detail::full_matrix(wave, basis);
    SpectralOperator op;
    op.mat = A.bottomRightCorner(A.rows() - 1, A.cols() - 1);
    op.basis = BasisKind::zero_mean;
    op.origin = OperatorKind::projected;
    op.symmetric = true;
    op.N = N;
    return op;
}

/// R(k) = QL + k^2 I on the zero-mean subspace.
inline SpectralOperator assemble_R(const PeriodicWave& wave, int N, double k) {
    if (k < 0.0) throw InvalidParams("assemble_R: k must be >= 0");
    SpectralOperator op = assemble_QL(wave, N);
    op.mat.diagonal().array() += k * k;
    op.origin = OperatorKind::shifted;
    op.k = k;
    return op;
}

/// Derivative and inverse-derivative multipliers on the zero-mean subspace.
inline std::pair<MatrixXd, MatrixXd> derivative_ops(double period, int N) {
    TrigBasis basis(N, period);
    return {basis.derivative(), basis.derivative_inverse()};
}

/// P(k) = D QL D^{-1} + k^2 I; generally nonsymmetric.
inline SpectralOperator assemble_P(const PeriodicWave& wave, int N, double k) {
    if (k < 0.0) throw InvalidParams("assemble_P: k must be >= 0");
    TrigBasis basis(N, wave.params.L);
    const MatrixXd A = detail::full_matrix(wave, basis);
    const MatrixXd QL = A.bottomRightCorner(A.rows() - 1, A.cols() - 1);
    SpectralOperator op;
    op.mat = basis.derivative() * QL * basis.derivative_inverse();
    op.mat.diagonal().array() += k * k;
    op.basis = BasisKind::zero_mean;
    op.origin = OperatorKind::conjugated;
    op.k = k;
    op.symmetric = false;
    op.N = N;
    return op;
}

/// D (QL + k^2 I): the transverse spectral problem matrix.
inline SpectralOperator assemble_transverse(const PeriodicWave& wave, int N, double k) {
    if (k < 0.0) throw InvalidParams("assemble_transverse: k must be >= 0");
    TrigBasis basis(N, wave.params.L);
    const MatrixXd A = detail::full_matrix(wave, basis);
    MatrixXd R = A.bottomRightCorner(A.rows() - 1, A.cols() - 1);
    R.diagonal().array() += k * k;
    SpectralOperator op;
    op.mat = basis.derivative() * R;
    op.basis = BasisKind::zero_mean;
    op.origin = OperatorKind::transverse;
    op.k = k;
    op.symmetric = false;
    op.N = N;
    return op;
}

/// Coefficients of phi' in the zero-mean orthonormal basis.
inline VectorXd phi_prime_zero_mean(const PeriodicWave& wave, int N) {
    TrigBasis basis(N, wave.params.L);
    const VectorXd phi = resample_values(wave, N);
    const VectorXd dphi = spectral_derivative(phi, wave.params.L, 1);
    const VectorXd coef = basis.coefficients(dphi);
    return coef.tail(coef.size() - 1);
}

/// Coefficients of phi' in the full orthonormal basis (mean entry ~ 0).
inline VectorXd phi_prime_full(const PeriodicWave& wave, int N) {
    TrigBasis basis(N, wave.params.L);
    const VectorXd phi = resample_values(wave, N);
    const VectorXd dphi = spectral_derivative(phi, wave.params.L, 1);
    return basis.coefficients(dphi);
}

}  // namespace gzk
