#pragma once

// Uniform periodic grids, the sampled trigonometric basis, and the
// derivative multipliers on the zero-mean subspace. Everything here is
// dense and deterministic; problem sizes stay small enough that direct
// O(N^2) transforms are preferable to an FFT dependency.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "gzk/types.hpp"

namespace gzk {

inline constexpr double pi = 3.14159265358979323846;

/// cos/sin of 2*pi*n*j/N with exact integer argument reduction, so basis
/// samples keep full precision even for large mode*index products.
inline double cos_2pi_frac(long long n, long long j, long long N) {
    long long r = (n % N) * (j % N) % N;
    return std::cos(2.0 * pi * static_cast<double>(r) / static_cast<double>(N));
}
inline double sin_2pi_frac(long long n, long long j, long long N) {
    long long r = (n % N) * (j % N) % N;
    return std::sin(2.0 * pi * static_cast<double>(r) / static_cast<double>(N));
}

/// Orthonormal trigonometric basis sampled on N equispaced points of [0, L).
/// Modes n = 0..M with M = N/2 - 1 (Nyquist dropped). Row layout:
/// index 0 -> 1/sqrt(L); index 2n-1 -> cos mode n; index 2n -> sin mode n.
struct TrigBasis {
    int N = 0;
    int M = 0;
    double L = 0.0;
    VectorXd x;       // collocation points
    MatrixXd Phi;     // (2M+1) x N, quadrature-weighted: Phi * Phi^T = I
    VectorXd omega;   // per-row wavenumber 2*pi*n/L (0 for the mean row)

    TrigBasis() = default;

    TrigBasis(int N_, double L_) : N(N_), M(N_ / 2 - 1), L(L_) {
        if (N < 8 || N % 2 != 0) throw InvalidParams("grid size must be even and >= 8");
        x.resize(N);
        for (int j = 0; j < N; ++j) x[j] = L * j / N;
        const int F = 2 * M + 1;
        Phi.resize(F, N);
        omega.resize(F);
        const double w0 = 1.0 / std::sqrt(static_cast<double>(N));
        const double w1 = std::sqrt(2.0 / N);
        omega[0] = 0.0;
        for (int j = 0; j < N; ++j) Phi(0, j) = w0;
        for (int n = 1; n <= M; ++n) {
            omega[2 * n - 1] = omega[2 * n] = 2.0 * pi * n / L;
            for (int j = 0; j < N; ++j) {
                Phi(2 * n - 1, j) = w1 * cos_2pi_frac(n, j, N);
                Phi(2 * n, j) = w1 * sin_2pi_frac(n, j, N);
            }
        }
    }

    int dim_full() const { return 2 * M + 1; }
    int dim_zero_mean() const { return 2 * M; }

    /// Coefficients of a grid function in the orthonormal basis.
    VectorXd coefficients(const VectorXd& values) const {
        return std::sqrt(L / N) * (Phi * values);
    }

    /// Grid values from orthonormal-basis coefficients.
    VectorXd values(const VectorXd& coef) const {
        return std::sqrt(static_cast<double>(N) / L) * (Phi.transpose() * coef);
    }

    /// Derivative matrix on the zero-mean subspace (2M x 2M, antisymmetric).
    MatrixXd derivative() const {
        MatrixXd D = MatrixXd::Zero(2 * M, 2 * M);
        for (int n = 1; n <= M; ++n) {
            const double w = 2.0 * pi * n / L;
            D(2 * n - 2, 2 * n - 1) = w;
            D(2 * n - 1, 2 * n - 2) = -w;
        }
        return D;
    }

    /// Inverse derivative on the zero-mean subspace.
    MatrixXd derivative_inverse() const {
        MatrixXd Di = MatrixXd::Zero(2 * M, 2 * M);
        for (int n = 1; n <= M; ++n) {
            const double w = 2.0 * pi * n / L;
            Di(2 * n - 2, 2 * n - 1) = -1.0 / w;
            Di(2 * n - 1, 2 * n - 2) = 1.0 / w;
        }
        return Di;
    }
};

/// Complex Fourier coefficients c_n = (1/N) sum_j f_j e^{-2 pi i n j / N},
/// FFT index order n = 0..N-1.
inline VectorXcd dft(const VectorXd& values) {
    const int N = static_cast<int>(values.size());
    VectorXcd c(N);
    for (int n = 0; n < N; ++n) {
        double re = 0.0, im = 0.0;
        for (int j = 0; j < N; ++j) {
            re += values[j] * cos_2pi_frac(n, j, N);
            im -= values[j] * sin_2pi_frac(n, j, N);
        }
        c[n] = Complex(re / N, im / N);
    }
    return c;
}

inline VectorXd idft_real(const VectorXcd& coef) {
    const int N = static_cast<int>(coef.size());
    VectorXd v(N);
    for (int j = 0; j < N; ++j) {
        double s = 0.0;
        for (int n = 0; n < N; ++n) {
            s += coef[n].real() * cos_2pi_frac(n, j, N) - coef[n].imag() * sin_2pi_frac(n, j, N);
        }
        v[j] = s;
    }
    return v;
}

/// Spectral derivative of order 1 or 2 of a periodic grid function.
inline VectorXd spectral_derivative(const VectorXd& values, double L, int order) {
    const int N = static_cast<int>(values.size());
    VectorXcd c = dft(values);
    for (int n = 0; n < N; ++n) {
        int m = n <= N / 2 ? n : n - N;  // signed mode
        if (std::abs(m) == N / 2) m = 0;  // drop Nyquist for odd derivatives
        const Complex ik(0.0, 2.0 * pi * m / L);
        Complex mult = ik;
        for (int o = 1; o < order; ++o) mult *= ik;
        c[n] *= mult;
    }
    return idft_real(c);
}

}  // namespace gzk
