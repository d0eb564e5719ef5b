#pragma once

// High-accuracy construction of periodic profiles. The energy level is
// root-found from the period integral, the orbit inversion provides the
// starting profile, and a damped Newton iteration on the Fourier
// collocation of the profile ODE polishes it in the even (cosine)
// subspace. Working in the even subspace pins the translation phase, so
// the Jacobian stays invertible at the solution.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "gzk/phase_plane.hpp"
#include "gzk/types.hpp"

namespace gzk {

struct SolveOptions {
    int N = 256;            // starting grid; doubled until the tail is resolved
    int N_max = 4096;
    Tolerances tol{};
};

/// phi^{p+1}/(p+1) with exact handling of integer p; non-integer p only
/// occurs on the positive branch, where negative transients are clamped.
inline double nonlinearity(double phi, double p) {
    return pow_p(phi, p + 1.0) / (p + 1.0);
}

/// Max-norm residual of -phi'' + c phi - phi^{p+1}/(p+1) with the second
/// derivative evaluated spectrally on the wave grid.
inline double wave_residual(const PeriodicWave& wave) {
    if (wave.grid.size() == 0) throw InvalidParams("wave_residual: empty grid");
    const double p = wave.params.p, c = wave.params.c, L = wave.params.L;
    const VectorXd d2 = spectral_derivative(wave.grid, L, 2);
    double r = 0.0;
    for (int j = 0; j < wave.N(); ++j) {
        r = std::max(r, std::abs(-d2[j] + c * wave.grid[j] - nonlinearity(wave.grid[j], p)));
    }
    return r;
}

namespace detail {

struct CosineSystem {
    int N, M;
    double L;
    MatrixXd C;     // (M+1) x N sampled cosines, row n = cos(2 pi n x / L)
    MatrixXd proj;  // projection of grid values onto cosine coefficients
    VectorXd w2;    // squared wavenumbers

    CosineSystem(int N_, double L_) : N(N_), M(N_ / 2 - 1), L(L_) {
        C.resize(M + 1, N);
        for (int n = 0; n <= M; ++n) {
            for (int j = 0; j < N; ++j) C(n, j) = cos_2pi_frac(n, j, N);
        }
        proj = (2.0 / N) * C;
        proj.row(0) *= 0.5;
        w2.resize(M + 1);
        for (int n = 0; n <= M; ++n) {
            const double w = 2.0 * pi * n / L;
            w2[n] = w * w;
        }
    }

    VectorXd values(const VectorXd& a) const { return C.transpose() * a; }
    VectorXd coefficients(const VectorXd& phi) const { return proj * phi; }
};

/// Damped Newton on the collocated profile ODE in cosine coefficients.
/// Returns the coefficients; throws when the iteration stalls.
inline VectorXd newton_even(const CosineSystem& sys, double p, double c, VectorXd a,
                            double tol, int max_iter = 60) {
    auto residual_grid = [&](const VectorXd& coef) {
        const VectorXd phi = sys.values(coef);
        const VectorXd lap = sys.values(sys.w2.cwiseProduct(coef).eval());
        VectorXd F(sys.N);
        for (int j = 0; j < sys.N; ++j) F[j] = lap[j] + c * phi[j] - nonlinearity(phi[j], p);
        return F;
    };

    VectorXd F = residual_grid(a);
    double fnorm = F.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iter; ++it) {
        if (fnorm < tol) return a;
        const VectorXd phi = sys.values(a);
        VectorXd V(sys.N);
        for (int j = 0; j < sys.N; ++j) V[j] = pow_p(phi[j], p);
        MatrixXd J = MatrixXd::Zero(sys.M + 1, sys.M + 1);
        J.diagonal() = sys.w2.array() + c;
        J -= sys.proj * V.asDiagonal() * sys.C.transpose();
        const VectorXd Fc = sys.coefficients(F);
        const VectorXd da = J.partialPivLu().solve(Fc);

        double step = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings <= 20; ++halvings) {
            const VectorXd trial = a - step * da;
            const VectorXd Ft = residual_grid(trial);
            const double ft = Ft.lpNorm<Eigen::Infinity>();
            if (ft < fnorm) {
                a = trial;
                F = Ft;
                fnorm = ft;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (fnorm < std::sqrt(tol)) return a;  // stagnated at rounding level
            std::ostringstream os;
            os << "newton stalled at residual " << fnorm << " after " << it << " iterations";
            throw NewtonDivergenceError(os.str());
        }
    }
    if (fnorm < tol) return a;
    std::ostringstream os;
    os << "newton did not reach tolerance: residual " << fnorm;
    throw NewtonDivergenceError(os.str());
}

}  // namespace detail

/// Exact equilibrium profile phi = ((p+1)c)^{1/p} as a PeriodicWave; solves
/// the profile ODE exactly and is handy as an analytic reference.
inline PeriodicWave constant_wave(double p, double c, double L, int N = 256) {
    PeriodicWave w;
    w.params = {p, c, L, Branch::positive, energy_B0(p, c)};
    w.grid = VectorXd::Constant(N, center_phi(p, c));
    w.fourier = dft(w.grid);
    w.residual = 0.0;
    w.b1 = w.b2 = center_phi(p, c);
    return w;
}

/// Construct the L-periodic profile on the requested branch. The profile is
/// returned in canonical phase: maximum at x = 0, even about it.
inline PeriodicWave solve_wave(double p, double c, double L, Branch branch,
                               const SolveOptions& opts = {}) {
    WaveParams params{p, c, L, branch, 0.0};
    params.validate();
    if (branch == Branch::sign_changing && !is_even_integer(p)) {
        throw InvalidParams("solve_wave: sign-changing branch needs an even integer p");
    }
    const double B = find_B_for_period(p, c, L, branch, opts.tol.quadrature_rel);
    params.B = B;

    int N = opts.N;
    VectorXd a;
    for (;;) {
        detail::CosineSystem sys(N, L);
        VectorXd phi0 = invert_orbit(p, c, B, L, N);
        a = detail::newton_even(sys, p, c, sys.coefficients(phi0), opts.tol.newton);

        // canonical phase: maximum at x = 0 (flip by half a period if needed)
        VectorXd phi = sys.values(a);
        if (phi[N / 2] > phi[0]) {
            for (int n = 1; n <= sys.M; n += 2) a[n] = -a[n];
            phi = sys.values(a);
        }

        // grid doubling until the last retained cosine coefficient is resolved
        const double tail = std::max(std::abs(a[sys.M]), std::abs(a[sys.M - 1]));
        if (tail < opts.tol.fourier_tail) {
            PeriodicWave wave;
            wave.params = params;
            wave.grid = phi;
            wave.fourier = dft(phi);
            wave.b1 = phi.minCoeff();
            wave.b2 = phi.maxCoeff();
            wave.residual = wave_residual(wave);
            if (wave.residual > opts.tol.residual_accept) {
                std::ostringstream os;
                os << "solve_wave: converged residual " << wave.residual
                   << " above acceptance bound " << opts.tol.residual_accept;
                throw NewtonDivergenceError(os.str());
            }
            return wave;
        }
        if (2 * N > opts.N_max) {
            std::ostringstream os;
            os << "solve_wave: profile not resolved at N = " << N
               << " (tail " << tail << ")";
            throw ResolutionError(os.str());
        }
        N *= 2;
    }
}

/// Evaluate the wave on an M-point grid by trigonometric interpolation.
/// Shrinking the grid is allowed only when the dropped coefficients are
/// below the resolution tolerance.
inline VectorXd resample_values(const PeriodicWave& wave, int M, double drop_tol = 1e-10) {
    const int N = wave.N();
    if (M == N) return wave.grid;
    const VectorXcd& c = wave.fourier;
    double cmax = 0.0;
    for (int n = 0; n < N; ++n) cmax = std::max(cmax, std::abs(c[n]));
    if (M < N) {
        double dropped = 0.0;
        for (int n = 0; n < N; ++n) {
            int m = n <= N / 2 ? n : n - N;
            if (std::abs(m) >= M / 2) dropped = std::max(dropped, std::abs(c[n]));
        }
        if (dropped > drop_tol * std::max(cmax, 1e-300)) {
            std::ostringstream os;
            os << "resample_values: dropping coefficients of size " << dropped
               << " is above the resolution tolerance";
            throw ResolutionError(os.str());
        }
    }
    VectorXd out(M);
    for (int j = 0; j < M; ++j) {
        double s = 0.0;
        for (int n = 0; n < N; ++n) {
            int m = n <= N / 2 ? n : n - N;
            if (std::abs(m) >= M / 2) continue;
            const double ang = 2.0 * pi * static_cast<double>((((long long)((m % M + M) % M)) * j) % M) / M;
            s += c[n].real() * std::cos(ang) - c[n].imag() * std::sin(ang);
        }
        out[j] = s;
    }
    return out;
}

}  // namespace gzk
