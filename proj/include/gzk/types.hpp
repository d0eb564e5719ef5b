#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "gzk/errors.hpp"

namespace gzk {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXcd;
using Complex = std::complex<double>;

enum class Branch { positive, sign_changing };

inline std::string to_string(Branch b) {
    return b == Branch::positive ? "positive" : "sign-changing";
}

inline Branch branch_from_string(const std::string& s) {
    if (s == "positive") return Branch::positive;
    if (s == "sign-changing" || s == "sign_changing") return Branch::sign_changing;
    throw InvalidParams("unknown branch: " + s);
}

/// Parameters of one periodic traveling wave: nonlinearity power p, speed c,
/// period L, orbit family, and the energy level B of the orbit.
struct WaveParams {
    double p = 1.0;
    double c = 1.0;
    double L = 2.0 * 3.14159265358979323846;
    Branch branch = Branch::positive;
    double B = 0.0;

    void validate() const {
        if (!(p > 0.0)) throw InvalidParams("p must be positive");
        if (!(c > 0.0)) throw InvalidParams("c must be positive");
        if (!(L > 0.0)) throw InvalidParams("L must be positive");
    }
};

/// A converged profile: collocation samples on [0, L), complex Fourier
/// coefficients (FFT index order, c_n = (1/N) sum phi_j e^{-2 pi i n j / N}),
/// the max-norm ODE residual, and the profile extrema.
struct PeriodicWave {
    WaveParams params;
    VectorXd grid;
    VectorXcd fourier;
    double residual = 0.0;
    double b1 = 0.0;  // min of phi
    double b2 = 0.0;  // max of phi

    int N() const { return static_cast<int>(grid.size()); }
};

enum class EquilibriumKind { saddle, center };

struct Equilibrium {
    double phi;
    double xi;
    EquilibriumKind kind;
};

struct PhasePortraitInfo {
    std::vector<Equilibrium> equilibria;
    double B0;
    double separatrix_energy;  // 0 for the zero integration constant
};

struct TurningPoints {
    double b1;
    double b2;
};

/// Numerical knobs shared across the pipeline. All values are positive.
struct Tolerances {
    double quadrature_rel = 1e-12;   // period integral, relative
    double newton = 1e-12;           // Newton stop on max-norm ODE residual
    double residual_accept = 1e-10;  // acceptance bound on converged waves
    double fourier_tail = 1e-12;     // tail bound triggering grid doubling
    double zero_tol_factor = 1e-8;   // kernel band, relative to max |eig|
    double q_band_factor = 1e-6;     // |q| <= factor * L counts as q = 0
    double verdict_factor = 1e-4;    // growth threshold, relative to scale
    double floor_factor = 1e-6;      // spectral noise floor, relative to scale
};

}  // namespace gzk
