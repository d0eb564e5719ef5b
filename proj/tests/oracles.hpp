#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: a fixed-step RK4 integrator of the planar profile system with a
// section-crossing end correction (integration switches to the transverse
// variable for the final partial step), and a QR-based minimum-norm solve.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "gzk/phase_plane.hpp"
#include "gzk/wave.hpp"

namespace oracle {

struct PlanarState {
    double phi, xi;
};

inline PlanarState planar_rhs(const PlanarState& s, double p, double c) {
    return {s.xi, c * s.phi - gzk::nonlinearity(s.phi, p)};
}

inline PlanarState rk4_step(PlanarState s, double dt, double p, double c) {
    auto f = [&](const PlanarState& q) { return planar_rhs(q, p, c); };
    const PlanarState k1 = f(s);
    const PlanarState k2 = f({s.phi + 0.5 * dt * k1.phi, s.xi + 0.5 * dt * k1.xi});
    const PlanarState k3 = f({s.phi + 0.5 * dt * k2.phi, s.xi + 0.5 * dt * k2.xi});
    const PlanarState k4 = f({s.phi + dt * k3.phi, s.xi + dt * k3.xi});
    s.phi += dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    s.xi += dt / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
    return s;
}

/// Time to the section xi = 0 from a state just past it, integrating the
/// system with xi as the independent variable for one corrective step.
inline double section_correction(const PlanarState& s, double p, double c) {
    auto f = [&](const PlanarState& q) {
        const double xidot = c * q.phi - gzk::nonlinearity(q.phi, p);
        return PlanarState{1.0 / xidot, q.xi / xidot};  // (dt/dxi, dphi/dxi)
    };
    const double dxi = -s.xi;
    PlanarState z{0.0, s.phi};  // (t offset, phi) as functions of xi
    PlanarState q = s;
    const PlanarState k1 = f(q);
    const PlanarState k2 = f({q.phi + 0.5 * dxi * k1.xi, q.xi + 0.5 * dxi});
    const PlanarState k3 = f({q.phi + 0.5 * dxi * k2.xi, q.xi + 0.5 * dxi});
    const PlanarState k4 = f({q.phi + dxi * k3.xi, q.xi + dxi});
    z.phi += dxi / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    return z.phi;  // time increment to reach xi = 0
}

/// Orbit period measured by direct integration: start at the upper turning
/// point, track the two transversal crossings of xi = 0, and correct the
/// final partial step by integrating in xi.
inline double period_shooting(double p, double c, double B, int fine_steps = 200000) {
    const gzk::TurningPoints tp = gzk::turning_points(p, c, B);

    auto measure = [&](double dt, int max_steps) {
        PlanarState s{tp.b2, 0.0};
        int crossings = 0;
        double t = 0.0;
        double prev_xi = 0.0;
        for (int i = 0; i < max_steps; ++i) {
            const PlanarState ns = rk4_step(s, dt, p, c);
            const double tn = t + dt;
            if (i > 0 && prev_xi != 0.0 && ns.xi * prev_xi < 0.0) {
                ++crossings;
                if (crossings == 2) {
                    return tn + section_correction(ns, p, c);
                }
            }
            prev_xi = ns.xi;
            s = ns;
            t = tn;
        }
        throw std::runtime_error("period_shooting: no return crossing found");
    };

    const double dt0 = gzk::alpha_of_c(p, c) / 4096.0;
    const double coarse = measure(dt0, 50'000'000 / 4096 * 4096);
    return measure(coarse / fine_steps, fine_steps + fine_steps / 4);
}

/// Profile by direct integration from the maximum, sampled on the N-grid.
inline Eigen::VectorXd profile_shooting(double p, double c, double B, double L, int N,
                                        int substeps = 64) {
    const gzk::TurningPoints tp = gzk::turning_points(p, c, B);
    PlanarState s{tp.b2, 0.0};
    Eigen::VectorXd phi(N);
    phi[0] = s.phi;
    const double dx = L / N / substeps;
    for (int j = 1; j < N; ++j) {
        for (int q = 0; q < substeps; ++q) s = rk4_step(s, dx, p, c);
        phi[j] = s.phi;
    }
    return phi;
}

/// Minimum-norm least-squares solve through a rank-revealing QR route,
/// independent of the eigendecomposition-based solver in the library.
inline Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    cod.setThreshold(1e-10);
    return cod.solve(b);
}

}  // namespace oracle
