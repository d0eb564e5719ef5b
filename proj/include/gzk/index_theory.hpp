#pragma once

// The counting apparatus: solve L u = 1 on the orthogonal complement of the
// kernel, classify the sign of q = (u, 1), and combine with the negative
// count of L through the index formula
//     n(R(0)) = n(L) - n0 - z0,
// cross-checked against the directly computed negative count of QL. A
// bisection on sign(q(c)) locates the speed threshold where the count
// switches on the sign-changing branch.

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "gzk/operators.hpp"
#include "gzk/spectrum.hpp"
#include "gzk/wave.hpp"

namespace gzk {

struct LInverseSolution {
    VectorXd u;        // coefficients in the full orthonormal basis
    double residual;   // || L u - 1 ||_{L2}
    double q;          // (u, 1)_{L2}
    int kernel_dim;
};

/// Minimum-norm solution of L u = 1 orthogonal to the numerical kernel.
/// The kernel must be empty or one-dimensional along phi'.
inline LInverseSolution solve_L_inverse_one(const PeriodicWave& wave, int N,
                                            double residual_tol = 1e-8) {
    const SpectralOperator Lop = assemble_L(wave, N);
    const SpectrumReport rep = spectrum(Lop);
    if (rep.kernel_dim > 1) {
        std::ostringstream os;
        os << "solve_L_inverse_one: kernel dimension " << rep.kernel_dim << " is not solvable";
        throw SolvabilityError(os.str());
    }
    if (rep.kernel_dim == 1) {
        int kidx = -1;
        for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
            if (std::abs(rep.eigenvalues[i]) <= rep.zero_tol) kidx = static_cast<int>(i);
        }
        const VectorXd kv = rep.eigvectors->col(kidx).real();
        const VectorXd dphi = phi_prime_full(wave, N);
        const double overlap = std::abs(kv.dot(dphi)) / (kv.norm() * dphi.norm());
        if (overlap < 1.0 - 1e-6) {
            throw SolvabilityError("solve_L_inverse_one: numerical kernel is not along phi'");
        }
    }

    const int dim = Lop.dim();
    VectorXd one = VectorXd::Zero(dim);
    one[0] = std::sqrt(wave.params.L);  // the constant function 1

    LInverseSolution sol;
    sol.kernel_dim = rep.kernel_dim;
    sol.u = VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        const double lam = rep.eigenvalues[i].real();
        if (std::abs(lam) <= rep.zero_tol) continue;
        const VectorXd v = rep.eigvectors->col(i).real();
        sol.u += v * (v.dot(one) / lam);
    }
    sol.residual = (Lop.mat * sol.u - one).norm();
    sol.q = sol.u.dot(one);
    if (sol.residual > residual_tol) {
        std::ostringstream os;
        os << "solve_L_inverse_one: residual " << sol.residual << " exceeds " << residual_tol;
        throw SolvabilityError(os.str());
    }
    return sol;
}

struct IndexReport {
    double q = 0.0;
    int n0 = 0;
    int z0 = 0;
    int nL = 0;
    int nR0_formula = 0;
    int nR0_direct = 0;
    bool consistent = false;
    double zero_band = 0.0;  // |q| band treated as q = 0
};

/// q = (L^{-1} 1, 1) with the (n0, z0) classification and both routes to
/// the negative count of the projected operator.
inline IndexReport index_quantity(const PeriodicWave& wave, int N) {
    const LInverseSolution sol = solve_L_inverse_one(wave, N);
    IndexReport rep;
    rep.q = sol.q;
    rep.zero_band = 1e-6 * wave.params.L;
    if (rep.q < -rep.zero_band) {
        rep.n0 = 1;
        rep.z0 = 0;
    } else if (rep.q > rep.zero_band) {
        rep.n0 = 0;
        rep.z0 = 0;
    } else {
        rep.n0 = 0;
        rep.z0 = 1;
    }
    rep.nL = spectrum(assemble_L(wave, N), -1.0, false).neg_count;
    rep.nR0_formula = rep.nL - rep.n0 - rep.z0;
    rep.nR0_direct = spectrum(assemble_QL(wave, N), -1.0, false).neg_count;
    rep.consistent = rep.nR0_formula == rep.nR0_direct;
    return rep;
}

struct ThresholdRow {
    double c;
    double q;
    int nR0;
};

struct ThresholdScan {
    double c_star = 0.0;       // measured sign change of q(c)
    double reference = 0.0;    // closed-form threshold for comparison
    double rel_deviation = 0.0;
    std::vector<ThresholdRow> rows;
};

/// Closed-form speed thresholds of the sign-changing families (p = 2, 4)
/// scaled to the period L0.
inline double reference_threshold(double p, double L0) {
    if (is_integer(p) && std::llround(p) == 2) return 56.277 / (L0 * L0);
    if (is_integer(p) && std::llround(p) == 4) return 43.665 / (L0 * L0);
    throw InvalidParams("reference_threshold: only p = 2 and p = 4 carry references");
}

/// Locate the speed where q(c) changes sign on the sign-changing branch at
/// fixed period L0 by a scan plus bisection to 1e-3 relative width.
inline ThresholdScan threshold_scan(double p, double L0, double c_lo, double c_hi, int steps,
                                    int N = 96) {
    if (!(c_lo > 0.0) || !(c_hi > c_lo) || steps < 2) {
        throw InvalidParams("threshold_scan: need 0 < c_lo < c_hi and steps >= 2");
    }
    ThresholdScan scan;
    scan.reference = reference_threshold(p, L0);

    auto q_at = [&](double c) {
        const PeriodicWave w = solve_wave(p, c, L0, Branch::sign_changing, {.N = N});
        return index_quantity(w, N);
    };

    scan.rows.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        const double c = c_lo + (c_hi - c_lo) * i / (steps - 1);
        const IndexReport rep = q_at(c);
        scan.rows.push_back({c, rep.q, rep.nR0_direct});
    }

    int bracket = -1;
    for (int i = 0; i + 1 < steps; ++i) {
        if (scan.rows[i].q * scan.rows[i + 1].q < 0.0) {
            bracket = i;
            break;
        }
    }
    if (bracket < 0) {
        std::ostringstream os;
        os << "threshold_scan: q(c) does not change sign on [" << c_lo << ", " << c_hi
           << "] (q spans [" << scan.rows.front().q << ", " << scan.rows.back().q << "])";
        throw NoSignChangeError(os.str());
    }

    double lo = scan.rows[bracket].c, hi = scan.rows[bracket + 1].c;
    double q_lo = scan.rows[bracket].q;
    while (hi - lo > 1e-3 * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        const double q_mid = q_at(mid).q;
        if (q_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if (q_lo * q_mid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            q_lo = q_mid;
        }
    }
    scan.c_star = 0.5 * (lo + hi);
    scan.rel_deviation = std::abs(scan.c_star - scan.reference) / scan.reference;
    return scan;
}

}  // namespace gzk
