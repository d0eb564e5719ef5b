#pragma once

// Existence machinery: phase-plane classification of the profile ODE
//   -phi'' + c phi - phi^{p+1}/(p+1) = 0,
// the period integral over one orbit of the energy level B, and inversion
// of the orbit into an initial profile for the collocation solver.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "gzk/fourier.hpp"
#include "gzk/types.hpp"

namespace gzk {

inline bool is_integer(double p, double tol = 1e-12) {
    return std::abs(p - std::llround(p)) < tol;
}

inline bool is_even_integer(double p) {
    return is_integer(p) && std::llround(p) % 2 == 0;
}

/// x^n for integer n >= 0 by squaring; valid for negative x.
inline double ipow(double x, long long n) {
    double r = 1.0, b = x;
    for (long long e = n; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

/// x^q for real q > 0. Integer exponents keep exact sign handling; for
/// non-integer q negative arguments are clamped to zero (they only occur
/// as transients of the positive branch).
inline double pow_p(double x, double q) {
    if (is_integer(q)) return ipow(x, std::llround(q));
    return x <= 0.0 ? 0.0 : std::pow(x, q);
}

inline double energy_B0(double p, double c) {
    return -p * std::pow(p + 1.0, 2.0 / p) * std::pow(c, (p + 2.0) / p) / (2.0 * (p + 2.0));
}

/// Small-orbit period limit at the center, 2*pi/sqrt(p*c).
inline double alpha_of_c(double p, double c) {
    return 2.0 * pi / std::sqrt(p * c);
}

inline double center_phi(double p, double c) {
    return std::pow((p + 1.0) * c, 1.0 / p);
}

/// g(h) = 2B + c h^2 - 2 h^{p+2} / ((p+1)(p+2)); turning points are its roots.
inline double orbit_g(double h, double p, double c, double B) {
    return 2.0 * B + c * h * h - 2.0 * pow_p(h, p + 2.0) / ((p + 1.0) * (p + 2.0));
}

/// Phase-plane energy E(phi, xi); orbits live on E = B.
inline double orbit_energy(double phi, double xi, double p, double c) {
    return 0.5 * xi * xi - 0.5 * c * phi * phi + pow_p(phi, p + 2.0) / ((p + 1.0) * (p + 2.0));
}

inline PhasePortraitInfo classify_phase_plane(double p, double c) {
    if (!(p > 0.0) || !(c > 0.0)) throw InvalidParams("classify_phase_plane: need p > 0, c > 0");
    PhasePortraitInfo info;
    const double phis = center_phi(p, c);
    info.equilibria.push_back({0.0, 0.0, EquilibriumKind::saddle});
    info.equilibria.push_back({phis, 0.0, EquilibriumKind::center});
    if (is_even_integer(p)) info.equilibria.push_back({-phis, 0.0, EquilibriumKind::center});
    info.B0 = energy_B0(p, c);
    info.separatrix_energy = 0.0;
    return info;
}

namespace detail {

/// ((y+u)^q - y^q)/u without cancellation for small u.
inline double powdiff(double y, double u, double q) {
    const double x = y + u;
    if (u == 0.0) return q * pow_p(y, q - 1.0);
    if (is_integer(q) && (x < 0.0 || y < 0.0)) {
        const long long qi = std::llround(q);
        double s = 0.0;
        for (long long i = 0; i < qi; ++i) s += ipow(x, i) * ipow(y, qi - 1 - i);
        return s;
    }
    if (std::abs(u) > 0.1 * std::max(std::abs(x), std::abs(y))) {
        return (std::pow(x, q) - std::pow(y, q)) / u;
    }
    return std::pow(y, q) * std::expm1(q * std::log1p(u / y)) / u;
}

/// r = g(h) / ((h-b1)(b2-h)) at h = b1 + (b2-b1) s2, anchored at the nearer
/// turning point so the removable factor never suffers cancellation. The
/// offsets u, v are formed as products, never as differences of h.
inline double orbit_r(double s2, double b1, double b2, double p, double c) {
    const double K = 2.0 / ((p + 1.0) * (p + 2.0));
    const double w = b2 - b1;
    const double u = w * s2;
    const double v = w * (1.0 - s2);
    if (u <= v) {
        const double h = b1 + u;
        return (c * (h + b1) - K * powdiff(b1, u, p + 2.0)) / v;
    }
    const double h = b2 - v;
    return (K * powdiff(b2, -v, p + 2.0) - c * (h + b2)) / u;
}

inline double toms748_root(const std::function<double(double)>& f, double a, double b) {
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, tol, it);
    return 0.5 * (r.first + r.second);
}

}  // namespace detail

/// Consecutive real roots of g bracketing the requested orbit family.
inline TurningPoints turning_points(double p, double c, double B) {
    if (!(p > 0.0) || !(c > 0.0)) throw InvalidParams("turning_points: need p > 0, c > 0");
    const double B0 = energy_B0(p, c);
    const double phis = center_phi(p, c);
    auto g = [&](double h) { return orbit_g(h, p, c, B); };

    auto upper_root = [&]() {
        double H = 1.5 * phis;
        int guard = 0;
        while (g(H) > 0.0) {
            H *= 2.0;
            if (++guard > 600) throw NoPeriodicOrbitError("turning_points: no outer root");
        }
        return detail::toms748_root(g, phis, H);
    };

    if (B > B0 && B < 0.0) {
        // orbit around the positive center: 0 < b1 < phis < b2
        if (!(g(phis) > 0.0)) {
            throw DegenerateOrbitError("turning_points: orbit degenerate at the center");
        }
        const double b1 = detail::toms748_root(g, 0.0, phis);
        const double b2 = upper_root();
        return {b1, b2};
    }
    if (B > 0.0) {
        if (!is_even_integer(p)) {
            throw NoPeriodicOrbitError("turning_points: B > 0 needs an even integer p");
        }
        const double b2 = upper_root();
        return {-b2, b2};  // g is even in h for even p
    }
    std::ostringstream os;
    os << "turning_points: B = " << B << " outside (B0, 0) + (0, inf), B0 = " << B0;
    throw NoPeriodicOrbitError(os.str());
}

/// Period of the orbit at energy level B. The substitution
/// h = b1 + (b2-b1) sin^2(theta) removes both endpoint singularities.
/// Near-separatrix orbits still carry a steep boundary layer in theta, so
/// 16-point Gauss-Legendre panels are graded dyadically toward both ends
/// and refined by subpanel doubling until the value settles.
inline double period_of_B(double p, double c, double B, double rel_tol = 1e-12) {
    const double B0 = energy_B0(p, c);
    if (B > B0 && B < 0.0 && B - B0 <= 1e-13 * std::abs(B0)) {
        throw DegenerateOrbitError("period_of_B: orbit energy indistinguishable from the center");
    }
    const TurningPoints tp = turning_points(p, c, B);
    std::function<double(double)> f;
    if (B < 0.0) {
        f = [=](double th) {
            const double s = std::sin(th);
            double r = detail::orbit_r(s * s, tp.b1, tp.b2, p, c);
            if (!(r > 0.0)) r = std::numeric_limits<double>::min();
            return 4.0 / std::sqrt(r);
        };
    } else {
        // even orbit: integrate the half-leg h = b2 sin^2(theta) in [0, b2];
        // this moves the slow saddle passage at h = 0 to the theta = 0 end,
        // where the graded panels resolve it. w = g(h)/(b2-h) switches from
        // direct evaluation (stable near the saddle) to the root-anchored
        // divided difference (stable near b2) at h = b2/2.
        const double K = 2.0 / ((p + 1.0) * (p + 2.0));
        const double b2 = tp.b2;
        f = [=](double th) {
            const double s = std::sin(th), co = std::cos(th);
            const double v = b2 * co * co;  // b2 - h
            const double h = b2 * s * s;
            double w;
            if (h < 0.5 * b2) {
                w = orbit_g(h, p, c, B) / v;
            } else {
                w = K * detail::powdiff(b2, -v, p + 2.0) - c * (h + b2);
            }
            if (!(w > 0.0)) w = std::numeric_limits<double>::min();
            return 8.0 * std::sqrt(b2) * s / std::sqrt(w);
        };
    }
    // dyadic edges on [0, pi/4], mirrored onto [pi/4, pi/2]
    constexpr int depth = 60;
    std::vector<double> edges;
    edges.push_back(0.0);
    for (int j = depth; j >= 0; --j) edges.push_back(0.25 * pi * std::ldexp(1.0, -j));
    const std::size_t half = edges.size();
    for (std::size_t i = half - 1; i-- > 0;) edges.push_back(0.5 * pi - edges[i]);

    // Nearly degenerate orbits amplify rounding in the integrand by the
    // ratio of the orbit scale to its width; the stop test must not demand
    // more than that conditioning allows.
    const double kappa =
        (std::abs(tp.b1) + std::abs(tp.b2)) / std::max(tp.b2 - tp.b1, 1e-300);
    const double floor_rel = 32.0 * std::numeric_limits<double>::epsilon() * std::max(kappa, 1.0);
    const double stop_rel = std::max(rel_tol, floor_rel);

    using Rule = boost::math::quadrature::gauss<double, 16>;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int m = 1; m <= 64; m *= 2) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double a = edges[i], b = edges[i + 1];
            const double w = (b - a) / m;
            for (int s = 0; s < m; ++s) acc += Rule::integrate(f, a + s * w, a + (s + 1) * w);
        }
        if (std::isfinite(prev) && std::abs(acc - prev) <= stop_rel * std::abs(acc)) return acc;
        prev = acc;
    }
    throw QuadratureError("period_of_B: panel refinement did not converge");
}

/// Profile samples on the N-point grid obtained by inverting the period
/// integral: theta(x) solves dtheta/dx = -sqrt(r)/2 from theta(0) = pi/2,
/// so the maximum sits at x = 0 and the profile is even.
inline VectorXd invert_orbit(double p, double c, double B, double L, int N) {
    const TurningPoints tp = turning_points(p, c, B);
    auto slope = [&](double th) {
        const double s = std::sin(th);
        double s2 = s * s;
        s2 = std::clamp(s2, 0.0, 1.0);
        const double r = detail::orbit_r(s2, tp.b1, tp.b2, p, c);
        return r > 0.0 ? -0.5 * std::sqrt(r) : 0.0;
    };
    const int half = N / 2;
    const int sub = 32;
    const double dx = (L / N) / sub;
    double th = 0.5 * pi;
    VectorXd phi(N);
    auto value = [&](double t) {
        const double s = std::sin(std::clamp(t, 0.0, 0.5 * pi));
        return tp.b1 + (tp.b2 - tp.b1) * s * s;
    };
    phi[0] = value(th);
    for (int j = 1; j <= half; ++j) {
        for (int s = 0; s < sub; ++s) {
            const double k1 = slope(th);
            const double k2 = slope(th + 0.5 * dx * k1);
            const double k3 = slope(th + 0.5 * dx * k2);
            const double k4 = slope(th + dx * k3);
            th += dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            th = std::clamp(th, 0.0, 0.5 * pi);
        }
        phi[j] = value(th);
    }
    for (int j = half + 1; j < N; ++j) phi[j] = phi[N - j];
    return phi;
}

/// Root-find the energy level whose orbit has period L. Scans a geometric
/// ladder of levels from near-center to near-separatrix, demands exactly one
/// sign-change bracket, then polishes with a bracketed solver.
inline double find_B_for_period(double p, double c, double L, Branch branch,
                                double quad_tol = 1e-12) {
    std::vector<double> Bs;
    if (branch == Branch::positive) {
        const double a = alpha_of_c(p, c);
        if (L <= a * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "no wave: period below alpha(c) = " << a << " on the positive branch";
            throw NoWaveForPeriodError(os.str());
        }
        const double B0 = energy_B0(p, c);
        for (int k = 42; k >= 1; --k) Bs.push_back(B0 * (1.0 - std::ldexp(1.0, -k)));
        for (int k = 2; k <= 100; ++k) Bs.push_back(B0 * std::ldexp(1.0, -k));
    } else {
        if (!is_even_integer(p)) {
            throw InvalidParams("sign-changing branch needs an even integer p");
        }
        for (int k = 60; k >= -120; --k) Bs.push_back(std::ldexp(1.0, k));
    }

    // Bs is ordered so that the period increases along the list on both branches
    std::vector<double> fs(Bs.size());
    for (std::size_t i = 0; i < Bs.size(); ++i) {
        fs[i] = period_of_B(p, c, Bs[i], quad_tol) - L;
    }
    std::vector<std::size_t> brackets;
    for (std::size_t i = 0; i + 1 < Bs.size(); ++i) {
        if (fs[i] == 0.0) return Bs[i];
        if (fs[i] * fs[i + 1] < 0.0) brackets.push_back(i);
    }
    if (brackets.empty()) {
        std::ostringstream os;
        os << "no wave: period " << L << " not bracketed by the period map on the "
           << to_string(branch) << " branch";
        throw NoWaveForPeriodError(os.str());
    }
    if (brackets.size() > 1) {
        std::ostringstream os;
        os << "period map crosses L = " << L << " in " << brackets.size()
           << " energy intervals:";
        for (auto i : brackets) os << " [" << Bs[i] << ", " << Bs[i + 1] << "]";
        throw AmbiguousPeriodError(os.str());
    }

    const std::size_t i = brackets.front();
    auto f = [&](double B) { return period_of_B(p, c, B, quad_tol) - L; };
    double lo = Bs[i], hi = Bs[i + 1];
    if (lo > hi) std::swap(lo, hi);
    const double B = detail::toms748_root(f, lo, hi);
    if (std::abs(f(B)) > 1e-9 * L) {
        throw QuadratureError("find_B_for_period: bracketed solve left a large period error");
    }
    return B;
}

}  // namespace gzk
