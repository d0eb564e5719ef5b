#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gzk/instability.hpp"

using namespace gzk;

namespace {

const PeriodicWave& demo_wave() {
    static const PeriodicWave w = solve_wave(1.0, 1.0, 9.0, Branch::positive, {.N = 48});
    return w;
}

}  // namespace

TEST_CASE("f(k) obeys the quadratic shift law") {
    const PeriodicWave& w = demo_wave();
    const double f0 = f_of_k(w, 48, 0.0);
    CHECK(f0 < 0.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 3.0);
    for (int i = 0; i < 8; ++i) {
        const double k = dist(rng);
        CHECK(std::abs(f_of_k(w, 48, k) - f0 - k * k) < 1e-10);
    }
}

TEST_CASE("constant profile at the marginal period has f(0) = 0") {
    // eigenvalues n^2 - 1 on the zero-mean modes: the n=1 mode sits at zero
    const PeriodicWave w = constant_wave(1.0, 1.0, 2.0 * pi, 64);
    CHECK(std::abs(f_of_k(w, 64, 0.0)) < 1e-12);
}

TEST_CASE("cutoff wavenumber") {
    const PeriodicWave& w = demo_wave();
    const CutoffInfo info = find_k0_info(w, 48);
    CHECK(info.k0 > 0.0);
    CHECK(info.k0 == Catch::Approx(std::sqrt(-f_of_k(w, 48, 0.0))).epsilon(1e-12));
    CHECK(std::abs(info.f_at_k0) < 1e-8 * info.scale);
    CHECK(info.kernel_dim_R == 1);
    CHECK(info.kernel_dim_P == 1);
    CHECK(info.lambda_min_simple);

    SECTION("f is negative below the cutoff and positive above") {
        for (double frac : {0.1, 0.5, 0.9}) CHECK(f_of_k(w, 48, frac * info.k0) < 0.0);
        for (double frac : {1.05, 1.5, 2.0}) CHECK(f_of_k(w, 48, frac * info.k0) > 0.0);
    }
    SECTION("a stable-direction profile is rejected") {
        // short-period equilibrium: all zero-mean eigenvalues positive
        const PeriodicWave cw = constant_wave(1.0, 1.0, 4.0, 64);
        CHECK(f_of_k(cw, 64, 0.0) > 0.0);
        CHECK_THROWS_AS(find_k0(cw, 64), NotApplicableError);
    }
}

TEST_CASE("transverse spectrum structure") {
    const PeriodicWave& w = demo_wave();
    const CutoffInfo info = find_k0_info(w, 48);

    SECTION("zero belongs to the k = 0 spectrum") {
        const SpectrumReport rep = transverse_spectrum(w, 48, 0.0, false);
        double closest = 1e300;
        for (auto& ev : rep.eigenvalues) closest = std::min(closest, std::abs(ev));
        CHECK(closest <= rep.zero_tol);
    }
    SECTION("a real unstable pair exists below the cutoff") {
        const SpectrumReport rep = transverse_spectrum(w, 48, 0.8 * info.k0, false);
        const double mx = rep.max_real();
        CHECK(mx > 1e-4 * info.scale);
        // paired with its negative
        double best = 1e300;
        for (auto& ev : rep.eigenvalues) best = std::min(best, std::abs(ev + Complex(mx, 0.0)));
        CHECK(best < 1e-8 * info.scale);
    }
    SECTION("beyond the cutoff the spectrum is purely imaginary") {
        for (double frac : {1.1, 1.6}) {
            const SpectrumReport rep = transverse_spectrum(w, 48, frac * info.k0, false);
            CHECK(rep.max_real() < 1e-6 * info.scale);
        }
    }
}

TEST_CASE("eigenpairs satisfy the equivalent spectral form") {
    const PeriodicWave& w = demo_wave();
    const CutoffInfo info = find_k0_info(w, 48);
    const double k = 0.7 * info.k0;
    const SpectrumReport rep = transverse_spectrum(w, 48, k, true);

    // the most unstable pair
    int arg = 0;
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        if (rep.eigenvalues[i].real() > rep.eigenvalues[arg].real()) arg = static_cast<int>(i);
    }
    CHECK(generalized_check(w, 48, k, rep.eigenvalues[arg], rep.eigvectors->col(arg)));

    // a mid-spectrum imaginary eigenvalue
    const int mid = static_cast<int>(rep.eigenvalues.size()) / 2;
    CHECK(generalized_check(w, 48, k, rep.eigenvalues[mid], rep.eigvectors->col(mid)));

    SECTION("kernel pair at k = 0 reduces to QL phi' = 0") {
        const VectorXd dphi = phi_prime_zero_mean(w, 48);
        CHECK(generalized_check(w, 48, 0.0, Complex(0.0, 0.0), dphi.cast<Complex>()));
    }
    SECTION("a random vector is rejected") {
        std::mt19937 rng(3);
        std::normal_distribution<double> dist;
        VectorXcd junk(rep.eigenvalues.size());
        for (int i = 0; i < junk.size(); ++i) junk[i] = Complex(dist(rng), dist(rng));
        CHECK_FALSE(generalized_check(w, 48, k, rep.eigenvalues[arg], junk));
    }
}

TEST_CASE("growth curve and verdict for a positive wave") {
    const PeriodicWave& w = demo_wave();
    const InstabilityVerdict v = verdict(w, 48);
    CHECK(v.verdict == Verdict::unstable_by_theorem);
    CHECK(v.criterion == "positive-wave");
    CHECK(v.nR0 == 1);
    CHECK(v.k0 > 0.0);

    const GrowthCurve& g = v.growth;
    REQUIRE(!g.k_samples.empty());
    // tail beyond the cutoff carries no growth
    for (std::size_t i = 0; i < g.k_samples.size(); ++i) {
        if (g.k_samples[i] >= v.k0 * (1.0 + 1e-9)) {
            CHECK(g.max_re_lambda[i] < 1e-6 * g.scale);
        }
    }
    // growth vanishes approaching the cutoff from below
    double near_cutoff = 0.0;
    for (std::size_t i = 0; i < g.k_samples.size(); ++i) {
        if (g.k_samples[i] > 0.97 * v.k0 && g.k_samples[i] < v.k0) {
            near_cutoff = std::max(near_cutoff, g.max_re_lambda[i]);
        }
    }
    CHECK(near_cutoff < 0.35 * g.max_re_lambda[std::distance(
                            g.max_re_lambda.begin(),
                            std::max_element(g.max_re_lambda.begin(), g.max_re_lambda.end()))]);
}

TEST_CASE("verdict on the sign-changing branch") {
    SECTION("below the threshold the cutoff construction applies") {
        const PeriodicWave w = solve_wave(2.0, 1.2, 2.0 * pi, Branch::sign_changing, {.N = 64});
        const InstabilityVerdict v = verdict(w, 48);
        CHECK(v.nR0 == 1);
        CHECK(v.criterion == "sign-changing-nR0=1");
        CHECK(v.verdict == Verdict::unstable_by_theorem);
    }
    SECTION("above the threshold only numerical evidence is available") {
        const PeriodicWave w = solve_wave(2.0, 1.6, 2.0 * pi, Branch::sign_changing, {.N = 64});
        const InstabilityVerdict v = verdict(w, 48);
        CHECK(v.nR0 == 2);
        CHECK(v.criterion == "k0-scan");
        CHECK(v.verdict == Verdict::unstable_numerical_evidence);
        CHECK(std::isfinite(v.d_mass_dc));
        CHECK(v.d_mass_dc > 0.0);
    }
}

TEST_CASE("linearized evolution reproduces eigenvalue growth rates") {
    const PeriodicWave& w = demo_wave();
    const int N = 48;
    const CutoffInfo info = find_k0_info(w, N);
    const double k = 0.7 * info.k0;
    const SpectrumReport rep = transverse_spectrum(w, N, k, true);
    int arg = 0;
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        if (rep.eigenvalues[i].real() > rep.eigenvalues[arg].real()) arg = static_cast<int>(i);
    }
    const double nu = rep.eigenvalues[arg].real();
    REQUIRE(nu > 1e-2);

    TrigBasis basis(N, w.params.L);
    const VectorXd mode = rep.eigvectors->col(arg).real();
    VectorXd full = VectorXd::Zero(basis.dim_full());
    full.tail(basis.dim_zero_mean()) = mode;
    const VectorXd w0 = basis.values(full);

    SECTION("exact exponential mode") {
        const double T = 20.0 / nu;
        const EvolveResult res = evolve_linearized(w, N, k, w0, T, 1e-3);
        CHECK(std::abs(res.rate - nu) / nu < 0.01);
    }
    SECTION("perturbed start still converges to the dominant rate") {
        VectorXd w0p = w0;
        std::mt19937 rng(5);
        std::normal_distribution<double> dist;
        VectorXd noise = VectorXd::Zero(basis.dim_full());
        for (int i = 1; i < noise.size(); ++i) noise[i] = 1e-3 * dist(rng);
        w0p += basis.values(noise);
        const double T = 20.0 / nu;
        const EvolveResult res = evolve_linearized(w, N, k, w0p, T, 1e-3);
        CHECK(std::abs(res.rate - nu) / nu < 0.02);
    }
    SECTION("beyond the cutoff the norm stays flat") {
        std::mt19937 rng(17);
        std::normal_distribution<double> dist;
        VectorXd noise = VectorXd::Zero(basis.dim_full());
        for (int i = 1; i < noise.size(); ++i) noise[i] = dist(rng);
        const VectorXd w0n = basis.values(noise);
        const EvolveResult res = evolve_linearized(w, N, 1.5 * info.k0, w0n, 40.0, 1e-3);
        CHECK(std::abs(res.rate) < 1e-3);
    }
    SECTION("time step above the bound is rejected") {
        CHECK_THROWS_AS(evolve_linearized(w, N, k, w0, 10.0, 1.0), IntegratorStepError);
    }
}
