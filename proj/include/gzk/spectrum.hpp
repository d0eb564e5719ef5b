#pragma once

// Dense eigendecomposition wrapper with the counting primitives used by the
// index formula: number of negative eigenvalues and kernel dimension,
// measured against a scale-aware zero band.

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "gzk/operators.hpp"
#include "gzk/types.hpp"

namespace gzk {

struct SpectrumReport {
    std::vector<Complex> eigenvalues;  // sorted by real part, then imaginary
    int kernel_dim = 0;
    int neg_count = 0;
    double zero_tol = 0.0;
    OperatorKind origin = OperatorKind::linearized;
    double k = 0.0;
    int N = 0;
    std::optional<Eigen::MatrixXcd> eigvectors;  // columns match eigenvalue order

    double max_real() const {
        double m = -1e300;
        for (const auto& ev : eigenvalues) m = std::max(m, ev.real());
        return m;
    }
    double max_abs() const {
        double m = 0.0;
        for (const auto& ev : eigenvalues) m = std::max(m, std::abs(ev));
        return m;
    }
};

/// Full eigendecomposition of an assembled operator. Symmetric operators go
/// through the self-adjoint solver and report real eigenvalues. zero_tol < 0
/// selects the default band 1e-8 * max|eigenvalue|.
inline SpectrumReport spectrum(const SpectralOperator& op, double zero_tol = -1.0,
                               bool want_vectors = true) {
    SpectrumReport rep;
    rep.origin = op.origin;
    rep.k = op.k;
    rep.N = op.N;
    const int n = op.dim();

    std::vector<Complex> vals(n);
    Eigen::MatrixXcd vecs;
    if (op.symmetric) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(
            op.mat, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw EigensolverError("self-adjoint eigensolver failed");
        for (int i = 0; i < n; ++i) vals[i] = Complex(es.eigenvalues()[i], 0.0);
        if (want_vectors) vecs = es.eigenvectors().cast<Complex>();
    } else {
        Eigen::EigenSolver<MatrixXd> es(op.mat, want_vectors);
        if (es.info() != Eigen::Success) throw EigensolverError("eigensolver failed");
        for (int i = 0; i < n; ++i) vals[i] = es.eigenvalues()[i];
        if (want_vectors) vecs = es.eigenvectors();
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals[a].real() != vals[b].real()) return vals[a].real() < vals[b].real();
        return vals[a].imag() < vals[b].imag();
    });

    rep.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) rep.eigenvalues[i] = vals[order[i]];
    if (want_vectors) {
        Eigen::MatrixXcd sorted(n, n);
        for (int i = 0; i < n; ++i) sorted.col(i) = vecs.col(order[i]);
        rep.eigvectors = std::move(sorted);
    }

    double amax = 0.0;
    for (const auto& ev : rep.eigenvalues) amax = std::max(amax, std::abs(ev));
    rep.zero_tol = zero_tol >= 0.0 ? zero_tol : 1e-8 * amax;
    for (const auto& ev : rep.eigenvalues) {
        if (std::abs(ev) <= rep.zero_tol) {
            ++rep.kernel_dim;
        } else if (ev.real() < -rep.zero_tol) {
            ++rep.neg_count;
        }
    }
    return rep;
}

}  // namespace gzk
