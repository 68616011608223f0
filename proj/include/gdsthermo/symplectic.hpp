#pragma once

// Symplectic kinematics: the standard form matrix, Williamson normal form,
// the complex diagonalization of Hamiltonian matrices, and symplectic flows.

#include "types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gdsthermo {

/// Standard symplectic form for n modes in (q_1..q_n, p_1..p_n) ordering:
/// J = [[0, I], [-I, 0]].  J^{-1} = J^T = -J.
inline Mat standard_form(int n) {
    if (n < 1)
        throw std::invalid_argument("standard_form: mode count must be >= 1");
    Mat J = Mat::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Mat::Identity(n, n);
    J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return J;
}

/// Unitary change of basis used to diagonalize Hamiltonian matrices:
/// Q = (1/sqrt(2)) [[I, -iI], [-iI, I]].  Q = Q^T, Q^{-1} = Q^dagger,
/// and Q^T J Q = J.
inline CMat q_matrix(int n) {
    if (n < 1)
        throw std::invalid_argument("q_matrix: mode count must be >= 1");
    const Complex mi(0.0, -1.0);
    CMat Q = CMat::Zero(2 * n, 2 * n);
    Q.topLeftCorner(n, n) = CMat::Identity(n, n);
    Q.topRightCorner(n, n) = mi * CMat::Identity(n, n);
    Q.bottomLeftCorner(n, n) = mi * CMat::Identity(n, n);
    Q.bottomRightCorner(n, n) = CMat::Identity(n, n);
    return Q / std::sqrt(2.0);
}

/// g(x) = 2 arcoth(2x) = ln((2x+1)/(2x-1)), defined for x > 1/2.
/// Inverse of x = (1/2) coth(y/2).
inline double g_function(double x) {
    if (!(x > 0.5))
        throw std::domain_error(
            "g_function: argument must exceed 1/2 (pure-state boundary), got " +
            std::to_string(x));
    return std::log((2.0 * x + 1.0) / (2.0 * x - 1.0));
}

namespace detail {

inline void require_symmetric(const Mat& M, const char* who) {
    if (M.rows() != M.cols() || M.rows() % 2 != 0 || M.rows() == 0)
        throw std::invalid_argument(std::string(who) + ": need a 2n x 2n matrix");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

/// Symplectic eigenbasis of a symmetric positive definite 2n x 2n matrix O.
/// Returns the complex matrix T = (Q S)^{-1} whose first n columns v_j are the
/// eigenvectors of O J for eigenvalues +i kappa_j (kappa ascending) normalized
/// to v^T J conj(v) = -i, and whose last n columns are i conj(v_j); plus the
/// symplectic spectrum kappa.
struct SymplecticEigenbasis {
    CMat T;
    Vec kappa;
};

inline SymplecticEigenbasis symplectic_eigenbasis(const Mat& O) {
    require_symmetric(O, "williamson");
    const int dim = static_cast<int>(O.rows());
    const int n = dim / 2;
    const Mat Osym = 0.5 * (O + O.transpose());

    Eigen::SelfAdjointEigenSolver<Mat> sa(Osym);
    const double scale = std::max(1.0, sa.eigenvalues().cwiseAbs().maxCoeff());
    if (sa.eigenvalues().minCoeff() <= 1e-12 * scale)
        throw std::domain_error(
            "williamson: matrix must be positive definite (min eigenvalue " +
            std::to_string(sa.eigenvalues().minCoeff()) + ")");

    const Mat J = standard_form(n);
    Eigen::EigenSolver<Mat> es(Osym * J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("williamson: eigensolver failed");

    // Keep the +i kappa family, sorted by kappa ascending (stable in the
    // solver's index order on ties).
    std::vector<int> idx;
    for (int k = 0; k < dim; ++k)
        if (es.eigenvalues()(k).imag() > 0.0) idx.push_back(k);
    if (static_cast<int>(idx.size()) != n)
        throw std::runtime_error("williamson: spectrum did not split into conjugate pairs");
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return es.eigenvalues()(a).imag() < es.eigenvalues()(b).imag();
    });

    Vec kappa(n);
    std::vector<CVec> v(n);
    for (int j = 0; j < n; ++j) {
        kappa(j) = es.eigenvalues()(idx[j]).imag();
        v[j] = es.eigenvectors().col(idx[j]);
    }

    const CMat Jc = J.cast<Complex>();
    // Hermitian positive form on the +i kappa family: h(u,w) = i u^T J conj(w).
    auto h = [&](const CVec& u, const CVec& w) -> Complex {
        return Complex(0.0, 1.0) * (u.transpose() * Jc * w.conjugate())(0);
    };

    // Within a degenerate kappa block the eigenvectors are an arbitrary basis;
    // Gram-Schmidt in index order against h keeps the construction
    // deterministic for a given input.
    int blockStart = 0;
    for (int j = 0; j < n; ++j) {
        const bool newBlock =
            j > 0 && kappa(j) - kappa(j - 1) > 1e-8 * std::max(1.0, kappa(j));
        if (newBlock) blockStart = j;
        for (int m = blockStart; m < j; ++m)
            v[j] -= (h(v[j], v[m]) / h(v[m], v[m])) * v[m];
        const double d = h(v[j], v[j]).real();
        if (!(d > 0.0))
            throw std::runtime_error("williamson: degenerate eigenbasis is not h-positive");
        v[j] /= std::sqrt(d);
        // Deterministic phase: largest-magnitude component (first on ties)
        // rotated to the positive real axis.
        int imax = 0;
        double best = std::abs(v[j](0));
        for (int m = 1; m < dim; ++m) {
            const double a = std::abs(v[j](m));
            if (a > best + 1e-12) { best = a; imax = m; }
        }
        v[j] *= std::polar(1.0, -std::arg(v[j](imax)));
    }

    // T J T^T = J fixes the conjugate-family phase to i conj(v_j).
    CMat T(dim, dim);
    for (int j = 0; j < n; ++j) {
        T.col(j) = v[j];
        T.col(n + j) = Complex(0.0, 1.0) * v[j].conjugate();
    }
    return {T, kappa};
}

} // namespace detail

struct WilliamsonDecomposition {
    Mat S;        ///< symplectic congruence, S J S^T = J
    Vec spectrum; ///< symplectic eigenvalues kappa_1 <= ... <= kappa_n
};

/// Williamson normal form of a symmetric positive definite V:
/// S V S^T = diag(kappa) (+) diag(kappa) with S symplectic.
inline WilliamsonDecomposition williamson(const Mat& V) {
    const auto eb = detail::symplectic_eigenbasis(V);
    const int n = static_cast<int>(eb.kappa.size());
    const CMat Sc = q_matrix(n).adjoint() * eb.T.inverse();
    const double imagNorm = Sc.imag().cwiseAbs().maxCoeff();
    if (imagNorm > 1e-8 * std::max(1.0, Sc.real().cwiseAbs().maxCoeff()))
        throw std::runtime_error("williamson: recovered transformation is not real");
    WilliamsonDecomposition out{Sc.real(), eb.kappa};

    const Mat J = standard_form(n);
    const Mat sympDefect = out.S * J * out.S.transpose() - J;
    if (sympDefect.cwiseAbs().maxCoeff() > 1e-8)
        throw std::runtime_error("williamson: result failed the symplectic check");
    return out;
}

/// Symplectic eigenvalues of a symmetric positive definite V without the
/// congruence matrix: the positive imaginary parts of spec(V J), ascending.
inline Vec symplectic_spectrum(const Mat& V) {
    detail::require_symmetric(V, "symplectic_spectrum");
    const int n = static_cast<int>(V.rows()) / 2;
    Eigen::EigenSolver<Mat> es(V * standard_form(n));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symplectic_spectrum: eigensolver failed");
    std::vector<double> ks;
    for (int k = 0; k < 2 * n; ++k)
        if (es.eigenvalues()(k).imag() > 0.0)
            ks.push_back(es.eigenvalues()(k).imag());
    if (static_cast<int>(ks.size()) != n)
        throw std::runtime_error("symplectic_spectrum: spectrum did not split into pairs");
    std::sort(ks.begin(), ks.end());
    return Eigen::Map<Vec>(ks.data(), n);
}

struct Lemma2Result {
    CMat M; ///< similarity M X M^{-1} = diag(i o) (+) diag(-i o)
    Vec o;  ///< symplectic spectrum of O, ascending
};

/// Complex diagonalization of a Hamiltonian matrix built from a symmetric
/// positive definite O.  With S O S^T = diag(o)(+)diag(o):
///   variant OJ (default):  M = Q S        diagonalizes O J,
///   variant JO:            M = Q S^{-T}   diagonalizes J O.
inline Lemma2Result lemma2_diagonalize(const Mat& O, bool jo_variant = false) {
    auto w = williamson(O);
    const int n = static_cast<int>(w.spectrum.size());
    const Mat Sm = jo_variant ? Mat(w.S.inverse().transpose()) : w.S;
    return {q_matrix(n) * Sm.cast<Complex>(), w.spectrum};
}

/// Symplectic flow exp(J B t) generated by a symmetric Hessian B.  For
/// positive definite B the flow is assembled from the complex eigenbasis
/// (exactly symplectic up to roundoff); otherwise a Pade matrix exponential
/// is used.
inline Mat hamiltonian_flow(const Mat& B, double t) {
    detail::require_symmetric(B, "hamiltonian_flow");
    const int n = static_cast<int>(B.rows()) / 2;
    Eigen::SelfAdjointEigenSolver<Mat> sa(0.5 * (B + B.transpose()));
    const double scale = std::max(1.0, sa.eigenvalues().cwiseAbs().maxCoeff());
    if (sa.eigenvalues().minCoeff() > 1e-10 * scale) {
        const auto l2 = lemma2_diagonalize(B, /*jo_variant=*/true);
        CVec phases(2 * n);
        for (int j = 0; j < n; ++j) {
            phases(j) = std::polar(1.0, l2.o(j) * t);
            phases(n + j) = std::polar(1.0, -l2.o(j) * t);
        }
        const CMat F = l2.M.inverse() * phases.asDiagonal() * l2.M;
        return F.real();
    }
    return Mat((standard_form(n) * B * t).exp());
}

} // namespace gdsthermo
