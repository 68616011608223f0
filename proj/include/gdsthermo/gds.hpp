#pragma once

// Gaussian dynamical semigroup model: quadratic Hamiltonian + linear Lindblad
// vectors, the decoherence/diffusion matrices they generate, drift matrices,
// and Gaussian (Wigner) state utilities.

#include "symplectic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gdsthermo {

/// One Gaussian semigroup: H_eff = (1/2) x^T B' x + x^T J xi', and Lindblad
/// operators L_k = l_k^T J x with complex vectors l_k.
struct GdsSpec {
    int n = 1;
    Mat B_prime;                      ///< 2n x 2n symmetric Hessian
    Vec xi_prime;                     ///< 2n linear coefficient (may be zero)
    std::vector<CVec> lindblad_vectors;
    double hbar = 1.0;
};

/// Noise data of a semigroup: Gamma = sum_k l_k l_k^dagger (Hermitian PSD),
/// D = hbar Re Gamma (symmetric PSD), C = Im Gamma (antisymmetric).
struct NoiseMatrices {
    CMat Gamma;
    Mat D;
    Mat C;
    double hbar = 1.0;
};

/// Gaussian state: mean <x> and dimensionless covariance
/// V = (1/2 hbar) <{Delta x, Delta x^T}>.
struct GaussianState {
    Vec mean;
    Mat V;
    double hbar = 1.0;
};

inline NoiseMatrices decoherence_matrix(const std::vector<CVec>& ls, int n,
                                        double hbar = 1.0) {
    if (n < 1)
        throw std::invalid_argument("decoherence_matrix: mode count must be >= 1");
    if (hbar <= 0.0)
        throw std::invalid_argument("decoherence_matrix: hbar must be positive");
    const int dim = 2 * n;
    CMat Gamma = CMat::Zero(dim, dim);
    for (const auto& l : ls) {
        if (l.size() != dim)
            throw std::invalid_argument(
                "decoherence_matrix: Lindblad vector length does not match 2n");
        Gamma += l * l.adjoint();
    }
    NoiseMatrices out;
    out.Gamma = 0.5 * (Gamma + Gamma.adjoint());
    out.D = hbar * out.Gamma.real();
    out.C = out.Gamma.imag();
    out.D = 0.5 * (out.D + out.D.transpose()).eval();
    out.C = 0.5 * (out.C - out.C.transpose()).eval();
    out.hbar = hbar;
    return out;
}

inline NoiseMatrices noise_from_spec(const GdsSpec& spec) {
    return decoherence_matrix(spec.lindblad_vectors, spec.n, spec.hbar);
}

struct FdCheck {
    bool pass = false;
    double min_eig = 0.0; ///< smallest eigenvalue of D + i hbar C
};

/// Fluctuation-dissipation constraint: hbar Gamma = D + i hbar C >= 0.
inline FdCheck fluctuation_dissipation_check(const NoiseMatrices& nm,
                                             double tol = 1e-10) {
    const CMat H =
        nm.D.cast<Complex>() + Complex(0.0, nm.hbar) * nm.C.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> sa(0.5 * (H + H.adjoint()));
    const double scale = std::max(1.0, sa.eigenvalues().cwiseAbs().maxCoeff());
    FdCheck out;
    out.min_eig = sa.eigenvalues().minCoeff();
    out.pass = out.min_eig >= -tol * scale;
    return out;
}

struct Lemma1Report {
    bool c_invertible = false;
    double det_C = 0.0;
    double min_eig_D = 0.0;
    double min_eig_Gamma = 0.0;
    bool consistent = false; ///< det C != 0 implies D > 0 and Gamma > 0
};

/// If C is invertible then both D and Gamma must be positive definite.
inline Lemma1Report lemma1_check(const NoiseMatrices& nm, double tol = 1e-10) {
    Lemma1Report r;
    r.det_C = nm.C.determinant();
    Eigen::JacobiSVD<Mat> svd(nm.C);
    const double smax = svd.singularValues()(0);
    r.c_invertible =
        smax > 0.0 && svd.singularValues().minCoeff() > 1e-12 * smax;
    r.min_eig_D = Eigen::SelfAdjointEigenSolver<Mat>(nm.D).eigenvalues().minCoeff();
    r.min_eig_Gamma =
        Eigen::SelfAdjointEigenSolver<CMat>(nm.Gamma).eigenvalues().minCoeff();
    r.consistent = !r.c_invertible || (r.min_eig_D > tol && r.min_eig_Gamma > tol);
    return r;
}

/// Drift matrix of the first/second moment equations: A = J B' - C J.
inline Mat drift_matrix(const GdsSpec& spec, const NoiseMatrices& nm) {
    detail::require_symmetric(spec.B_prime, "drift_matrix");
    const Mat J = standard_form(spec.n);
    return J * spec.B_prime - nm.C * J;
}

/// Gaussian Wigner function value at phase-space point x.
inline double wigner_eval(const GaussianState& st, const Vec& x) {
    const int dim = static_cast<int>(st.V.rows());
    if (x.size() != dim || st.mean.size() != dim)
        throw std::invalid_argument("wigner_eval: dimension mismatch");
    Eigen::LLT<Mat> llt(st.V);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("wigner_eval: covariance must be positive definite");
    const Vec d = x - st.mean;
    const double quad = d.dot(llt.solve(d));
    const double detV = st.V.determinant();
    const int n = dim / 2;
    return std::exp(-quad / (2.0 * st.hbar)) /
           (std::pow(2.0 * M_PI * st.hbar, n) * std::sqrt(detV));
}

/// Non-unitary part of the Wigner phase-space current for a Gaussian state:
/// v_NU(x) = [ (1/2 hbar) D V^{-1} (x - m) - C J x ] W(x).
inline Vec nu_current(const GaussianState& st, const NoiseMatrices& nm,
                      const Vec& x) {
    const int n = static_cast<int>(st.V.rows()) / 2;
    const Mat J = standard_form(n);
    Eigen::LLT<Mat> llt(st.V);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("nu_current: covariance must be positive definite");
    const Vec drift =
        (0.5 / st.hbar) * (nm.D * llt.solve(x - st.mean)) - nm.C * (J * x);
    return drift * wigner_eval(st, x);
}

/// Hessian-like matrix U with V = f(U): U = S^{-T} (g(kappa)(+)g(kappa)) S^{-1}
/// from the Williamson form of V.  For a Gibbs state U = hbar beta B.
inline Mat u_matrix(const GaussianState& st) {
    auto w = williamson(st.V);
    const int n = static_cast<int>(w.spectrum.size());
    Vec g(2 * n);
    for (int j = 0; j < n; ++j) {
        if (w.spectrum(j) < 0.5 + 1e-9)
            throw std::domain_error(
                "u_matrix: symplectic eigenvalue at the pure-state boundary");
        g(j) = g(n + j) = g_function(w.spectrum(j));
    }
    const Mat Sinv = w.S.inverse();
    return Sinv.transpose() * g.asDiagonal() * Sinv;
}

/// Bona fide test: V + (i/2) J >= 0, i.e. all symplectic eigenvalues >= 1/2.
inline bool is_bona_fide(const Mat& V, double tol = 1e-8) {
    return symplectic_spectrum(V).minCoeff() >= 0.5 - tol;
}

} // namespace gdsthermo
