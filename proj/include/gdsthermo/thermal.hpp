#pragma once

// Thermal-equilibrium analysis: Gibbs covariances from a Hamiltonian Hessian,
// recovery of the Hessian from a covariance, the commuting-set audit of
// equilibrium, spectral relations between noise matrices, and the family of
// effective Hamiltonians sharing a stationary state.

#include "moments.hpp"

#include <cmath>
#include <stdexcept>

namespace gdsthermo {

/// Thermal target: Gibbs state of H = (1/2) x^T B x at inverse temperature
/// beta, with B symmetric positive definite.
struct ThermalSpec {
    int n = 1;
    Mat B;
    double beta = 1.0;
    double hbar = 1.0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("ThermalSpec: mode count must be >= 1");
        if (B.rows() != 2 * n || B.cols() != 2 * n)
            throw std::invalid_argument("ThermalSpec: B must be 2n x 2n");
        if (beta <= 0.0) throw std::invalid_argument("ThermalSpec: beta must be positive");
        if (hbar <= 0.0) throw std::invalid_argument("ThermalSpec: hbar must be positive");
    }
};

struct ThermalProfile {
    Mat S_th;  ///< S_th^{-T} B S_th^{-1} = diag(w)(+)diag(w)
    Vec w;     ///< normal-mode frequencies, ascending
    Vec k_th;  ///< k_j = (1/2) coth(hbar beta w_j / 2)
    Mat V_th;  ///< Gibbs covariance S_th^{-1} (k(+)k) S_th^{-T}
};

inline ThermalProfile thermal_covariance(const ThermalSpec& ts) {
    ts.validate();
    const auto wB = williamson(ts.B); // S_B B S_B^T = w (+) w
    ThermalProfile out;
    out.w = wB.spectrum;
    out.S_th = wB.S.transpose().inverse();
    out.k_th = Vec(ts.n);
    for (int j = 0; j < ts.n; ++j)
        out.k_th(j) = 0.5 / std::tanh(0.5 * ts.hbar * ts.beta * out.w(j));
    Vec kk(2 * ts.n);
    kk << out.k_th, out.k_th;
    out.V_th = wB.S.transpose() * kk.asDiagonal() * wB.S;
    out.V_th = 0.5 * (out.V_th + out.V_th.transpose()).eval();
    return out;
}

struct HessianRecovery {
    Mat S_th;        ///< normal-mode congruence recovered from V
    Mat hbar_beta_B; ///< U = hbar beta B
};

/// Invert the Gibbs map: from a strictly mixed covariance V recover
/// U = hbar beta B via the Williamson route.
inline HessianRecovery hessian_from_covariance(const Mat& V) {
    const auto wV = williamson(V);
    HessianRecovery out;
    out.S_th = wV.S;
    GaussianState st;
    st.mean = Vec::Zero(V.rows());
    st.V = V;
    out.hbar_beta_B = u_matrix(st);
    return out;
}

struct ThermalAuditReport {
    double comm_JD_JC = 0.0;   ///< ||[JD, JC]||_max
    double comm_JV_JD = 0.0;   ///< ||[JV, JD]||_max
    double comm_JV_JC = 0.0;   ///< ||[JV, JC]||_max
    double lyapunov_residual = 0.0;     ///< ||C J V + V J C - D/hbar||_max
    double closed_form_residual = 0.0;  ///< ||J V - (1/2 hbar) JD (JC)^{-1}||_max
    bool closed_form_applicable = false;
    bool verdict = false;
    double tol = 0.0;
};

/// Equilibrium audit: V is the thermal stationary covariance of the noise pair
/// (D, C) iff {JV, JD, JC} commute and the Lyapunov identity
/// C J V + V J C = D/hbar holds; when JC is invertible also
/// J V = (1/2 hbar) JD (JC)^{-1}.
inline ThermalAuditReport theorem1_audit(const NoiseMatrices& nm, const Mat& V,
                                         double tol = kDefaultTol) {
    detail::require_symmetric(V, "theorem1_audit");
    const int n = static_cast<int>(V.rows()) / 2;
    const Mat J = standard_form(n);
    const Mat JD = J * nm.D, JC = J * nm.C, JV = J * V;

    ThermalAuditReport r;
    r.tol = tol;
    auto cnorm = [](const Mat& X, const Mat& Y) {
        return (X * Y - Y * X).cwiseAbs().maxCoeff();
    };
    r.comm_JD_JC = cnorm(JD, JC);
    r.comm_JV_JD = cnorm(JV, JD);
    r.comm_JV_JC = cnorm(JV, JC);
    r.lyapunov_residual =
        (nm.C * J * V + V * J * nm.C - nm.D / nm.hbar).cwiseAbs().maxCoeff();

    Eigen::JacobiSVD<Mat> svd(JC);
    const double smax = svd.singularValues()(0);
    r.closed_form_applicable =
        smax > 0.0 && svd.singularValues().minCoeff() > 1e-12 * smax;
    if (r.closed_form_applicable) {
        // X = (1/2 hbar) JD (JC)^{-1} via a transposed solve.
        const Mat X = JC.transpose()
                          .partialPivLu()
                          .solve(JD.transpose() * (0.5 / nm.hbar))
                          .transpose();
        r.closed_form_residual = (JV - X).cwiseAbs().maxCoeff();
    }

    const double scale = std::max(
        {1.0, JD.cwiseAbs().maxCoeff(), JC.cwiseAbs().maxCoeff(),
         JV.cwiseAbs().maxCoeff()});
    r.verdict = r.comm_JD_JC <= tol * scale && r.comm_JV_JD <= tol * scale &&
                r.comm_JV_JC <= tol * scale &&
                r.lyapunov_residual <= tol * scale &&
                (!r.closed_form_applicable ||
                 r.closed_form_residual <= tol * scale);
    return r;
}

inline ThermalAuditReport theorem1_audit(const NoiseMatrices& nm,
                                         const ThermalSpec& ts,
                                         double tol = kDefaultTol) {
    return theorem1_audit(nm, thermal_covariance(ts).V_th, tol);
}

/// Integral form of the stationary covariance,
///   V = (1/hbar) int_0^inf e^{-CJt} D e^{-JCt} dt,
/// evaluated by composite Simpson out to T = 60/|spectral abscissa of -CJ|.
inline Mat thermal_covariance_integral(const NoiseMatrices& nm,
                                       double ds = 2.5e-2) {
    const int n = static_cast<int>(nm.D.rows()) / 2;
    const Mat J = standard_form(n);
    const Mat G = -nm.C * J; // e^{Gt} D e^{G^T t}
    const auto hw = is_hurwitz(G);
    if (!hw.hurwitz)
        throw std::domain_error(
            "thermal_covariance_integral: -CJ is not Hurwitz, integral diverges");
    const double T = 60.0 / std::abs(hw.abscissa);
    int segments = std::max(2, static_cast<int>(std::ceil(T / ds)));
    if (segments % 2 != 0) ++segments;
    const double h = T / segments;
    const Mat E = (G * h).exp();
    Mat Ek = Mat::Identity(2 * n, 2 * n);
    Mat acc = Mat::Zero(2 * n, 2 * n);
    for (int k = 0; k <= segments; ++k) {
        const double wgt = (k == 0 || k == segments) ? 1.0
                           : (k % 2 == 1)            ? 4.0
                                                     : 2.0;
        acc += wgt * (Ek * nm.D * Ek.transpose());
        if (k < segments) Ek = (E * Ek).eval();
    }
    Mat V = (h / 3.0) * acc / nm.hbar;
    return 0.5 * (V + V.transpose());
}

struct SpectraRelation {
    Vec d;       ///< spectral diffusion rates: (JD)_d = i hbar d (+) -i hbar d
    Vec jc;      ///< spectral drift rates: (JC)_d = jc (+) jc
    Vec ratio;   ///< d ./ jc
    Vec expected;///< 2 k_th = coth(hbar beta w / 2)
    double offdiag = 0.0; ///< largest off-diagonal leak in the transformed pair
};

/// Simultaneous spectral form of JD and JC in the thermal eigenbasis; at
/// equilibrium the per-mode ratio d_j / jc_j equals coth(hbar beta w_j / 2).
inline SpectraRelation spectra_relation(const NoiseMatrices& nm,
                                        const ThermalSpec& ts,
                                        double tol = kDefaultTol) {
    const auto prof = thermal_covariance(ts);
    const auto audit = theorem1_audit(nm, prof.V_th, tol);
    if (!audit.verdict)
        throw std::domain_error(
            "spectra_relation: noise pair is not at thermal equilibrium with the target");
    const int n = ts.n;
    const Mat J = standard_form(n);
    const CMat G = (q_matrix(n) * prof.S_th.cast<Complex>()).adjoint();
    const CMat Ginv = G.inverse();
    const CMat JDd = Ginv * (J * nm.D).cast<Complex>() * G;
    const CMat JCd = Ginv * (J * nm.C).cast<Complex>() * G;

    SpectraRelation out;
    out.d = Vec(n);
    out.jc = Vec(n);
    out.ratio = Vec(n);
    out.expected = 2.0 * prof.k_th;
    for (int j = 0; j < n; ++j) {
        out.d(j) = JDd(j, j).imag() / ts.hbar;
        out.jc(j) = JCd(j, j).real();
        out.ratio(j) = out.d(j) / out.jc(j);
    }
    CMat leakD = JDd, leakC = JCd;
    leakD.diagonal().setZero();
    leakC.diagonal().setZero();
    out.offdiag = std::max(leakD.cwiseAbs().maxCoeff(), leakC.cwiseAbs().maxCoeff());
    return out;
}

/// Effective Hamiltonian Hessians commuting with the thermal structure:
/// B' = S_th^T (diag(lambda)(+)diag(lambda)) S_th shares the stationary
/// state for any real lambda (lambda = w recovers B itself, lambda = 0 the
/// trivial Hamiltonian).
inline Mat commuting_heff(const ThermalSpec& ts, const Vec& lambda) {
    if (lambda.size() != ts.n)
        throw std::invalid_argument("commuting_heff: need one lambda per mode");
    const auto prof = thermal_covariance(ts);
    Vec ll(2 * ts.n);
    ll << lambda, lambda;
    Mat Bp = prof.S_th.transpose() * ll.asDiagonal() * prof.S_th;
    return 0.5 * (Bp + Bp.transpose());
}

} // namespace gdsthermo
