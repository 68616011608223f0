#pragma once

// Construction of semigroups obeying quantum detailed balance with respect to
// a Gibbs target: noise matrices, canonical Lindblad vectors built on the
// eigenvectors of JB, congruence invariance under the Hamiltonian flow, and
// the high-temperature / low-temperature / diffusive limits.

#include "thermal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdsthermo {

/// Detailed-balance bath specification: a thermal target plus one positive
/// coupling rate per normal mode (modes ordered by ascending frequency).
/// In diffusive mode the couplings are the constants c_j = nbar_j gamma_j of
/// the classical limit instead of the rates gamma_j.
struct QdbcSpec {
    ThermalSpec thermal;
    Vec couplings;
    bool diffusive = false;

    void validate() const {
        thermal.validate();
        if (couplings.size() != thermal.n)
            throw std::invalid_argument("QdbcSpec: need one coupling per mode");
        if (couplings.minCoeff() <= 0.0)
            throw std::invalid_argument("QdbcSpec: couplings must be positive");
    }
};

/// Noise matrices of the detailed-balance semigroup:
///   D = hbar^2 S_th^{-1} (g k (+) g k) S_th^{-T},
///   C = (hbar/2)  S_th^{-1} J^T (g (+) g) S_th^{-T}.
inline NoiseMatrices build_noise(const QdbcSpec& qs) {
    qs.validate();
    if (qs.diffusive)
        throw std::invalid_argument(
            "build_noise: diffusive spec has no detailed-balance noise pair; "
            "use limit_regimes");
    const auto prof = thermal_covariance(qs.thermal);
    const int n = qs.thermal.n;
    const double hbar = qs.thermal.hbar;
    const Mat J = standard_form(n);
    const Mat Sinv = prof.S_th.inverse();
    Vec gk(2 * n), gg(2 * n);
    for (int j = 0; j < n; ++j) {
        gk(j) = gk(n + j) = qs.couplings(j) * prof.k_th(j);
        gg(j) = gg(n + j) = qs.couplings(j);
    }
    NoiseMatrices nm;
    nm.hbar = hbar;
    nm.D = hbar * hbar * Sinv * gk.asDiagonal() * Sinv.transpose();
    nm.D = 0.5 * (nm.D + nm.D.transpose()).eval();
    nm.C = 0.5 * hbar * Sinv * J.transpose() * gg.asDiagonal() * Sinv.transpose();
    nm.C = 0.5 * (nm.C - nm.C.transpose()).eval();
    nm.Gamma = (nm.D / hbar).cast<Complex>() +
               Complex(0.0, 1.0) * nm.C.cast<Complex>();
    return nm;
}

/// Canonical Lindblad vectors of the detailed-balance semigroup.  With
/// lbar_j = column j of (Q S_th)^{-1} (eigenvector of JB for +i w_j):
///   l_j     = |s_j| lbar_j,              |s_j|^2 = hbar gamma_j (nbar_j + 1),
///   l_{n+j} = |s_j| e^{-hbar beta w_j/2} conj(lbar_j),
/// so |r_j|^2 = e^{-hbar beta w_j} |s_j|^2 (detailed-balance ratio).
struct LindbladSet {
    std::vector<CVec> vectors; ///< 2n vectors: lowering family then raising family
    Vec w;                     ///< mode frequencies, ascending
    Vec nbar;                  ///< thermal occupations
    Vec s2;                    ///< |s_j|^2
    Vec r2;                    ///< |r_j|^2
};

inline LindbladSet build_lindblad_vectors(const QdbcSpec& qs) {
    qs.validate();
    if (qs.diffusive)
        throw std::invalid_argument(
            "build_lindblad_vectors: not defined in diffusive mode");
    const auto prof = thermal_covariance(qs.thermal);
    const int n = qs.thermal.n;
    const double hbar = qs.thermal.hbar;
    const CMat T = (q_matrix(n) * prof.S_th.cast<Complex>()).inverse();

    LindbladSet out;
    out.w = prof.w;
    out.nbar = Vec(n);
    out.s2 = Vec(n);
    out.r2 = Vec(n);
    out.vectors.resize(2 * n);
    for (int j = 0; j < n; ++j) {
        const double x = hbar * qs.thermal.beta * prof.w(j);
        out.nbar(j) = 1.0 / std::expm1(x);
        out.s2(j) = hbar * qs.couplings(j) * (out.nbar(j) + 1.0);
        out.r2(j) = out.s2(j) * std::exp(-x);
        const CVec lbar = T.col(j);
        out.vectors[j] = std::sqrt(out.s2(j)) * lbar;
        out.vectors[n + j] = std::sqrt(out.r2(j)) * lbar.conjugate();
    }
    return out;
}

struct EigenoperatorReport {
    Vec residuals;     ///< ||JB lbar_j - i w_j lbar_j|| per mode
    Vec ratio_defects; ///< | |r_j|^2 / |s_j|^2 - e^{-hbar beta w_j} |
};

/// Check that the lowering-family vectors are eigenvectors of JB and that the
/// pair moduli obey the detailed-balance ratio.
inline EigenoperatorReport verify_eigenoperators(const LindbladSet& ls,
                                                 const ThermalSpec& ts) {
    const int n = ts.n;
    const Mat J = standard_form(n);
    const CMat JB = (J * ts.B).cast<Complex>();
    EigenoperatorReport r;
    r.residuals = Vec(n);
    r.ratio_defects = Vec(n);
    for (int j = 0; j < n; ++j) {
        const CVec& l = ls.vectors[j];
        r.residuals(j) = (JB * l - Complex(0.0, ls.w(j)) * l).norm() / l.norm();
        r.ratio_defects(j) =
            std::abs(ls.r2(j) / ls.s2(j) - std::exp(-ts.hbar * ts.beta * ls.w(j)));
    }
    return r;
}

/// Mix the Lindblad vectors by a unitary W (l'_k = sum_j W_kj l_j); leaves
/// Gamma, D, C invariant.
inline std::vector<CVec> mix_unitary(const std::vector<CVec>& ls, const CMat& W) {
    const int m = static_cast<int>(ls.size());
    if (W.rows() != m || W.cols() != m)
        throw std::invalid_argument("mix_unitary: unitary size mismatch");
    if ((W.adjoint() * W - CMat::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("mix_unitary: matrix is not unitary");
    std::vector<CVec> out(m);
    for (int k = 0; k < m; ++k) {
        CVec acc = CVec::Zero(ls[0].size());
        for (int j = 0; j < m; ++j) acc += W(k, j) * ls[j];
        out[k] = acc;
    }
    return out;
}

/// Largest congruence defect of the noise pair under the Hamiltonian flow
/// S_t = exp(JBt):  max over sample times of ||S_t D S_t^T - D|| and
/// ||S_t C S_t^T - C|| (max-norm).  Empty times default to
/// {0.1, 1, 5, 2 pi / w_min}.
inline double verify_congruence(const NoiseMatrices& nm, const ThermalSpec& ts,
                                std::vector<double> times = {}) {
    const auto prof = thermal_covariance(ts);
    if (times.empty())
        times = {0.1, 1.0, 5.0, 2.0 * M_PI / prof.w.minCoeff()};
    double worst = 0.0;
    for (double t : times) {
        const Mat St = hamiltonian_flow(ts.B, t);
        worst = std::max(worst,
                         (St * nm.D * St.transpose() - nm.D).cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (St * nm.C * St.transpose() - nm.C).cwiseAbs().maxCoeff());
    }
    return worst;
}

/// Coefficients of the induced quantum optical master equation per mode.
struct QomeCoefficients {
    Vec omega; ///< mode frequencies
    Vec nbar;  ///< thermal occupations
    Vec gamma; ///< coupling rates
    Vec gain;  ///< |r_j|^2 / hbar = gamma_j nbar_j  (raising channel)
    Vec loss;  ///< |s_j|^2 / hbar = gamma_j (nbar_j + 1)  (lowering channel)
};

inline QomeCoefficients qome_coefficients(const QdbcSpec& qs) {
    const auto ls = build_lindblad_vectors(qs);
    QomeCoefficients out;
    out.omega = ls.w;
    out.nbar = ls.nbar;
    out.gamma = qs.couplings;
    out.loss = ls.s2 / qs.thermal.hbar;
    out.gain = ls.r2 / qs.thermal.hbar;
    return out;
}

enum class Regime { high_temperature, low_temperature, diffusive };

struct LimitRegime {
    Mat D, C;          ///< noise pair of the regime
    Mat V_approx;      ///< limit-form covariance (empty in diffusive mode)
    Mat D_approx;      ///< limit-form diffusion (empty in diffusive mode)
    double v_rel_error = 0.0;  ///< ||V_th - V_approx|| / ||V_th||
    double d_rel_error = 0.0;  ///< ||D - D_approx|| / ||D||
    double spectral_abscissa = 0.0; ///< of the drift A = JB - CJ
    bool stationary = false;
    std::string note;
};

inline LimitRegime limit_regimes(const QdbcSpec& qs, Regime regime) {
    qs.validate();
    const int n = qs.thermal.n;
    const double hbar = qs.thermal.hbar;
    const Mat J = standard_form(n);
    const auto prof = thermal_covariance(qs.thermal);
    const Mat Sinv = prof.S_th.inverse();
    LimitRegime out;

    if (regime == Regime::diffusive) {
        // nbar -> inf, gamma -> 0 with c = nbar gamma fixed: C vanishes and
        // the drift is purely Hamiltonian, so no stationary state exists.
        Vec cc(2 * n);
        for (int j = 0; j < n; ++j) cc(j) = cc(n + j) = qs.couplings(j);
        out.D = hbar * hbar * Sinv * cc.asDiagonal() * Sinv.transpose();
        out.D = 0.5 * (out.D + out.D.transpose()).eval();
        out.C = Mat::Zero(2 * n, 2 * n);
        out.spectral_abscissa = is_hurwitz(J * qs.thermal.B).abscissa;
        out.stationary = false;
        out.note = "no stationary state: C = 0 leaves a purely Hamiltonian drift";
        return out;
    }
    if (qs.diffusive)
        throw std::invalid_argument(
            "limit_regimes: diffusive spec supports only the diffusive regime");

    const auto nm = build_noise(qs);
    out.D = nm.D;
    out.C = nm.C;
    GdsSpec gspec{n, qs.thermal.B, Vec::Zero(2 * n), {}, hbar};
    out.spectral_abscissa = is_hurwitz(drift_matrix(gspec, nm)).abscissa;
    out.stationary = out.spectral_abscissa < 0.0;

    if (regime == Regime::high_temperature) {
        // k_th ~ 1/(hbar beta w): V ~ (hbar beta B)^{-1}, D ~ classical form.
        out.V_approx = (qs.thermal.hbar * qs.thermal.beta * qs.thermal.B).inverse();
        Vec gw(2 * n);
        for (int j = 0; j < n; ++j)
            gw(j) = gw(n + j) = qs.couplings(j) / prof.w(j);
        out.D_approx =
            (hbar / qs.thermal.beta) * Sinv * gw.asDiagonal() * Sinv.transpose();
        out.note = "high-temperature limit";
    } else {
        // k_th -> 1/2: the target approaches the multimode ground state.
        // D follows from the exact Lyapunov identity D/hbar = 2 Sym(V J C)
        // with V at its ground-state value.
        out.V_approx = 0.5 * Sinv * Sinv.transpose();
        out.D_approx = 2.0 * hbar * out.V_approx * J * nm.C;
        out.note = "low-temperature limit";
    }
    out.D_approx = 0.5 * (out.D_approx + out.D_approx.transpose()).eval();
    out.v_rel_error =
        (prof.V_th - out.V_approx).norm() / prof.V_th.norm();
    out.d_rel_error = (nm.D - out.D_approx).norm() / nm.D.norm();
    return out;
}

} // namespace gdsthermo
