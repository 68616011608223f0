#pragma once

// Truncated Fock-space oracle: canonical operators at finite cutoff, the full
// Lindblad master equation for density matrices, Gibbs states, moment
// extraction, and the GNS (Kubo-Martin-Schwinger style) detailed-balance
// defect of the Heisenberg generator.

#include "gds.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gdsthermo {

namespace detail {

inline CMat kron(const CMat& A, const CMat& B) {
    CMat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

} // namespace detail

/// Canonical quadrature operators for n modes at Fock cutoff N per mode.
/// Basis index is little-endian in the mode index (mode 0 varies fastest).
struct CanonicalOps {
    int n = 1;
    int N = 0;
    int dim = 0;
    double hbar = 1.0;
    std::vector<CMat> q, p; ///< one per mode
    std::vector<CMat> a;    ///< lowering operators, one per mode
};

inline CanonicalOps build_canonical_ops(int n, int N, double hbar = 1.0) {
    if (n < 1 || N < 2)
        throw std::invalid_argument("build_canonical_ops: need n >= 1 and N >= 2");
    double dimd = std::pow(static_cast<double>(N), n);
    if (dimd > 4096.0)
        throw std::invalid_argument(
            "build_canonical_ops: cutoff budget exceeded (N^n > 4096)");
    CanonicalOps ops;
    ops.n = n;
    ops.N = N;
    ops.dim = static_cast<int>(dimd);
    ops.hbar = hbar;

    CMat low = CMat::Zero(N, N);
    for (int k = 1; k < N; ++k) low(k - 1, k) = std::sqrt(static_cast<double>(k));
    const double s = std::sqrt(hbar / 2.0);
    const CMat q1 = s * (low + low.adjoint());
    const CMat p1 = Complex(0.0, 1.0) * s * (low.adjoint() - low);

    for (int j = 0; j < n; ++j) {
        auto embed = [&](const CMat& M) {
            CMat left = CMat::Identity(static_cast<int>(std::pow(N, n - 1 - j)),
                                       static_cast<int>(std::pow(N, n - 1 - j)));
            CMat right = CMat::Identity(static_cast<int>(std::pow(N, j)),
                                        static_cast<int>(std::pow(N, j)));
            return detail::kron(left, detail::kron(M, right));
        };
        ops.a.push_back(embed(low));
        ops.q.push_back(embed(q1));
        ops.p.push_back(embed(p1));
    }
    return ops;
}

/// Quadrature vector (q_1..q_n, p_1..p_n) as operator list.
inline std::vector<CMat> quadrature_vector(const CanonicalOps& ops) {
    std::vector<CMat> X;
    X.insert(X.end(), ops.q.begin(), ops.q.end());
    X.insert(X.end(), ops.p.begin(), ops.p.end());
    return X;
}

/// H = (1/2) sum_jk B_jk X_j X_k (Hermitized).
inline CMat build_hamiltonian(const Mat& B, const CanonicalOps& ops) {
    detail::require_symmetric(B, "build_hamiltonian");
    if (B.rows() != 2 * ops.n)
        throw std::invalid_argument("build_hamiltonian: Hessian size mismatch");
    const auto X = quadrature_vector(ops);
    CMat H = CMat::Zero(ops.dim, ops.dim);
    for (int j = 0; j < 2 * ops.n; ++j)
        for (int k = 0; k < 2 * ops.n; ++k)
            if (B(j, k) != 0.0) H += (0.5 * B(j, k)) * (X[j] * X[k]);
    return 0.5 * (H + H.adjoint());
}

/// L_k = l_k^T J x as a Fock-space matrix.
inline std::vector<CMat> build_lindblad_ops(const std::vector<CVec>& ls,
                                            const CanonicalOps& ops) {
    const auto X = quadrature_vector(ops);
    const Mat J = standard_form(ops.n);
    std::vector<CMat> out;
    for (const auto& l : ls) {
        if (l.size() != 2 * ops.n)
            throw std::invalid_argument("build_lindblad_ops: vector size mismatch");
        const CVec coeff = J.transpose().cast<Complex>() * l; // (l^T J)^T
        CMat L = CMat::Zero(ops.dim, ops.dim);
        for (int m = 0; m < 2 * ops.n; ++m) L += coeff(m) * X[m];
        out.push_back(std::move(L));
    }
    return out;
}

/// Cached Lindblad generator with the convention
///   drho/dt = -(i/hbar)[H, rho]
///             + (1/2 hbar) sum_k (2 L rho L^+ - L^+L rho - rho L^+L).
struct LindbladGenerator {
    CMat H;
    std::vector<CMat> L, Ld, LdL;
    double hbar = 1.0;

    LindbladGenerator(CMat Heff, std::vector<CMat> Ls, double hb)
        : H(std::move(Heff)), L(std::move(Ls)), hbar(hb) {
        for (const auto& Lk : L) {
            Ld.push_back(Lk.adjoint());
            LdL.push_back(Ld.back() * Lk);
        }
    }

    CMat schrodinger(const CMat& rho) const {
        CMat out = Complex(0.0, -1.0 / hbar) * (H * rho - rho * H);
        for (size_t k = 0; k < L.size(); ++k)
            out += (1.0 / (2.0 * hbar)) *
                   (2.0 * (L[k] * rho * Ld[k]) - LdL[k] * rho - rho * LdL[k]);
        return out;
    }

    CMat heisenberg(const CMat& A) const {
        CMat out = Complex(0.0, 1.0 / hbar) * (H * A - A * H);
        for (size_t k = 0; k < L.size(); ++k)
            out += (1.0 / (2.0 * hbar)) *
                   (2.0 * (Ld[k] * A * L[k]) - A * LdL[k] - LdL[k] * A);
        return out;
    }
};

inline CMat generator_apply(const CMat& rho, const CMat& H,
                            const std::vector<CMat>& Ls, double hbar) {
    return LindbladGenerator(H, Ls, hbar).schrodinger(rho);
}

/// Gibbs state e^{-beta H} through the truncated spectral decomposition.
/// normalized=false returns the unnormalized sigma-bar used by GNS products.
inline CMat gibbs_state(const CMat& H, double beta, bool normalized = true) {
    Eigen::SelfAdjointEigenSolver<CMat> sa(H);
    if (sa.info() != Eigen::Success)
        throw std::runtime_error("gibbs_state: eigensolver failed");
    Vec ex = (-beta * sa.eigenvalues().array()).exp();
    CMat out = sa.eigenvectors() * ex.asDiagonal() *
               sa.eigenvectors().adjoint();
    if (normalized) out /= out.trace().real();
    return 0.5 * (out + out.adjoint());
}

/// Coherent-state vector per mode, |alpha> truncated at N levels.
inline CVec coherent_vector(int N, Complex alpha) {
    CVec v(N);
    Complex amp = std::exp(-0.5 * std::norm(alpha));
    for (int k = 0; k < N; ++k) {
        v(k) = amp;
        amp *= alpha / std::sqrt(static_cast<double>(k + 1));
    }
    return v;
}

/// Product coherent state |alpha_1> x ... x |alpha_n> as a density matrix.
inline CMat coherent_state(const CanonicalOps& ops, const CVec& alpha) {
    if (alpha.size() != ops.n)
        throw std::invalid_argument("coherent_state: one amplitude per mode");
    CVec psi = coherent_vector(ops.N, alpha(ops.n - 1));
    for (int j = ops.n - 2; j >= 0; --j) {
        const CVec nxt = coherent_vector(ops.N, alpha(j));
        CVec out(psi.size() * ops.N);
        for (int i = 0; i < psi.size(); ++i)
            out.segment(i * ops.N, ops.N) = psi(i) * nxt;
        psi = out;
    }
    psi /= psi.norm();
    return psi * psi.adjoint();
}

inline Vec extract_mean(const CMat& rho, const CanonicalOps& ops) {
    const auto X = quadrature_vector(ops);
    Vec m(2 * ops.n);
    for (int j = 0; j < 2 * ops.n; ++j) m(j) = (X[j] * rho).trace().real();
    return m;
}

/// Dimensionless covariance V = (1/2 hbar) Re Tr(rho Dx Dx^T).
inline Mat extract_cov(const CMat& rho, const CanonicalOps& ops) {
    const auto X = quadrature_vector(ops);
    const Vec m = extract_mean(rho, ops);
    Mat V(2 * ops.n, 2 * ops.n);
    for (int j = 0; j < 2 * ops.n; ++j)
        for (int k = j; k < 2 * ops.n; ++k) {
            // Re Tr(rho X_j X_k) is already the symmetrized second moment.
            const Complex t = (X[j] * X[k] * rho).trace();
            V(j, k) = V(k, j) = (t.real() - m(j) * m(k)) / ops.hbar;
        }
    return V;
}

struct MomentTrajectory {
    std::vector<double> times;
    std::vector<Vec> means;
    std::vector<Mat> covs;
};

struct OracleConfig {
    double dt = 2e-3;
    double t_max = 10.0;
    double sample_dt = 0.1;
    double trace_tol = 1e-8;
};

/// RK4 integration of the master equation with periodic moment sampling.
/// Aborts if the trace drifts beyond trace_tol (truncation leak).
inline MomentTrajectory integrate_moments(CMat rho, const LindbladGenerator& gen,
                                          const CanonicalOps& ops,
                                          const OracleConfig& cfg) {
    if (cfg.dt <= 0.0 || cfg.t_max < 0.0)
        throw std::invalid_argument("integrate_moments: bad time step");
    const int steps = static_cast<int>(std::ceil(cfg.t_max / cfg.dt));
    const double h = steps > 0 ? cfg.t_max / steps : 0.0;
    const int stride = std::max(1, static_cast<int>(std::round(cfg.sample_dt / h)));

    MomentTrajectory traj;
    auto sample = [&](double t) {
        traj.times.push_back(t);
        traj.means.push_back(extract_mean(rho, ops));
        traj.covs.push_back(extract_cov(rho, ops));
    };
    sample(0.0);
    for (int k = 0; k < steps; ++k) {
        const CMat k1 = gen.schrodinger(rho);
        const CMat k2 = gen.schrodinger(rho + 0.5 * h * k1);
        const CMat k3 = gen.schrodinger(rho + 0.5 * h * k2);
        const CMat k4 = gen.schrodinger(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(rho.trace().real() - 1.0) > cfg.trace_tol)
            throw std::runtime_error(
                "integrate_moments: trace drift exceeded tolerance "
                "(truncation too small?)");
        if ((k + 1) % stride == 0 || k + 1 == steps)
            sample((k + 1) * h);
    }
    return traj;
}

/// GNS inner product <A, B> = Tr(sigma-bar A^+ B) with unnormalized
/// sigma-bar = e^{-beta H}.
inline Complex gns_inner(const CMat& A, const CMat& B, const CMat& sigma_bar) {
    return (sigma_bar * A.adjoint() * B).trace();
}

/// Quadratic monomial basis {1, q_j, p_j, q_j^2, p_j^2, (q_j p_j + p_j q_j)/2}
/// per mode, plus q_j q_k cross terms for multimode systems.
inline std::vector<CMat> monomial_basis(const CanonicalOps& ops) {
    std::vector<CMat> basis;
    basis.push_back(CMat::Identity(ops.dim, ops.dim));
    for (int j = 0; j < ops.n; ++j) {
        basis.push_back(ops.q[j]);
        basis.push_back(ops.p[j]);
        basis.push_back(ops.q[j] * ops.q[j]);
        basis.push_back(ops.p[j] * ops.p[j]);
        basis.push_back(0.5 * (ops.q[j] * ops.p[j] + ops.p[j] * ops.q[j]));
    }
    for (int j = 0; j < ops.n; ++j)
        for (int k = j + 1; k < ops.n; ++k) {
            basis.push_back(ops.q[j] * ops.q[k]);
            basis.push_back(ops.p[j] * ops.p[k]);
            basis.push_back(ops.q[j] * ops.p[k]);
        }
    return basis;
}

/// Largest normalized self-adjointness defect of the Heisenberg generator in
/// the GNS inner product over a basis of observables:
///   max_{A,B} |<LA, B> - <A, LB>| / (||A|| ||B||).
inline double detailed_balance_defect(const LindbladGenerator& gen,
                                      const CMat& sigma_bar,
                                      const std::vector<CMat>& basis) {
    const size_t m = basis.size();
    std::vector<CMat> LB(m);
    std::vector<double> nrm(m);
    for (size_t i = 0; i < m; ++i) {
        LB[i] = gen.heisenberg(basis[i]);
        nrm[i] = std::sqrt(std::abs(gns_inner(basis[i], basis[i], sigma_bar)));
    }
    double worst = 0.0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            const Complex lhs = gns_inner(LB[i], basis[j], sigma_bar);
            const Complex rhs = gns_inner(basis[i], LB[j], sigma_bar);
            worst = std::max(worst, std::abs(lhs - rhs) / (nrm[i] * nrm[j]));
        }
    return worst;
}

/// Max-norm of a matrix restricted to the "interior" Fock block, dropping any
/// basis state with a per-mode occupation in the top `guard` levels (where
/// truncation artifacts live).
inline double interior_norm(const CMat& M, const CanonicalOps& ops,
                            int guard = 5) {
    auto interior = [&](int idx) {
        for (int j = 0; j < ops.n; ++j) {
            if (idx % ops.N >= ops.N - guard) return false;
            idx /= ops.N;
        }
        return true;
    };
    double worst = 0.0;
    for (int i = 0; i < M.rows(); ++i) {
        if (!interior(i)) continue;
        for (int j = 0; j < M.cols(); ++j)
            if (interior(j)) worst = std::max(worst, std::abs(M(i, j)));
    }
    return worst;
}

} // namespace gdsthermo
