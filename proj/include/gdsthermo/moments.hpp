#pragma once

// First/second moment dynamics of a Gaussian semigroup:
//   d<x>/dt = A <x> - xi,      dV/dt = A V + V A^T + D/hbar,
// plus stationarity (Hurwitz/Lyapunov) analysis.

#include "gds.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

namespace gdsthermo {

struct HurwitzReport {
    bool hurwitz = false;
    double abscissa = 0.0; ///< max real part of spec(A)
};

inline HurwitzReport is_hurwitz(const Mat& A, double tol = 1e-10) {
    Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("is_hurwitz: eigensolver failed");
    HurwitzReport r;
    r.abscissa = es.eigenvalues().real().maxCoeff();
    r.hurwitz = r.abscissa < -tol;
    return r;
}

/// Solve A V + V A^T + Q = 0 for symmetric Q with Hurwitz A, by dense
/// Kronecker vectorization.
inline Mat lyapunov_solve(const Mat& A, const Mat& Q) {
    detail::require_symmetric(Q, "lyapunov_solve");
    if (A.rows() != Q.rows() || A.rows() != A.cols())
        throw std::invalid_argument("lyapunov_solve: dimension mismatch");
    if (!is_hurwitz(A).hurwitz)
        throw std::domain_error("lyapunov_solve: drift matrix is not Hurwitz");
    const int d = static_cast<int>(A.rows());
    const Mat I = Mat::Identity(d, d);
    const Mat K = Eigen::kroneckerProduct(I, A).eval() +
                  Eigen::kroneckerProduct(A, I).eval();
    const Vec q = Eigen::Map<const Vec>(Q.data(), d * d);
    Vec v = K.partialPivLu().solve(-q);
    Mat V = Eigen::Map<Mat>(v.data(), d, d);
    V = 0.5 * (V + V.transpose()).eval();
    const double res = (A * V + V * A.transpose() + Q).cwiseAbs().maxCoeff();
    if (res > 1e-10 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
        throw std::runtime_error("lyapunov_solve: residual check failed");
    return V;
}

/// Mean at time t.  Closed form through exp(A t) when A is invertible,
/// otherwise RK4 on d m/dt = A m - xi.
inline Vec evolve_mean(const Mat& A, const Vec& xi, const Vec& m0, double t,
                       double dt = 1e-3) {
    if (A.rows() != m0.size() || xi.size() != m0.size())
        throw std::invalid_argument("evolve_mean: dimension mismatch");
    if (t == 0.0) return m0;
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.isInvertible()) {
        const Vec mS = lu.solve(xi);
        return Mat((A * t).exp()) * (m0 - mS) + mS;
    }
    if (t < 0.0)
        throw std::invalid_argument("evolve_mean: negative time needs invertible A");
    const int steps = std::max(1, static_cast<int>(std::ceil(t / dt)));
    const double h = t / steps;
    auto f = [&](const Vec& m) -> Vec { return A * m - xi; };
    Vec m = m0;
    for (int k = 0; k < steps; ++k) {
        const Vec k1 = f(m);
        const Vec k2 = f(m + 0.5 * h * k1);
        const Vec k3 = f(m + 0.5 * h * k2);
        const Vec k4 = f(m + h * k3);
        m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return m;
}

/// Covariance at time t by RK4 on the matrix Riccati-free ODE.
inline Mat evolve_cov(const Mat& A, const Mat& D, const Mat& V0, double t,
                      double hbar = 1.0, double dt = 1e-3) {
    detail::require_symmetric(V0, "evolve_cov");
    if (t < 0.0) throw std::invalid_argument("evolve_cov: time must be >= 0");
    if (t == 0.0) return V0;
    const Mat Q = D / hbar;
    const int steps = std::max(1, static_cast<int>(std::ceil(t / dt)));
    const double h = t / steps;
    auto f = [&](const Mat& V) -> Mat {
        return A * V + V * A.transpose() + Q;
    };
    Mat V = V0;
    for (int k = 0; k < steps; ++k) {
        const Mat k1 = f(V);
        const Mat k2 = f(V + 0.5 * h * k1);
        const Mat k3 = f(V + 0.5 * h * k2);
        const Mat k4 = f(V + h * k3);
        V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        V = 0.5 * (V + V.transpose()).eval();
    }
    return V;
}

/// Covariance at time t in quadrature form,
///   V_t = e^{At} V0 e^{A^T t} + (1/hbar) int_0^t e^{As} D e^{A^T s} ds,
/// with composite Simpson on the integral.  Cross-check for evolve_cov.
inline Mat evolve_cov_quadrature(const Mat& A, const Mat& D, const Mat& V0,
                                 double t, double hbar = 1.0,
                                 double ds = 5e-3) {
    detail::require_symmetric(V0, "evolve_cov_quadrature");
    if (t < 0.0) throw std::invalid_argument("evolve_cov_quadrature: time must be >= 0");
    int segments = std::max(2, static_cast<int>(std::ceil(t / ds)));
    if (segments % 2 != 0) ++segments;
    const double h = t / segments;
    const Mat E = (A * h).exp();
    Mat Ek = Mat::Identity(A.rows(), A.cols()); // e^{A s_k}
    Mat acc = Mat::Zero(A.rows(), A.cols());
    for (int k = 0; k <= segments; ++k) {
        const double wgt = (k == 0 || k == segments) ? 1.0
                           : (k % 2 == 1)            ? 4.0
                                                     : 2.0;
        acc += wgt * (Ek * D * Ek.transpose());
        if (k < segments) Ek = (E * Ek).eval();
    }
    const Mat Et = Ek; // e^{A t}
    Mat V = Et * V0 * Et.transpose() + (h / 3.0) * acc / hbar;
    return 0.5 * (V + V.transpose());
}

struct StationaryMoments {
    Vec mean;
    Mat V;
    bool bona_fide = false;
    double abscissa = 0.0;
};

/// Stationary moments: A mean = xi and the Lyapunov covariance.  Throws if
/// the drift is not Hurwitz (no stationary state).
inline StationaryMoments stationary_moments(const GdsSpec& spec,
                                            const NoiseMatrices& nm) {
    const Mat A = drift_matrix(spec, nm);
    const auto hw = is_hurwitz(A);
    if (!hw.hurwitz)
        throw std::domain_error(
            "stationary_moments: no stationary state (spectral abscissa " +
            std::to_string(hw.abscissa) + ")");
    StationaryMoments out;
    out.abscissa = hw.abscissa;
    out.mean = A.fullPivLu().solve(spec.xi_prime);
    out.V = lyapunov_solve(A, nm.D / spec.hbar);
    out.bona_fide = is_bona_fide(out.V);
    return out;
}

} // namespace gdsthermo
