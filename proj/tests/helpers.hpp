#pragma once

// Shared seeded generators and small oracles for the test suite.

#include "gdsthermo/gdsthermo.hpp"

#include <random>

namespace testutil {

using namespace gdsthermo;

inline Mat random_symmetric(std::mt19937& rng, int dim, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat M(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) M(i, j) = u(rng);
    return 0.5 * (M + M.transpose());
}

/// Random symplectic matrix exp(J G) with G symmetric; `scale` controls how
/// far it sits from the identity.
inline Mat random_symplectic(std::mt19937& rng, int n, double scale = 0.3) {
    return hamiltonian_flow(random_symmetric(rng, 2 * n, scale), 1.0);
}

/// Random positive definite Hessian with prescribed-range normal-mode
/// frequencies: B = R^T (w (+) w) R with R symplectic, w in [wmin, wmax].
inline Mat random_hessian(std::mt19937& rng, int n, Vec* w_out = nullptr,
                          double wmin = 0.5, double wmax = 2.0) {
    std::uniform_real_distribution<double> uw(wmin, wmax);
    Vec w(n);
    for (int j = 0; j < n; ++j) w(j) = uw(rng);
    Vec ww(2 * n);
    ww << w, w;
    const Mat R = random_symplectic(rng, n);
    if (w_out) *w_out = w;
    Mat B = R.transpose() * ww.asDiagonal() * R;
    return 0.5 * (B + B.transpose());
}

/// Random covariance with prescribed symplectic spectrum kappa >= 1/2.
inline Mat random_covariance(std::mt19937& rng, int n, Vec* kappa_out = nullptr,
                             double kmin = 0.6, double kmax = 3.0) {
    std::uniform_real_distribution<double> uk(kmin, kmax);
    Vec k(n);
    for (int j = 0; j < n; ++j) k(j) = uk(rng);
    std::sort(k.data(), k.data() + n);
    Vec kk(2 * n);
    kk << k, k;
    const Mat R = random_symplectic(rng, n);
    if (kappa_out) *kappa_out = k;
    Mat V = R.transpose() * kk.asDiagonal() * R;
    return 0.5 * (V + V.transpose());
}

inline QdbcSpec random_qdbc(std::mt19937& rng, int n) {
    QdbcSpec qs;
    qs.thermal.n = n;
    qs.thermal.hbar = 1.0;
    qs.thermal.B = random_hessian(rng, n);
    std::uniform_real_distribution<double> ub(0.1, 10.0);
    qs.thermal.beta = ub(rng);
    std::uniform_real_distribution<double> ug(0.05, 1.0);
    qs.couplings = Vec(n);
    for (int j = 0; j < n; ++j) qs.couplings(j) = ug(rng);
    return qs;
}

inline double max_abs(const Mat& M) { return M.cwiseAbs().maxCoeff(); }
inline double max_abs(const CMat& M) { return M.cwiseAbs().maxCoeff(); }

} // namespace testutil
