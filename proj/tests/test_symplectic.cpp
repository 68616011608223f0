#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gdsthermo;
using testutil::max_abs;

TEST_CASE("standard form basics") {
    const Mat J1 = standard_form(1);
    Mat expect(2, 2);
    expect << 0, 1, -1, 0;
    REQUIRE(max_abs(J1 - expect) == 0.0);

    for (int n : {1, 2, 3, 4}) {
        const Mat J = standard_form(n);
        REQUIRE(max_abs(J + J.transpose()) == 0.0);
        REQUIRE(max_abs(J * J + Mat::Identity(2 * n, 2 * n)) == 0.0);
        REQUIRE(max_abs(Mat(J.inverse()) - J.transpose()) < 1e-14);
    }
    REQUIRE_THROWS_AS(standard_form(0), std::invalid_argument);
}

TEST_CASE("q matrix properties") {
    for (int n : {1, 2, 3}) {
        const CMat Q = q_matrix(n);
        const CMat J = standard_form(n).cast<Complex>();
        REQUIRE(max_abs(CMat(Q - Q.transpose())) < 1e-15);
        REQUIRE(max_abs(CMat(Q * Q.adjoint() - CMat::Identity(2 * n, 2 * n))) <
                1e-15);
        REQUIRE(max_abs(CMat(Q.transpose() * J * Q - J)) < 1e-15);
    }
}

TEST_CASE("g function inverts the thermal mean") {
    // x = (1/2) coth(y/2)  =>  g(x) = y
    for (double y : {0.1, 1.0, 10.0}) {
        const double x = 0.5 / std::tanh(0.5 * y);
        REQUIRE(g_function(x) == Catch::Approx(y).epsilon(1e-12));
    }
    REQUIRE_THROWS_AS(g_function(0.5), std::domain_error);
    REQUIRE_THROWS_AS(g_function(0.1), std::domain_error);
}

TEST_CASE("williamson of a diagonal squeezed covariance") {
    Mat V(2, 2);
    V << 2.0, 0.0, 0.0, 0.5;
    const auto w = williamson(V);
    REQUIRE(w.spectrum.size() == 1);
    REQUIRE(w.spectrum(0) == Catch::Approx(1.0).margin(1e-12));
    const Mat J = standard_form(1);
    REQUIRE(max_abs(w.S * J * w.S.transpose() - J) < 1e-12);
    Vec kk(2);
    kk << w.spectrum, w.spectrum;
    REQUIRE(max_abs(w.S * V * w.S.transpose() - Mat(kk.asDiagonal())) < 1e-12);
}

TEST_CASE("williamson rejects bad input") {
    Mat M(2, 2);
    M << 1, 2, 0, 1;
    REQUIRE_THROWS_AS(williamson(M), std::invalid_argument);
    Mat neg(2, 2);
    neg << 1, 0, 0, -1;
    REQUIRE_THROWS_AS(williamson(neg), std::domain_error);
    REQUIRE_THROWS_AS(williamson(Mat::Zero(2, 2)), std::domain_error);
}

TEST_CASE("williamson round trip on seeded random covariances") {
    std::mt19937 rng(20260824);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 4;
        Vec kappa;
        const Mat V = testutil::random_covariance(rng, n, &kappa);
        const auto w = williamson(V);
        REQUIRE(max_abs(Mat((w.spectrum - kappa).asDiagonal())) < 1e-9);
        const Mat J = standard_form(n);
        REQUIRE(max_abs(w.S * J * w.S.transpose() - J) < 1e-10);
        Vec kk(2 * n);
        kk << w.spectrum, w.spectrum;
        REQUIRE(max_abs(w.S * V * w.S.transpose() - Mat(kk.asDiagonal())) <
                1e-9);
    }
}

TEST_CASE("williamson handles degenerate spectra deterministically") {
    std::mt19937 rng(7);
    const int n = 2;
    Vec kk(4);
    kk << 1.3, 1.3, 1.3, 1.3;
    const Mat R = testutil::random_symplectic(rng, n);
    const Mat V = R.transpose() * kk.asDiagonal() * R;
    const auto w1 = williamson(V);
    const auto w2 = williamson(V);
    REQUIRE(max_abs(w1.S - w2.S) == 0.0);
    REQUIRE(max_abs(w1.S * V * w1.S.transpose() - Mat(kk.asDiagonal())) < 1e-9);
}

TEST_CASE("symplectic spectrum shortcut agrees with williamson") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat V = testutil::random_covariance(rng, 3);
        const auto w = williamson(V);
        const Vec ks = symplectic_spectrum(V);
        REQUIRE(max_abs(Mat((ks - w.spectrum).asDiagonal())) < 1e-10);
    }
}

TEST_CASE("complex diagonalization of Hamiltonian matrices") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 3;
        const Mat O = testutil::random_hessian(rng, n);
        const Mat J = standard_form(n);

        const auto oj = lemma2_diagonalize(O);
        CMat diag = CMat::Zero(2 * n, 2 * n);
        for (int j = 0; j < n; ++j) {
            diag(j, j) = Complex(0.0, oj.o(j));
            diag(n + j, n + j) = Complex(0.0, -oj.o(j));
        }
        REQUIRE(max_abs(CMat(oj.M * (O * J).cast<Complex>() * oj.M.inverse() -
                             diag)) < 1e-9);

        const auto jo = lemma2_diagonalize(O, /*jo_variant=*/true);
        REQUIRE(max_abs(CMat(jo.M * (J * O).cast<Complex>() * jo.M.inverse() -
                             diag)) < 1e-9);
    }
}

TEST_CASE("hamiltonian flow: rotation, group law, symplecticity") {
    const Mat I2 = Mat::Identity(2, 2);
    const Mat J = standard_form(1);
    // B = I generates a quarter rotation at t = pi/2; exp(J pi/2) = J
    REQUIRE(max_abs(hamiltonian_flow(I2, M_PI / 2.0) - J) < 1e-12);
    REQUIRE(max_abs(hamiltonian_flow(I2, 0.0) - I2) < 1e-15);

    std::mt19937 rng(31415);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 3;
        const Mat Jn = standard_form(n);
        // indefinite Hessians exercise the Pade fallback path
        const Mat B = (trial % 2 == 0)
                          ? testutil::random_hessian(rng, n)
                          : testutil::random_symmetric(rng, 2 * n);
        const double t1 = 0.37, t2 = 1.21;
        const Mat F1 = hamiltonian_flow(B, t1);
        const Mat F2 = hamiltonian_flow(B, t2);
        const Mat F12 = hamiltonian_flow(B, t1 + t2);
        REQUIRE(max_abs(F1 * F2 - F12) < 1e-9);
        REQUIRE(max_abs(F1 * Jn * F1.transpose() - Jn) < 1e-9);
    }
}
