#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "elliptgof/linalg.hpp"
#include "oracles.hpp"

using namespace elliptgof;

namespace {

double rel_frobenius(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(SymEig, IdentityHasUnitEigenvalues) {
    const auto eig = sym_eig(SymMatrix::identity(3));
    EXPECT_TRUE(eig.eigenvalues.isApprox(Vector::Ones(3)));
    EXPECT_LE((eig.eigenvectors.transpose() * eig.eigenvectors - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SymEig, DiagonalIsSortedNonincreasing) {
    const auto eig = sym_eig(SymMatrix::diagonal((Vector(2) << 1.0, 4.0).finished()));
    EXPECT_DOUBLE_EQ(eig.eigenvalues(0), 4.0);
    EXPECT_DOUBLE_EQ(eig.eigenvalues(1), 1.0);
}

TEST(SymEig, TwoByTwoMatchesCharacteristicPolynomial) {
    // det([[2-l,1],[1,2-l]]) = (2-l)^2 - 1 = 0  ->  l = 3, 1
    Matrix m(2, 2);
    m << 2, 1, 1, 2;
    const auto eig = sym_eig(SymMatrix(m));
    EXPECT_NEAR(eig.eigenvalues(0), 3.0, 1e-14);
    EXPECT_NEAR(eig.eigenvalues(1), 1.0, 1e-14);
}

TEST(SymEig, ReconstructsRandomMatrices) {
    std::mt19937_64 rng(11);
    for (Eigen::Index p : {1, 2, 7, 40}) {
        const Matrix m = oracle::random_spd(p, rng) - Matrix::Identity(p, p);  // indefinite as well
        const auto eig = sym_eig(SymMatrix(m));
        EXPECT_LE(rel_frobenius(eig.reconstruct(), m), 1e-10);
        EXPECT_LE((eig.eigenvectors.transpose() * eig.eigenvectors - Matrix::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-10);
        for (Eigen::Index k = 1; k < p; ++k) EXPECT_GE(eig.eigenvalues(k - 1), eig.eigenvalues(k));
    }
}

TEST(SymEig, RejectsNonFinite) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        sym_eig(SymMatrix(m));
        FAIL() << "expected NonFinite";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}

TEST(SymMatrix, SymmetrizesOnConstruction) {
    Matrix m(2, 2);
    m << 1, 2, 4, 3;
    const SymMatrix s(m);
    EXPECT_EQ(s(0, 1), s(1, 0));
    EXPECT_DOUBLE_EQ(s(0, 1), 3.0);
}

TEST(MatrixPower, InverseSqrtOfIdentity) {
    EXPECT_TRUE(matrix_power(SymMatrix::identity(5), -0.5).matrix().isApprox(Matrix::Identity(5, 5), 1e-14));
}

TEST(MatrixPower, DiagonalSquareRoot) {
    const auto r = matrix_power(SymMatrix::diagonal((Vector(2) << 4.0, 9.0).finished()), 0.5);
    EXPECT_NEAR(r(0, 0), 2.0, 1e-14);
    EXPECT_NEAR(r(1, 1), 3.0, 1e-14);
    EXPECT_NEAR(r(0, 1), 0.0, 1e-14);
}

TEST(MatrixPower, SquareRootRoundTrip) {
    Matrix m(2, 2);
    m << 2, 1, 1, 2;
    const Matrix r = matrix_power(SymMatrix(m), 0.5).matrix();
    EXPECT_LE((r * r - m).norm(), 1e-10);
}

TEST(MatrixPower, InverseSqrtComposesWithInverse) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMatrix m(oracle::random_spd(12, rng));
        const Matrix direct = matrix_power(m, -0.5).matrix();
        const Matrix composed = matrix_power(matrix_power(m, -1.0), 0.5).matrix();
        EXPECT_LE((direct - composed).cwiseAbs().maxCoeff(), 1e-9);
        const Matrix inv = matrix_power(m, -1.0).matrix();
        EXPECT_LE((inv * m.matrix() - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(MatrixPower, SingularNegativePowerThrows) {
    const SymMatrix m = SymMatrix::diagonal((Vector(3) << 1.0, 1.0, 1e-12).finished());
    try {
        matrix_power(m, -0.5);
        FAIL() << "expected SingularMatrix";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
    }
    // Relative floor: the same shape rescaled is still singular.
    const SymMatrix scaled(1e6 * m.matrix());
    EXPECT_THROW(matrix_power(scaled, -1.0), Error);
    EXPECT_NO_THROW(matrix_power(SymMatrix::diagonal((Vector(2) << 1.0, 1e-9).finished()), -1.0));
}

TEST(MatrixPower, UnsupportedExponent) { EXPECT_THROW(matrix_power(SymMatrix::identity(2), 2.0), Error); }

TEST(PdProject, ReplacesNegativeEigenvalue) {
    const auto r = pd_project(SymMatrix::diagonal((Vector(2) << 2.0, -1.0).finished()), 1e-8);
    EXPECT_NEAR(r(0, 0), 2.0, 1e-14);
    EXPECT_NEAR(r(1, 1), 1e-8, 1e-20);
    EXPECT_NEAR(r(0, 1), 0.0, 1e-14);
}

TEST(PdProject, ZeroMatrixBecomesFloor) {
    const auto r = pd_project(SymMatrix(Matrix::Zero(2, 2)), 1e-8);
    EXPECT_NEAR(r(0, 0), 1e-8, 1e-20);
    EXPECT_NEAR(r(1, 1), 1e-8, 1e-20);
}

TEST(PdProject, PositiveDefiniteInputUnchanged) {
    std::mt19937_64 rng(3);
    const Matrix m = oracle::random_spd(9, rng);
    EXPECT_LE((pd_project(SymMatrix(m), 1e-8).matrix() - m).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PdProject, KeepsLargeEigenvaluesAndVectors) {
    std::mt19937_64 rng(8);
    const Matrix m = oracle::random_spd(6, rng) - 1.5 * Matrix::Identity(6, 6);
    const auto before = sym_eig(SymMatrix(m));
    const auto after = sym_eig(pd_project(SymMatrix(m), 1e-3));
    for (Eigen::Index k = 0; k < 6; ++k) {
        EXPECT_GE(after.eigenvalues(k), 1e-3 - 1e-12);
        if (before.eigenvalues(k) > 1e-3) EXPECT_NEAR(after.eigenvalues(k), before.eigenvalues(k), 1e-12);
    }
}

TEST(Band, FullBandwidthIsIdentityMap) {
    std::mt19937_64 rng(2);
    const SymMatrix m(oracle::random_spd(5, rng));
    EXPECT_EQ(band(m, 4).matrix(), m.matrix());
    EXPECT_EQ(band(m, 10).matrix(), m.matrix());
}

TEST(Band, ZeroBandwidthKeepsDiagonal) {
    std::mt19937_64 rng(2);
    const SymMatrix m(oracle::random_spd(5, rng));
    EXPECT_EQ(band(m, 0).matrix(), Matrix(m.matrix().diagonal().asDiagonal()));
}

TEST(Band, TridiagonalMask) {
    const auto b = band(SymMatrix(Matrix::Ones(4, 4)), 1);
    Matrix expected(4, 4);
    expected << 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 1;
    EXPECT_EQ(b.matrix(), expected);
}

TEST(Band, Idempotent) {
    std::mt19937_64 rng(4);
    for (Eigen::Index h : {0, 1, 3, 7}) {
        const SymMatrix m(oracle::random_spd(9, rng));
        EXPECT_EQ(band(band(m, h), h).matrix(), band(m, h).matrix());
    }
}

TEST(TraceNormalize, Examples) {
    EXPECT_EQ(trace_normalize(SymMatrix::identity(4)).matrix(), Matrix::Identity(4, 4));
    EXPECT_TRUE(trace_normalize(SymMatrix(2.0 * Matrix::Identity(2, 2))).matrix().isApprox(Matrix::Identity(2, 2)));
    EXPECT_TRUE(trace_normalize(SymMatrix(3.0 * Matrix::Identity(5, 5))).matrix().isApprox(Matrix::Identity(5, 5)));
}

TEST(TraceNormalize, NonPositiveTraceThrows) {
    try {
        trace_normalize(SymMatrix::diagonal((Vector(2) << 1.0, -1.0).finished()));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPositiveTrace);
    }
}

TEST(TraceNormalize, AfterProjectionIsPositiveDefiniteWithTraceP) {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix m = oracle::random_spd(8, rng) - 2.0 * Matrix::Identity(8, 8);
        if (pd_project(SymMatrix(m), 1e-8).trace() <= 0.0) continue;
        const SymMatrix out = trace_normalize(pd_project(SymMatrix(m), 1e-8));
        EXPECT_NEAR(out.trace(), 8.0, 8.0 * 1e-12);
        EXPECT_GT(sym_eig(out).eigenvalues.minCoeff(), 0.0);
    }
}
