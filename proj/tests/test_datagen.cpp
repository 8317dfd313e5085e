#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "elliptgof/datagen.hpp"
#include "elliptgof/rng.hpp"
#include "oracles.hpp"

using namespace elliptgof;

namespace {

double mean_r2_over_p(const RadialLaw& l, Eigen::Index p, int draws, std::uint64_t seed) {
    Rng rng(seed);
    double s = 0.0;
    for (int k = 0; k < draws; ++k) {
        const double r = sample_radius(l, p, rng);
        s += r * r;
    }
    return s / draws / static_cast<double>(p);
}

}  // namespace

TEST(SampleRadius, GaussianSecondMoment) { EXPECT_NEAR(mean_r2_over_p(law::Gaussian{}, 400, 100000, 1), 1.0, 0.02); }

TEST(SampleRadius, KotzSecondMoment) { EXPECT_NEAR(mean_r2_over_p(law::Kotz{}, 100, 100000, 2), 1.0, 0.02); }

TEST(SampleRadius, BoundedSupport) {
    Rng rng(3);
    for (int k = 0; k < 20000; ++k) {
        const double r = sample_radius(law::BoundedBeta{}, 50, rng);
        EXPECT_GT(r * r, 0.0);
        EXPECT_LT(r * r, 100.0);
    }
}

TEST(SampleRadius, ClosedFormSecondMomentsForEveryLaw) {
    for (Eigen::Index p : {50, 100}) {
        EXPECT_NEAR(mean_r2_over_p(law::Gaussian{}, p, 100000, 10), 1.0, 0.05);
        EXPECT_NEAR(mean_r2_over_p(law::Kotz{}, p, 100000, 11), 1.0, 0.05);
        EXPECT_NEAR(mean_r2_over_p(law::BoundedBeta{}, p, 100000, 12), 1.0, 0.05);
        EXPECT_NEAR(mean_r2_over_p(law::StudentT{}, p, 100000, 13) / (10.0 / 8.0), 1.0, 0.05);
        EXPECT_NEAR(mean_r2_over_p(law::MixtureNormal{}, p, 100000, 14) / 1.8, 1.0, 0.05);
    }
}

TEST(SampleRadius, KotzScaleSurvivesLargeDimension) {
    const double c = kotz_scale(100000, 2.0);
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GT(c, 0.0);
    Rng rng(4);
    EXPECT_TRUE(std::isfinite(sample_radius(law::Kotz{}, 100000, rng)));
}

TEST(RadialLaw, ValidationAndNames) {
    EXPECT_THROW(validate(law::StudentT{0.0}), Error);
    EXPECT_THROW(validate(law::Kotz{-1.0}), Error);
    EXPECT_THROW(validate(law::MixtureNormal{0.5, 1.0, 0.4, 3.0}), Error);
    EXPECT_NO_THROW(validate(law::MixtureNormal{}));
    for (const char* name : {"gaussian", "t10", "mixture", "kotz2", "bounded"}) EXPECT_EQ(law_name(parse_law(name)), name);
    for (const char* name : {"identity", "ar0.3", "sp"}) EXPECT_EQ(shape_name(parse_shape(name)), name);
    for (const char* name : {"sp", "frac20", "all"}) EXPECT_EQ(active_set_name(parse_active_set(name)), name);
    EXPECT_THROW(parse_law("cauchy"), Error);
    EXPECT_THROW(parse_shape("banded"), Error);
    EXPECT_THROW(parse_active_set("half"), Error);
}

TEST(ActiveSets, Resolution) {
    EXPECT_EQ(resolve_active_set(ActiveSet::Sparse, 100), std::vector<Eigen::Index>{0});
    EXPECT_EQ(resolve_active_set(ActiveSet::Frac20, 100).size(), 20u);
    EXPECT_EQ(resolve_active_set(ActiveSet::Frac20, 101).size(), 20u);
    EXPECT_EQ(resolve_active_set(ActiveSet::Frac20, 3).size(), 1u);
    EXPECT_EQ(resolve_active_set(ActiveSet::All, 7).size(), 7u);
    EXPECT_EQ(resolve_active_set(ActiveSet::All, 7).back(), 6);
}

TEST(MakeShape, Identity) { EXPECT_EQ(make_shape(shape::Identity{}, 6).matrix(), Matrix::Identity(6, 6)); }

TEST(MakeShape, Autoregressive) {
    Matrix expected(3, 3);
    expected << 1, .3, .09, .3, 1, .3, .09, .3, 1;
    EXPECT_LE((make_shape(shape::AR{}, 3).matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MakeShape, SparsePrecisionInverse) {
    Matrix omega(3, 3);
    omega << 1, .3, 0, .3, 1, .3, 0, .3, 1;
    EXPECT_EQ(sparse_precision(3).matrix(), omega);
    const Matrix sigma = oracle::gauss_jordan_inverse(omega);
    EXPECT_LE((sigma * omega - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    const Matrix expected = 3.0 * sigma / sigma.trace();
    EXPECT_LE((make_shape(shape::SparsePrecision{}, 3).matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MakeShape, TraceAndDefiniteness) {
    for (Eigen::Index p : {1, 2, 10, 50, 100}) {
        for (const ShapeStructure& s : {ShapeStructure{shape::Identity{}}, ShapeStructure{shape::AR{}},
                                        ShapeStructure{shape::SparsePrecision{}}}) {
            const SymMatrix m = make_shape(s, p);
            EXPECT_NEAR(m.trace(), static_cast<double>(p), 1e-10 * static_cast<double>(p));
            EXPECT_GT(sym_eig(m).eigenvalues.minCoeff(), 0.0);
        }
    }
}

TEST(MakeShape, NonPdPrecisionThrows) {
    try {
        make_shape(shape::SparsePrecision{0.9}, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPD);
    }
    EXPECT_THROW(make_shape(shape::AR{1.0}, 4), Error);
}

TEST(Generate, NullIsStandardGaussian) {
    Rng rng(5);
    const DataMatrix x = generate(10000, 5, law::Gaussian{}, shape::Identity{}, AlternativeSpec{}, Vector::Zero(5), rng);
    for (Eigen::Index j = 0; j < 5; ++j) {
        const double m = x.col(j).mean();
        const double v = (x.col(j).array() - m).square().sum() / 9999.0;
        EXPECT_NEAR(v, 1.0, 0.05);
        EXPECT_NEAR(m, 0.0, 0.05);
    }
}

TEST(Generate, AlternativeInducesPositiveDependence) {
    Rng rng(6);
    const DataMatrix x =
        generate(10000, 10, law::Gaussian{}, shape::Identity{}, AlternativeSpec{ActiveSet::Sparse, 2.0}, Vector::Zero(10), rng);
    std::vector<double> logr, u1;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double r = x.row(i).norm();
        logr.push_back(std::log(r));
        u1.push_back(x(i, 0) / r);
    }
    EXPECT_GT(oracle::pearson(logr, u1), 5.0 / std::sqrt(10000.0));
}

TEST(Generate, SeededReproducibility) {
    Rng a(7), b(7);
    const AlternativeSpec alt{ActiveSet::Frac20, 1.0};
    const Vector mu = Vector::LinSpaced(20, 0.0, 1.0);
    EXPECT_EQ(generate(50, 20, law::Kotz{}, shape::AR{}, alt, mu, a), generate(50, 20, law::Kotz{}, shape::AR{}, alt, mu, b));
}

TEST(Generate, CouplingAcrossSignalStrength) {
    const Eigen::Index p = 15;
    for (ActiveSet set : {ActiveSet::Sparse, ActiveSet::Frac20, ActiveSet::All}) {
        Rng a(8), b(8);
        const DataMatrix x0 = generate(200, p, law::StudentT{}, shape::Identity{}, AlternativeSpec{set, 0.0}, Vector::Zero(p), a);
        const DataMatrix x1 = generate(200, p, law::StudentT{}, shape::Identity{}, AlternativeSpec{set, 1.5}, Vector::Zero(p), b);
        const auto active = resolve_active_set(set, p);
        for (Eigen::Index i = 0; i < 200; ++i) {
            const Vector u0 = x0.row(i).transpose().normalized();
            EXPECT_LE((x1.row(i).transpose().normalized() - u0).cwiseAbs().maxCoeff(), 1e-12);
            double s = 0.0;
            for (Eigen::Index j : active) s += u0(j);
            const double expected = std::exp(1.5 * s / std::sqrt(static_cast<double>(active.size())));
            EXPECT_NEAR(x1.row(i).norm() / x0.row(i).norm(), expected, 1e-10 * expected);
        }
    }
}

TEST(Generate, DirectionsAreExchangeable) {
    const Eigen::Index p = 50;
    const int draws = 100000;
    Rng rng(9);
    const DataMatrix x = generate(draws, p, law::MixtureNormal{}, shape::Identity{}, AlternativeSpec{}, Vector::Zero(p), rng);
    const Matrix u = x.rowwise().normalized();
    const Eigen::RowVectorXd means = u.colwise().mean();
    EXPECT_LE(means.cwiseAbs().maxCoeff(), 4.0 / std::sqrt(static_cast<double>(draws) * p));
}

TEST(Generate, AppliesShapeAndLocation) {
    Rng rng(10);
    const Vector mu = Vector::Constant(4, 3.0);
    const DataMatrix x = generate(40000, 4, law::Gaussian{}, shape::AR{0.5}, AlternativeSpec{}, mu, rng);
    const Eigen::RowVectorXd m = x.colwise().mean();
    const Matrix c = (x.rowwise() - m).transpose() * (x.rowwise() - m) / 39999.0;
    EXPECT_LE((m.transpose() - mu).cwiseAbs().maxCoeff(), 0.03);
    EXPECT_LE((c - make_shape(shape::AR{0.5}, 4).matrix()).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Generate, RejectsBadArguments) {
    Rng rng(0);
    EXPECT_THROW(generate(0, 3, law::Gaussian{}, shape::Identity{}, AlternativeSpec{}, Vector::Zero(3), rng), Error);
    EXPECT_THROW(generate(5, 3, law::Gaussian{}, shape::Identity{}, AlternativeSpec{ActiveSet::All, -1.0}, Vector::Zero(3), rng),
                 Error);
    EXPECT_THROW(generate(5, 3, law::Gaussian{}, shape::Identity{}, AlternativeSpec{}, Vector::Zero(2), rng), Error);
}
