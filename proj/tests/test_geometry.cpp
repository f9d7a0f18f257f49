#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "mtwcheck/conformal.hpp"
#include "mtwcheck/error.hpp"
#include "mtwcheck/geometry.hpp"
#include "oracles.hpp"

using namespace mtw;

namespace {

struct Sample {
    std::string name;
    Lagrangian lagrangian;
    Vector lo, hi;
};

std::vector<Sample> builtin_metrics() {
    const MetricField skew = MetricField({{parse_field("1 + x^2", 3), parse_field("0.3*sin(y)", 3), parse_field("0", 3)},
                                          {parse_field("0.3*sin(y)", 3), parse_field("exp(0.5*z)", 3), parse_field("0.1*x*z", 3)},
                                          {parse_field("0", 3), parse_field("0.1*x*z", 3), parse_field("2 + cos(x)", 3)}});
    return {
        {"euclidean3", Lagrangian(euclidean_metric(3)), Vector::Constant(3, -1.0), Vector::Constant(3, 1.0)},
        {"sphere", Lagrangian(sphere_metric()), Eigen::Vector2d(0.3, -3.0), Eigen::Vector2d(2.8, 3.0)},
        {"conformal", Lagrangian(conformal_metric({-3.0, 0.0})), Vector::Constant(2, -0.5), Vector::Constant(2, 0.5)},
        {"conformal_a4", Lagrangian(conformal_metric({-3.5, 0.5})), Vector::Constant(2, -0.5), Vector::Constant(2, 0.5)},
        {"inline3", Lagrangian(skew), Vector::Constant(3, -0.5), Vector::Constant(3, 0.5)},
    };
}

Vector random_in(std::mt19937_64& rng, const Vector& lo, const Vector& hi) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
    return x;
}

}  // namespace

TEST(Christoffel, EuclideanVanishes) {
    EXPECT_EQ(oracle::max_abs(christoffel(euclidean_metric(3), Eigen::Vector3d(0.3, -1.0, 2.0))), 0.0);
}

TEST(Christoffel, ConformalOriginVanishes) {
    EXPECT_LE(oracle::max_abs(christoffel(conformal_metric({-3.0, 0.0}), Vector::Zero(2))), 1e-15);
}

TEST(Christoffel, ConformalAtUnitXAxis) {
    for (const double a : {-3.0, -4.0, 2.0}) {
        const TensorN<3> g = christoffel(conformal_metric({a, 0.0}), Eigen::Vector2d(1.0, 0.0));
        EXPECT_NEAR(g(0, 0, 1), 1.0, 1e-14);  // Gamma^x_xy
        EXPECT_NEAR(g(1, 0, 0), -1.0, 1e-14);  // Gamma^y_xx
        EXPECT_NEAR(g(0, 0, 0), 0.0, 1e-14);  // Gamma^x_xx
    }
}

TEST(Christoffel, MatchesFiniteDifferencesAndIsSymmetric) {
    std::mt19937_64 rng(21);
    for (const auto& s : builtin_metrics()) {
        for (int k = 0; k < 10; ++k) {
            const Vector x = random_in(rng, s.lo, s.hi);
            const TensorN<3> exact = christoffel(s.lagrangian.metric, x);
            const TensorN<3> fd = oracle::christoffel(s.lagrangian.metric, x);
            EXPECT_LE(oracle::max_abs(TensorN<3>(exact - fd)), 1e-9) << s.name;
            const auto n = x.size();
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j) EXPECT_EQ(exact(a, i, j), exact(a, j, i));
        }
    }
}

TEST(Christoffel, MetricCompatibility) {
    // d_k g_ij = g_lj Gamma^l_ki + g_il Gamma^l_kj.
    std::mt19937_64 rng(22);
    for (const auto& s : builtin_metrics()) {
        const Vector x = random_in(rng, s.lo, s.hi);
        const auto n = x.size();
        const TensorN<3> gamma = christoffel(s.lagrangian.metric, x);
        const Matrix g = s.lagrangian.metric(x);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Vector e = Vector::Unit(n, k);
            const double h = 1e-4;
            const Matrix dg = (8 * (s.lagrangian.metric(x + h * e) - s.lagrangian.metric(x - h * e)) -
                               (s.lagrangian.metric(x + 2 * h * e) - s.lagrangian.metric(x - 2 * h * e))) /
                              (12 * h);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    double rhs = 0.0;
                    for (Eigen::Index l = 0; l < n; ++l) rhs += g(l, j) * gamma(l, k, i) + g(i, l) * gamma(l, k, j);
                    EXPECT_NEAR(dg(i, j), rhs, 1e-9) << s.name;
                }
        }
    }
}

TEST(Riemann, EuclideanVanishes) {
    EXPECT_EQ(oracle::max_abs(riemann(euclidean_metric(2), Eigen::Vector2d(0.4, 0.1))), 0.0);
}

TEST(Riemann, SphereCoordinatePlaneHasUnitCurvature) {
    const Eigen::Vector2d x(std::numbers::pi / 3, 0.2);
    const GeometryJet geo = geometry_jet(Lagrangian(sphere_metric()), x, 2);
    EXPECT_NEAR(sectional(geo, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 1.0, 1e-12);
    // Independent check from finite differences of the metric.
    const TensorN<4> fd = oracle::riemann(sphere_metric(), x);
    const double k = fd(1, 0, 1, 0) / geo.g.determinant();
    EXPECT_NEAR(k, 1.0, 1e-6);
}

TEST(Riemann, MatchesFiniteDifferenceOracle) {
    std::mt19937_64 rng(23);
    for (const auto& s : builtin_metrics()) {
        for (int k = 0; k < 5; ++k) {
            const Vector x = random_in(rng, s.lo, s.hi);
            const TensorN<4> exact = riemann(s.lagrangian.metric, x);
            const TensorN<4> fd = oracle::riemann(s.lagrangian.metric, x);
            EXPECT_LE(oracle::max_abs(TensorN<4>(exact - fd)), 1e-5) << s.name;
        }
    }
}

TEST(Riemann, ConformalOriginVanishes) {
    EXPECT_LE(oracle::max_abs(riemann(conformal_metric({-3.0, 0.0}), Vector::Zero(2))), 1e-15);
}

TEST(Riemann, SymmetriesAndBianchiIdentities) {
    std::mt19937_64 rng(24);
    for (const auto& s : builtin_metrics()) {
        for (int k = 0; k < 50; ++k) {
            const Vector x = random_in(rng, s.lo, s.hi);
            const GeometryJet geo = geometry_jet(s.lagrangian, x, 3);
            const auto n = x.size();
            const TensorN<4>& r = geo.riemann;
            const TensorN<5>& nr = geo.nabla_riemann;
            double worst = 0.0, worst_second = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    for (Eigen::Index a = 0; a < n; ++a)
                        for (Eigen::Index b = 0; b < n; ++b) {
                            worst = std::max({worst, std::abs(r(i, j, a, b) + r(j, i, a, b)),
                                              std::abs(r(i, j, a, b) + r(i, j, b, a)),
                                              std::abs(r(i, j, a, b) - r(a, b, i, j)),
                                              std::abs(r(i, j, a, b) + r(i, a, b, j) + r(i, b, j, a))});
                            for (Eigen::Index m = 0; m < n; ++m)
                                worst_second = std::max(
                                    worst_second, std::abs(nr(m, i, j, a, b) + nr(i, j, m, a, b) + nr(j, m, i, a, b)));
                        }
            EXPECT_LE(worst, 1e-9) << s.name;
            EXPECT_LE(worst_second, 1e-8) << s.name;
        }
    }
}

TEST(Sectional, SphereIsOneForAnyPlane) {
    std::mt19937_64 rng(25);
    const Lagrangian sphere(sphere_metric());
    for (int k = 0; k < 20; ++k) {
        const Vector x = random_in(rng, Eigen::Vector2d(0.3, -3), Eigen::Vector2d(2.8, 3));
        const GeometryJet geo = geometry_jet(sphere, x, 2);
        const Vector u = oracle::random_vector(rng, 2), w = oracle::random_vector(rng, 2);
        EXPECT_NEAR(sectional(geo, u, w), 1.0, 1e-8);
    }
}

TEST(Sectional, EuclideanIsZero) {
    const GeometryJet geo = geometry_jet(Lagrangian(euclidean_metric(3)), Vector::Zero(3), 2);
    EXPECT_EQ(sectional(geo, Eigen::Vector3d(1, 2, 0), Eigen::Vector3d(0, 1, 1)), 0.0);
}

TEST(Sectional, ConformalZeroWhereLaplacianVanishes) {
    const GeometryJet geo = geometry_jet(Lagrangian(conformal_metric({-3.0, 0.0})), Eigen::Vector2d(1, 1), 2);
    EXPECT_NEAR(sectional(geo, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 0.0, 1e-12);
}

TEST(Sectional, InvariantUnderChangeOfPlaneBasis) {
    std::mt19937_64 rng(26);
    for (const auto& s : builtin_metrics()) {
        const Vector x = random_in(rng, s.lo, s.hi);
        const GeometryJet geo = geometry_jet(s.lagrangian, x, 2);
        const Vector u = oracle::random_vector(rng, x.size()), w = oracle::random_vector(rng, x.size());
        const double k = sectional(geo, u, w);
        const double k2 = sectional(geo, 2 * u, w + 3 * u);
        EXPECT_LE(std::abs(k - k2), 1e-10 * std::max(1.0, std::abs(k))) << s.name;
    }
}

TEST(Sectional, DegeneratePlaneIsRejected) {
    const GeometryJet geo = geometry_jet(Lagrangian(sphere_metric()), Eigen::Vector2d(1, 0), 2);
    EXPECT_THROW(sectional(geo, Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 2)), DomainError);
}

TEST(CovariantCurvature, SphereDerivativesVanish) {
    std::mt19937_64 rng(27);
    for (int k = 0; k < 10; ++k) {
        const Vector x = random_in(rng, Eigen::Vector2d(0.3, -3), Eigen::Vector2d(2.8, 3));
        const GeometryJet geo = geometry_jet(Lagrangian(sphere_metric()), x, 4);
        EXPECT_LE(oracle::max_abs(geo.nabla_riemann), 1e-8);
        EXPECT_LE(oracle::max_abs(geo.nabla2_riemann), 1e-8);
    }
}

TEST(CovariantCurvature, EuclideanVanishes) {
    const GeometryJet geo = geometry_jet(Lagrangian(euclidean_metric(2)), Eigen::Vector2d(0.5, 0.5), 4);
    EXPECT_EQ(oracle::max_abs(geo.nabla_riemann), 0.0);
    EXPECT_EQ(oracle::max_abs(geo.nabla2_riemann), 0.0);
}

TEST(CovariantCurvature, FirstDerivativeMatchesFiniteDifferences) {
    // In flat-at-x coordinates this would be a plain derivative; in general
    // (nabla_m R)_ijkl = d_m R_ijkl - Gamma terms. Check the d_m part against
    // finite differences of the exact curvature.
    std::mt19937_64 rng(28);
    for (const auto& s : builtin_metrics()) {
        const Vector x = random_in(rng, s.lo, s.hi);
        const auto n = x.size();
        const GeometryJet geo = geometry_jet(s.lagrangian, x, 3);
        for (Eigen::Index m = 0; m < n; ++m) {
            const Vector e = Vector::Unit(n, m);
            const double h = 1e-3;
            const TensorN<4> dr = (riemann(s.lagrangian.metric, x + h * e) * 8.0 - riemann(s.lagrangian.metric, x - h * e) * 8.0 -
                                   riemann(s.lagrangian.metric, x + 2 * h * e) + riemann(s.lagrangian.metric, x - 2 * h * e)) *
                                  (1.0 / (12 * h));
            double worst = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    for (Eigen::Index a = 0; a < n; ++a)
                        for (Eigen::Index b = 0; b < n; ++b) {
                            double corr = 0.0;
                            for (Eigen::Index p = 0; p < n; ++p)
                                corr += geo.christoffel(p, m, i) * geo.riemann(p, j, a, b) +
                                        geo.christoffel(p, m, j) * geo.riemann(i, p, a, b) +
                                        geo.christoffel(p, m, a) * geo.riemann(i, j, p, b) +
                                        geo.christoffel(p, m, b) * geo.riemann(i, j, a, p);
                            worst = std::max(worst, std::abs(geo.nabla_riemann(m, i, j, a, b) - (dr(i, j, a, b) - corr)));
                        }
            EXPECT_LE(worst, 1e-7) << s.name;
        }
    }
}

TEST(Potential, QuarticFourthContractionIsMinusEight) {
    const Lagrangian l(euclidean_metric(2), quartic_potential(Matrix::Identity(2, 2)));
    const GeometryJet geo = geometry_jet(l, Vector::Zero(2), 4);
    const Vector u = Eigen::Vector2d(1, 0), w = Eigen::Vector2d(0, 1);
    EXPECT_NEAR(fourth_contraction(geo, w, u), -8.0, 1e-12);
    const double fd = oracle::mixed_fourth([&](const Vector& x) { return l.potential(x); }, Vector::Zero(2), w, u, 0.5);
    EXPECT_NEAR(fd, -8.0, 1e-10);
}

TEST(Potential, CubicHasNoFourthDerivative) {
    const Lagrangian l(euclidean_metric(2), parse_field("x^3 - 2*x*y^2 + y", 2));
    const GeometryJet geo = geometry_jet(l, Eigen::Vector2d(0.3, -0.4), 4);
    EXPECT_EQ(fourth_contraction(geo, Eigen::Vector2d(1, 2), Eigen::Vector2d(-1, 0.5)), 0.0);
}

TEST(Potential, FlatFourthContractionIsDirectionalDerivative) {
    std::mt19937_64 rng(29);
    const Lagrangian l(euclidean_metric(2), parse_field("x^4*y - 3*x^2*y^2 + y^4 + 2*x + x*y^3", 2));
    for (int k = 0; k < 10; ++k) {
        const Vector x = oracle::random_vector(rng, 2), u = oracle::random_vector(rng, 2), w = oracle::random_vector(rng, 2);
        const GeometryJet geo = geometry_jet(l, x, 4);
        ASSERT_GT(geo.dV.norm(), 0.0);
        // Degree-5 polynomial: the stencil is accurate to O(h^2) in the fifth derivative terms.
        const auto f = [&](const Vector& p) { return l.potential(p); };
        const double fd = (4 * oracle::mixed_fourth(f, x, w, u, 0.05) - oracle::mixed_fourth(f, x, w, u, 0.1)) / 3;
        EXPECT_NEAR(fourth_contraction(geo, w, u), fd, 1e-6);
    }
}

TEST(Potential, HessianIsSymmetric) {
    const Lagrangian l(sphere_metric(), parse_field("sin(x)*cos(y) + x^2*y", 2));
    const GeometryJet geo = geometry_jet(l, Eigen::Vector2d(1.1, 0.4), 4);
    EXPECT_LE((geo.hess_V - geo.hess_V.transpose()).norm(), 1e-14);
    for (Eigen::Index a = 0; a < 2; ++a)
        for (Eigen::Index b = 0; b < 2; ++b)
            for (Eigen::Index c = 0; c < 2; ++c)
                for (Eigen::Index d = 0; d < 2; ++d) EXPECT_NEAR(geo.nabla4_V(a, b, c, d), geo.nabla4_V(a, b, d, c), 1e-12);
}

TEST(GramSchmidt, EuclideanBasis) {
    Matrix in(2, 2);
    in << 2, 1, 0, 1;
    const Matrix e = gram_schmidt(Matrix::Identity(2, 2), in);
    EXPECT_LE((e - Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(GramSchmidt, ConformalOriginIsEuclidean) {
    Matrix in(2, 2);
    in << 2, 1, 0, 1;
    const Matrix g = conformal_metric({-3.0, 0.0})(Vector::Zero(2));
    EXPECT_LE((gram_schmidt(g, in) - Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(GramSchmidt, OrthonormalInCurvedMetric) {
    const Matrix g = sphere_metric()(Eigen::Vector2d(0.7, 0));
    Matrix in(2, 2);
    in << 1, 0.3, 0.2, 1;
    const Matrix e = gram_schmidt(g, in);
    EXPECT_LE((e.transpose() * g * e - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(GramSchmidt, RankDeficiency) {
    EXPECT_THROW(gram_schmidt(Matrix::Identity(2, 2), Matrix::Zero(2, 1)), DomainError);
}

TEST(Metric, DegenerateAtSphereChartPole) {
    EXPECT_THROW(sphere_metric()(Vector::Zero(2)), DegenerateMetricError);
    EXPECT_THROW(geometry_jet(Lagrangian(sphere_metric()), Vector::Zero(2), 2), DegenerateMetricError);
}

TEST(Metric, AsymmetricEntriesAreRejected) {
    EXPECT_THROW(MetricField({{parse_field("1", 2), parse_field("x", 2)}, {parse_field("y", 2), parse_field("1", 2)}}),
                 DomainError);
}

TEST(Metric, ScalingScalesCurvatureInversely) {
    const Eigen::Vector2d x(0.2, -0.1);
    const MetricField m = conformal_metric({-3.5, 0.0});
    const GeometryJet a = geometry_jet(Lagrangian(m), x, 2);
    const GeometryJet b = geometry_jet(Lagrangian(m.scaled(4.0)), x, 2);
    const Vector u = Eigen::Vector2d(1, 0.2), w = Eigen::Vector2d(-0.3, 1);
    EXPECT_NEAR(sectional(b, u, w), sectional(a, u, w) / 4.0, 1e-12);
}
