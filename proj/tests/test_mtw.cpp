#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "mtwcheck/conformal.hpp"
#include "mtwcheck/error.hpp"
#include "mtwcheck/mtw.hpp"
#include "oracles.hpp"

using namespace mtw;

namespace {

const Eigen::Vector2d e1(1, 0), e2(0, 1);

Lagrangian quartic_lagrangian(const Matrix& a) { return Lagrangian(euclidean_metric(static_cast<int>(a.rows())), quartic_potential(a)); }

double relative(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST(Jacobi, FlatIsZero) {
    const Lagrangian flat(euclidean_metric(3));
    const MtwEvaluation e = mtw_jacobi(flat, Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(1, 0, 0),
                                       Eigen::Vector3d(0.3, 0.1, -0.2), Eigen::Vector3d(0, 1, 1));
    EXPECT_NEAR(e.value, 0.0, 1e-8);
    EXPECT_EQ(e.method, Method::Jacobi);
}

TEST(Jacobi, SphereOrthonormalPairGivesCurvature) {
    const Eigen::Vector2d x(1.0, 0.0);
    const Matrix g = sphere_metric()(x);
    const Vector u = e1, w = e2 / std::sqrt(g(1, 1));
    EXPECT_NEAR(mtw_jacobi(Lagrangian(sphere_metric()), x, u, Vector::Zero(2), w).value, 1.0, 1e-4);
}

TEST(Jacobi, QuadraticInUAndW) {
    const Lagrangian l(conformal_metric({-3.5, 0.0}));
    const Eigen::Vector2d x(0.2, 0.1), u(1, 0.3), v(0.2, -0.1), w(-0.2, 0.9);
    const double base = mtw_jacobi(l, x, u, v, w).value;
    EXPECT_LE(relative(mtw_jacobi(l, x, u, v, Vector(2 * w)).value, 4 * base), 1e-6);
    EXPECT_LE(relative(mtw_jacobi(l, x, Vector(3 * u), v, w).value, 9 * base), 1e-6);
}

TEST(Jacobi, ReportsErrorEstimateAndSteps) {
    const MtwEvaluation e = mtw_jacobi(Lagrangian(sphere_metric()), Eigen::Vector2d(1.0, 0.0), e1, Vector::Zero(2), e2, 1e-2, 100);
    EXPECT_EQ(e.steps, 100);
    EXPECT_DOUBLE_EQ(e.h_s, 1e-2);
    EXPECT_GE(e.error_estimate, 0.0);
    EXPECT_LE(e.error_estimate, 1e-3);
}

TEST(Zeroth, SimplifiedQuarticExamples) {
    const Lagrangian l = quartic_lagrangian(Matrix::Identity(2, 2));
    EXPECT_NEAR(mtw_zeroth_simplified(l, Vector::Zero(2), e1, e2), -8.0 / 20, 1e-12);
    EXPECT_NEAR(mtw_zeroth_simplified(l, Vector::Zero(2), e1, e1), -24.0 / 20, 1e-12);
}

TEST(Zeroth, SimplifiedIsCurvatureWithoutPotential) {
    const Eigen::Vector2d x(1.0, 0.4);
    const Matrix g = sphere_metric()(x);
    const Vector w = e2 / std::sqrt(g(1, 1));
    EXPECT_NEAR(mtw_zeroth_simplified(Lagrangian(sphere_metric()), x, e1, w), 1.0, 1e-12);
}

TEST(Zeroth, SimplifiedRequiresDegenerateCriticalPoint) {
    const Lagrangian l(euclidean_metric(2), parse_field("-0.5*x^2 - y^2", 2));
    EXPECT_THROW(mtw_zeroth_simplified(l, Vector::Zero(2), e1, e2), DomainError);
    EXPECT_THROW(mtw_zeroth_simplified(quartic_lagrangian(Matrix::Identity(2, 2)), Eigen::Vector2d(0.5, 0), e1, e2),
                 DomainError);
}

TEST(Zeroth, GeneralReducesToSimplified) {
    Matrix a(2, 2);
    a << 1.0, 0.3, 0.3, 2.0;
    const Lagrangian l = quartic_lagrangian(a);
    const Eigen::Vector2d u(1.0, 0.2), w(-0.3, 1.0);
    EXPECT_NEAR(mtw_zeroth_general(l, Vector::Zero(2), u, w), mtw_zeroth_simplified(l, Vector::Zero(2), u, w), 1e-10);
}

TEST(Zeroth, GeneralQuadraticPotentialIsZero) {
    const Lagrangian l(euclidean_metric(2), parse_field("-0.5*x^2 - 2*y^2", 2));
    EXPECT_NEAR(mtw_zeroth_general(l, Vector::Zero(2), e1, e2), 0.0, 1e-14);
}

TEST(Zeroth, GeneralSphereIsCurvature) {
    const Eigen::Vector2d x(1.0, 0.4);
    const Vector w = e2 / std::sqrt(sphere_metric()(x)(1, 1));
    EXPECT_NEAR(mtw_zeroth_general(Lagrangian(sphere_metric()), x, e1, w), 1.0, 1e-10);
}

TEST(Zeroth, GeneralRejectsNonMaximum) {
    const Lagrangian l(euclidean_metric(2), parse_field("0.5*x^2 - y^2", 2));
    EXPECT_THROW(mtw_zeroth_general(l, Vector::Zero(2), e1, e2), DomainError);
}

TEST(Zeroth, JacobiMatchesLinearizedOracleAtNondegenerateMaximum) {
    // Flat metric, no cubic terms: MTW(u,0,w) = (3/2) int_0^1 D^4V(wbar, wbar, utilde, utilde) dtau,
    // from the Green identity for the second-order Jacobi correction.
    const Lagrangian l(euclidean_metric(2), parse_field("-0.5*x^2 - 0.8*y^2 + 0.3*x*y - 0.2*x^4 + 0.5*x^2*y^2 - 0.1*y^4", 2));
    const Eigen::Vector2d u(1.0, 0.4), w(-0.3, 0.7);
    Matrix hess(2, 2);
    hess << -1.0, 0.3, 0.3, -1.6;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(-hess);
    const auto mode = [&](const Vector& a, double tau, auto f) {
        Vector out = Vector::Zero(2);
        for (int k = 0; k < 2; ++k) {
            const double mu = std::sqrt(eig.eigenvalues()(k));
            out += f(mu, tau) * eig.eigenvectors().col(k).dot(a) * eig.eigenvectors().col(k);
        }
        return out;
    };
    const auto potential = [&](const Vector& p) { return l.potential(p); };
    const int panels = 200;
    double integral = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double tau = static_cast<double>(i) / panels;
        const Vector wb = mode(w, tau, [](double mu, double t) { return std::sinh(mu * t) / mu; });
        const Vector ut = mode(u, tau, [](double mu, double t) { return std::sinh(mu * (1 - t)) / std::sinh(mu); });
        const double weight = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += weight * oracle::mixed_fourth(potential, Vector::Zero(2), wb, ut, 0.25);
    }
    const double expected = 1.5 * integral / (3.0 * panels);
    EXPECT_NEAR(mtw_jacobi(l, Vector::Zero(2), u, Vector::Zero(2), w).value, expected, 1e-6);
}

TEST(Zeroth, SimplifiedMatchesFourthDerivativeOracle) {
    std::mt19937_64 rng(41);
    for (int k = 0; k < 5; ++k) {
        Matrix a = Matrix::Random(2, 2);
        a = (a + a.transpose()).eval();
        const Lagrangian l = quartic_lagrangian(a);
        const Vector u = oracle::random_vector(rng, 2), w = oracle::random_vector(rng, 2);
        const double fd = oracle::mixed_fourth([&](const Vector& x) { return l.potential(x); }, Vector::Zero(2), w, u, 0.5);
        EXPECT_NEAR(mtw_zeroth_simplified(l, Vector::Zero(2), u, w), fd / 20, 1e-9);
    }
}

TEST(Quartic, ConditionMatchesValueSign) {
    Matrix a = Matrix::Identity(2, 2);
    const QuarticCheck orth = quartic_potential_check(a, e1, e2);
    EXPECT_NEAR(orth.condition_value, 2.0, 1e-14);
    EXPECT_NEAR(orth.mtw_value, -0.4, 1e-12);
    EXPECT_TRUE(orth.violates);
    a << 1, 0, 0, -1;
    const QuarticCheck mixed = quartic_potential_check(a, e1, e2);
    EXPECT_NEAR(mixed.condition_value, -2.0, 1e-14);
    EXPECT_NEAR(mixed.mtw_value, 0.4, 1e-12);
    EXPECT_FALSE(mixed.violates);
}

TEST(Quartic, ValueIsMinusOneFifthOfCondition) {
    std::mt19937_64 rng(42);
    for (int k = 0; k < 20; ++k) {
        Matrix a = Matrix::Random(3, 3);
        a = (a + a.transpose()).eval();
        const Vector u = oracle::random_vector(rng, 3), w = oracle::random_vector(rng, 3);
        const QuarticCheck c = quartic_potential_check(a, u, w);
        EXPECT_NEAR(c.mtw_value, -c.condition_value / 5, 1e-12);
        EXPECT_EQ(c.violates, c.condition_value > 0);
    }
}

TEST(Methods, JacobiAndDirectCostAgree) {
    const std::vector<std::pair<Lagrangian, Eigen::Vector2d>> cases = {
        {Lagrangian(sphere_metric()), Eigen::Vector2d(1.1, 0.2)},
        {Lagrangian(conformal_metric({-3.0, 0.0})), Eigen::Vector2d(0.3, -0.2)},
        {quartic_lagrangian(Matrix::Identity(2, 2)), Eigen::Vector2d(0.0, 0.0)},
    };
    const Eigen::Vector2d u(1.0, 0.3), v(0.2, -0.1), w(-0.2, 0.8);
    for (const auto& [l, x] : cases) {
        const double jacobi = mtw_jacobi(l, x, u, v, w).value;
        const double direct = mtw_direct_cost(l, x, u, v, w).value;
        EXPECT_NEAR(direct, jacobi, 1e-3 * std::max(1.0, std::abs(jacobi)));
    }
}

TEST(Closed, FlatDerivativesVanish) {
    const MetricField flat = euclidean_metric(2);
    EXPECT_EQ(mtw_first(flat, Vector::Zero(2), e1, e2, e2), 0.0);
    EXPECT_EQ(mtw_second(flat, Vector::Zero(2), e1, e2, e2), 0.0);
}

TEST(Closed, FirstOrderVanishesWhereCurvatureIsFlat) {
    const MetricField m = conformal_metric({-3.0, 0.0});
    EXPECT_LE(first_order_vanishing(m, Vector::Zero(2), e1, e2), 1e-14);
    EXPECT_LE(first_order_vanishing(sphere_metric(), Eigen::Vector2d(1.0, 0.0), e1, e2), 1e-10);
    EXPECT_GT(first_order_vanishing(m, Eigen::Vector2d(0.3, 0.1), e1, e2), 1e-3);
}

TEST(Closed, SecondDerivativeEqualsGOnFlatPlane) {
    std::mt19937_64 rng(43);
    for (const double a : {-3.0, -3.5, -4.0}) {
        const MetricField m = conformal_metric({a, 0.0});
        for (int k = 0; k < 5; ++k) {
            const Vector u = oracle::random_vector(rng, 2), v = oracle::random_vector(rng, 2);
            const Vector w = metric_rotation(m(Vector::Zero(2)), u);
            const double g = g_quantity(m, Vector::Zero(2), u, v, w);
            EXPECT_NEAR(mtw_second(m, Vector::Zero(2), u, v, w), g, 1e-10 * std::max(1.0, std::abs(g)));
        }
    }
}

TEST(Closed, GQuantityRejectsCurvedOrSkewPlanes) {
    const MetricField m = conformal_metric({-3.0, 0.0});
    EXPECT_THROW(g_quantity(m, Vector::Zero(2), e1, e2, Eigen::Vector2d(1, 1)), DomainError);
    EXPECT_THROW(g_quantity(sphere_metric(), Eigen::Vector2d(1.0, 0.0), e1, e2, e2), DomainError);
}

TEST(Discriminant, MatchesPolynomialAtConformalOrigin) {
    std::mt19937_64 rng(44);
    for (const double a : {-3.0, -3.5, -4.0, -2.5}) {
        const MetricField m = conformal_metric({a, 0.0});
        for (int k = 0; k < 10; ++k) {
            const Vector u = oracle::random_vector(rng, 2).normalized();
            const Discriminant d = discriminant_2d(m, Vector::Zero(2), u);
            const double p = discriminant_polynomial(a, u(0), u(1));
            EXPECT_NEAR(d.lhs - d.rhs, p, 1e-9 * std::max(1.0, std::abs(p)));
            EXPECT_EQ(d.satisfied, d.lhs <= d.rhs + kInequalitySlack);
        }
    }
}

TEST(Discriminant, AxisExamples) {
    EXPECT_NEAR(discriminant_polynomial(-3.0, 1, 0), 144.0, 1e-12);
    EXPECT_NEAR(discriminant_polynomial(-3.5, 1, 0), 40.0, 1e-12);
    EXPECT_NEAR(discriminant_polynomial(-4.0, 1, 0), -80.0, 1e-12);
    EXPECT_FALSE(discriminant_2d(conformal_metric({-3.5, 0.0}), Vector::Zero(2), e1).satisfied);
    EXPECT_TRUE(discriminant_2d(conformal_metric({-4.0, 0.0}), Vector::Zero(2), e1).satisfied);
}

TEST(Discriminant, RotationIsMetricOrthogonal) {
    const Matrix g = sphere_metric()(Eigen::Vector2d(0.7, 0.0));
    const Eigen::Vector2d u(0.4, 1.3);
    const Vector w = metric_rotation(g, u);
    EXPECT_NEAR(inner(g, u, w), 0.0, 1e-14);
    EXPECT_NEAR(inner(g, w, w), inner(g, u, u), 1e-14);
}

TEST(Quadrature, NestedIntegralIdentities) {
    EXPECT_NEAR(nested_integral([](double) { return 1.0; }, 1000), 0.5, 1e-14);
    EXPECT_NEAR(1.5 * nested_integral([](double t) { return 2 * (1 - t); }, 1000), 1.0, 1e-12);
    EXPECT_NEAR(1.5 * nested_integral([](double t) { return t * t * (1 - t); }, 1000), 1.0 / 20, 1e-12);
}

TEST(Calibration, PicksKappa) {
    const Calibration one = calibrate_normalization({{"a", 2.0, 2.0}, {"b", -0.5, -0.5}, {"zero", 0.0, 0.0}});
    EXPECT_EQ(one.kappa, 1.0);
    EXPECT_EQ(one.informative_cases, 2);
    EXPECT_LE(one.spread, 1e-15);
    EXPECT_EQ(calibrate_normalization({{"a", 4.0, 2.0}, {"b", -1.0, -0.5}}).kappa, 2.0);
    EXPECT_EQ(calibrate_normalization({{"a", 1.0, 2.0}}).kappa, 0.5);
}

TEST(Calibration, RejectsInconsistentCases) {
    EXPECT_THROW(calibrate_normalization({}), CalibrationError);
    EXPECT_THROW(calibrate_normalization({{"zero", 0.0, 0.0}}), CalibrationError);
    EXPECT_THROW(calibrate_normalization({{"a", 1.0, 1.0}, {"b", 2.0, 1.0}}), CalibrationError);
    EXPECT_THROW(calibrate_normalization({{"a", 1.01, 1.0}}), CalibrationError);
}

TEST(Calibration, JacobiOracleSuiteHasUnitNormalization) {
    const Calibration c = calibrate_normalization(oracle_suite(Method::Jacobi));
    EXPECT_EQ(c.kappa, 1.0);
    EXPECT_LE(c.spread, kCalibrationSpread);
}
