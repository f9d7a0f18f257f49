#include "mtwcheck/conformal.hpp"

#include <cmath>
#include <numbers>

#include "mtwcheck/mtw.hpp"

namespace mtw {

ScalarField conformal_exponent(const ConformalSpec& spec) {
    const ScalarField x = ScalarField::variable(2, 0);
    const ScalarField y = ScalarField::variable(2, 1);
    ScalarField f = pow(x, 3) * y + spec.a * (pow(x, 2) * pow(y, 2)) + x * pow(y, 3);
    if (spec.a4 != 0.0) f = f + spec.a4 * pow(y, 4);
    return f;
}

MetricField conformal_metric(const ConformalSpec& spec) {
    const ScalarField factor = exp(2.0 * conformal_exponent(spec));
    return MetricField::diagonal({factor, factor});
}

double gauss_closed(const ConformalSpec& spec, double x, double y) {
    const double f = x * x * x * y + spec.a * x * x * y * y + x * y * y * y + spec.a4 * y * y * y * y;
    const double laplacian = 2.0 * spec.a * x * x + 12.0 * x * y + 2.0 * spec.a * y * y + 12.0 * spec.a4 * y * y;
    return -laplacian * std::exp(-2.0 * f);
}

CurvatureSign nonneg_curvature_threshold(const ConformalSpec& spec) {
    // The Laplacian of f is the quadratic form of this matrix.
    Eigen::Matrix2d q;
    q << 2.0 * spec.a, 6.0, 6.0, 2.0 * spec.a + 12.0 * spec.a4;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q);
    CurvatureSign sign;
    if (es.eigenvalues()(1) > 1e-12) {
        sign.nonnegative = false;
        sign.witness = Vector(es.eigenvectors().col(1));
    }
    return sign;
}

double discriminant_polynomial(double a, double u1, double u2) {
    const double c = 27.0 - 2.0 * a * a;
    const double d = 18.0 - 4.0 * a * a;
    return 16.0 * (c * std::pow(u2, 4) + d * u1 * u1 * u2 * u2 + c * std::pow(u1, 4));
}

std::string to_string(ConformalClass c) {
    switch (c) {
        case ConformalClass::FailsZeroth: return "fails-zeroth";
        case ConformalClass::FailsSecondOrder: return "fails-second-order";
        case ConformalClass::PassesNecessary: return "passes-necessary";
    }
    return "unknown";
}

ConformalClass classify(double a) {
    const ConformalSpec spec{a, 0.0};
    if (!nonneg_curvature_threshold(spec).nonnegative) return ConformalClass::FailsZeroth;
    const GeometryJet geo = geometry_jet(Lagrangian(conformal_metric(spec)), Vector::Zero(2), 4);
    constexpr int kDirections = 32;
    for (int k = 0; k < kDirections; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / kDirections;
        const Vector u = Eigen::Vector2d(std::cos(theta), std::sin(theta));
        if (!discriminant_2d(geo, u).satisfied) return ConformalClass::FailsSecondOrder;
    }
    return ConformalClass::PassesNecessary;
}

}  // namespace mtw
