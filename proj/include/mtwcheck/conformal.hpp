#pragma once

#include <optional>
#include <string>

#include "mtwcheck/geometry.hpp"

namespace mtw {

/// Conformally flat metric e^{2f}(dx^2 + dy^2) with
/// f = x^3 y + a x^2 y^2 + x y^3 + a4 y^4.
struct ConformalSpec {
    double a = -3.0;
    double a4 = 0.0;
};

ScalarField conformal_exponent(const ConformalSpec& spec);
MetricField conformal_metric(const ConformalSpec& spec);

/// Gauss curvature -(Laplacian f) e^{-2f}.
double gauss_closed(const ConformalSpec& spec, double x, double y);

struct CurvatureSign {
    bool nonnegative = true;
    /// Point where the Laplacian of f is positive, when one exists.
    std::optional<Vector> witness;
};

/// Whether the Gauss curvature is nonnegative on the whole plane.
CurvatureSign nonneg_curvature_threshold(const ConformalSpec& spec);

/// 16[(27 - 2a^2) u2^4 + (18 - 4a^2) u1^2 u2^2 + (27 - 2a^2) u1^4].
double discriminant_polynomial(double a, double u1, double u2);

enum class ConformalClass { FailsZeroth, FailsSecondOrder, PassesNecessary };

std::string to_string(ConformalClass c);

/// Verdict of the implemented necessary conditions for the a4 = 0 family:
/// curvature sign on the plane, then the discriminant condition at the origin
/// evaluated through the generic curvature pipeline.
ConformalClass classify(double a);

}  // namespace mtw
