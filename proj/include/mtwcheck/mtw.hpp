#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mtwcheck/dynamics.hpp"
#include "mtwcheck/geometry.hpp"

namespace mtw {

enum class Method { ClosedForm0, ClosedForm1, ClosedForm2, Jacobi, DirectCost };

std::string to_string(Method m);

struct MtwEvaluation {
    Vector x, u, v, w;
    Method method = Method::Jacobi;
    double value = 0.0;
    double h_s = 0.0;
    double h_t = 0.0;
    int steps = 0;
    /// |coarse - fine| of the Richardson pair, scaled like `value`.
    double error_estimate = 0.0;
};

inline constexpr double kDefaultStep = 1e-2;

/// (3/2) d^2/ds^2 <u, D_tau J_s(0)> at s = 0 along the least-action curves
/// with initial velocity v + s w.
MtwEvaluation mtw_jacobi(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& v,
                         const Vector& w, double h = kDefaultStep, int steps = kDefaultSteps);

/// -(3/2) d^2/dt^2 d^2/ds^2 c(sigma(t), exp^c_x(v + s w)) with sigma the
/// geodesic through x with velocity u, from a 5x5 stencil of shooting costs.
MtwEvaluation mtw_direct_cost(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& v,
                              const Vector& w, double h_s = kDefaultStep, double h_t = kDefaultStep,
                              int steps = kDefaultSteps);

/// <R(w,u)w,u> + (1/20) nabla^4 V(w,w,u,u). Requires dV(x) = 0 and Hess V(x) = 0.
double mtw_zeroth_simplified(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& w);

/// Zeroth-order value at a maximum of V with nondegenerate Hessian allowed,
/// by mode decomposition of the linearized flow and nested quadrature.
double mtw_zeroth_general(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& w,
                          int quad_panels = 1000);

/// d/dt MTW(u, tv, w) at t = 0 for the squared-distance cost (V = 0).
double mtw_first(const MetricField& metric, const Vector& x, const Vector& u, const Vector& v, const Vector& w);
double mtw_first(const GeometryJet& geo, const Vector& u, const Vector& v, const Vector& w);

/// d^2/dt^2 MTW(u, tv, w) at t = 0 for the squared-distance cost (V = 0).
double mtw_second(const MetricField& metric, const Vector& x, const Vector& u, const Vector& v, const Vector& w);
double mtw_second(const GeometryJet& geo, const Vector& u, const Vector& v, const Vector& w);

/// Second-order quantity G(u, v, w) on an orthogonal zero-curvature plane.
/// Throws DomainError when <u,w> != 0 or K(u,w) != 0 (tolerance 1e-8).
double g_quantity(const MetricField& metric, const Vector& x, const Vector& u, const Vector& v, const Vector& w);
double g_quantity(const GeometryJet& geo, const Vector& u, const Vector& v, const Vector& w);

/// sup over g-unit v of |<(nabla_w R)(w,u)v,u>|.
double first_order_vanishing(const MetricField& metric, const Vector& x, const Vector& u, const Vector& w);
double first_order_vanishing(const GeometryJet& geo, const Vector& u, const Vector& w);

inline constexpr double kInequalitySlack = 1e-9;
inline constexpr double kFlatCurvatureTolerance = 1e-8;

struct Discriminant {
    double lhs = 0.0;  // 3 <(nabla_w nabla_u R)(w,u)w,u>^2
    double rhs = 0.0;  // 2 <(nabla_w^2 R)(w,u)w,u> <(nabla_u^2 R)(w,u)w,u>
    bool satisfied = true;
    Vector w;
};

/// 90 degree rotation of u in the metric at x (2D only).
Vector metric_rotation(const Matrix& g, const Vector& u);

/// Two-dimensional discriminant condition at a zero of the Gauss curvature.
Discriminant discriminant_2d(const MetricField& metric, const Vector& x, const Vector& u);
Discriminant discriminant_2d(const GeometryJet& geo, const Vector& u);

struct QuarticCheck {
    double mtw_value = 0.0;
    double condition_value = 0.0;  // (2<Au,w>)^2 + 2<Au,u><Aw,w>
    bool violates = false;
};

/// Flat metric, V = -<Ax,x>^2, evaluated at the origin.
QuarticCheck quartic_potential_check(const Matrix& a, const Vector& u, const Vector& w);

/// Integral over 0 <= tau <= taubar <= 1 of f(tau), by composite Simpson on
/// the equivalent single integral of (1 - tau) f(tau).
double nested_integral(const std::function<double(double)>& f, int panels);

struct CalibrationCase {
    std::string name;
    double measured = 0.0;
    double closed_form = 0.0;
};

struct Calibration {
    double kappa = 1.0;
    double spread = 0.0;  // max |measured / (kappa closed_form) - 1|
    int informative_cases = 0;
};

inline constexpr double kCalibrationSpread = 1e-3;

/// Picks kappa in {1/2, 1, 2} by least relative residual. Throws
/// CalibrationError when no case is informative or the spread exceeds 1e-3.
Calibration calibrate_normalization(const std::vector<CalibrationCase>& cases);

/// Sphere (v = 0, orthonormal pairs) and flat quartic oracle cases measured with `method`.
std::vector<CalibrationCase> oracle_suite(Method method, int steps = kDefaultSteps);

}  // namespace mtw
