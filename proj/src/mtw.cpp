#include "mtwcheck/mtw.hpp"

#include <array>
#include <cmath>
#include <map>

#include "mtwcheck/error.hpp"

namespace mtw {

namespace {

// Five-point second difference on samples at -2, -1, 0, 1, 2 steps.
double second_difference(const std::array<double, 5>& f, double h) {
    return (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
}

constexpr std::array<double, 5> kSecondWeights{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

Vector apply_r(const GeometryJet& geo, const Vector& a, const Vector& b, const Vector& c) {
    return riemann_apply(geo.riemann, geo.g_inv, a, b, c);
}

double ip(const GeometryJet& geo, const Vector& a, const Vector& b) { return inner(geo.g, a, b); }

double n2r(const GeometryJet& geo, const Vector& p, const Vector& q, const Vector& a, const Vector& b,
           const Vector& c, const Vector& d) {
    return nabla2_riemann_form(geo.nabla2_riemann, p, q, a, b, c, d);
}

GeometryJet riemannian_jet(const MetricField& metric, const Vector& x) {
    return geometry_jet(Lagrangian(metric), x, 4);
}

void require_critical(const GeometryJet& geo, bool flat_hessian) {
    if (geo.dV.lpNorm<Eigen::Infinity>() > 1e-10) throw DomainError("x is not a critical point of the potential");
    if (flat_hessian && geo.hess_V.lpNorm<Eigen::Infinity>() > 1e-10)
        throw DomainError("potential Hessian does not vanish at x; use the general zeroth-order formula");
}

void require_zero_curvature_plane(const GeometryJet& geo, const Vector& u, const Vector& w) {
    const double scale = std::sqrt(ip(geo, u, u) * ip(geo, w, w));
    if (std::abs(ip(geo, u, w)) > kFlatCurvatureTolerance * scale) throw DomainError("u and w are not orthogonal");
    if (std::abs(sectional(geo, u, w)) > kFlatCurvatureTolerance)
        throw DomainError("sectional curvature of span{u, w} does not vanish");
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::ClosedForm0: return "closed-form-0";
        case Method::ClosedForm1: return "closed-form-1";
        case Method::ClosedForm2: return "closed-form-2";
        case Method::Jacobi: return "jacobi";
        case Method::DirectCost: return "direct-cost";
    }
    return "unknown";
}

MtwEvaluation mtw_jacobi(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& v,
                         const Vector& w, double h, int steps) {
    const Matrix g = lagrangian.metric(x);
    std::map<int, double> cache;  // keyed by multiples of h/2
    auto sample = [&](int k) {
        if (auto it = cache.find(k); it != cache.end()) return it->second;
        const Vector vel = v + (0.5 * h * k) * w;
        const Flow flow = integrate_flow(lagrangian, x, vel, {steps, Matrix(), true});
        const JacobiSolution jac = jacobi_bvp(flow, u);
        return cache[k] = inner(g, u, jac.derivative.front());
    };
    const double coarse = second_difference({sample(-4), sample(-2), sample(0), sample(2), sample(4)}, h);
    const double fine = second_difference({sample(-2), sample(-1), sample(0), sample(1), sample(2)}, h / 2);

    MtwEvaluation e{x, u, v, w, Method::Jacobi};
    e.value = 1.5 * (16.0 * fine - coarse) / 15.0;
    e.error_estimate = 1.5 * std::abs(fine - coarse);
    e.h_s = h;
    e.steps = steps;
    return e;
}

MtwEvaluation mtw_direct_cost(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& v,
                              const Vector& w, double h_s, double h_t, int steps) {
    const Lagrangian riemannian(lagrangian.metric);
    std::map<int, Vector> sigma;
    std::map<int, Vector> target;
    std::map<std::pair<int, int>, double> costs;
    auto cost_at = [&](int kt, int ks) {
        const auto key = std::make_pair(kt, ks);
        if (auto it = costs.find(key); it != costs.end()) return it->second;
        const double t = 0.5 * h_t * kt;
        const double s = 0.5 * h_s * ks;
        if (!sigma.count(kt)) sigma[kt] = c_exp(riemannian, x, t * u, steps);
        if (!target.count(ks)) target[ks] = c_exp(lagrangian, x, v + s * w, steps);
        const Vector guess = v + s * w - t * u;
        return costs[key] = shoot(lagrangian, sigma[kt], target[ks], steps, guess).path.action;
    };
    auto mixed = [&](int stride, double ht, double hs) {
        double sum = 0.0;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                sum += kSecondWeights[static_cast<std::size_t>(a)] * kSecondWeights[static_cast<std::size_t>(b)] *
                       cost_at((a - 2) * stride, (b - 2) * stride);
        return sum / (ht * ht * hs * hs);
    };
    const double coarse = mixed(2, h_t, h_s);
    const double fine = mixed(1, h_t / 2, h_s / 2);

    MtwEvaluation e{x, u, v, w, Method::DirectCost};
    e.value = -1.5 * (16.0 * fine - coarse) / 15.0;
    e.error_estimate = 1.5 * std::abs(fine - coarse);
    e.h_s = h_s;
    e.h_t = h_t;
    e.steps = steps;
    return e;
}

double mtw_zeroth_simplified(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& w) {
    const GeometryJet geo = geometry_jet(lagrangian, x, 4);
    require_critical(geo, true);
    return riemann_form(geo.riemann, w, u, w, u) + fourth_contraction(geo, w, u) / 20.0;
}

double nested_integral(const std::function<double(double)>& f, int panels) {
    if (panels < 2) throw DomainError("quadrature needs at least two panels");
    if (panels % 2) ++panels;
    const double h = 1.0 / panels;
    double sum = f(0.0) + 0.0;  // (1 - tau) f(tau) vanishes at tau = 1
    for (int i = 1; i < panels; ++i) {
        const double tau = i * h;
        sum += (i % 2 ? 4.0 : 2.0) * (1.0 - tau) * f(tau);
    }
    return sum * h / 3.0;
}

double mtw_zeroth_general(const Lagrangian& lagrangian, const Vector& x, const Vector& u, const Vector& w,
                          int quad_panels) {
    const GeometryJet geo = geometry_jet(lagrangian, x, 4);
    require_critical(geo, false);
    const LinearizedModes modes = linearized_modes(geo);
    const Matrix& g = geo.g;
    const bool hessian = geo.hess_V.lpNorm<Eigen::Infinity>() > 0.0;
    auto ut = [&](double tau) { return modes.apply(g, u, tau, &LinearizedModes::utilde); };
    auto wb = [&](double tau) { return modes.apply(g, w, tau, &LinearizedModes::wbar); };
    auto dwb = [&](double tau) {
        return modes.apply(g, w, tau, [](double mu, double t) { return std::cosh(mu * t); });
    };
    // integral over [0, tau] of R(dwbar, wbar) u, by composite Simpson
    auto curvature_integral = [&](double tau) {
        constexpr int kInner = 200;
        Vector acc = Vector::Zero(u.size());
        if (tau == 0.0) return acc;
        const double h = tau / kInner;
        for (int i = 0; i <= kInner; ++i) {
            const double s = i * h;
            const double weight = (i == 0 || i == kInner) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += weight * apply_r(geo, dwb(s), wb(s), u);
        }
        return Vector(acc * h / 3.0);
    };
    auto integrand = [&](double tau) {
        const Vector a = ut(tau);
        const Vector b = wb(tau);
        const Vector db = dwb(tau);
        double value = 2.0 * riemann_form(geo.riemann, db, a, db, u);
        if (hessian) value += a.dot(geo.hess_V * curvature_integral(tau));
        if (geo.has_potential) value += contract(geo.nabla4_V, b, b, a, u);
        return value;
    };
    return 1.5 * nested_integral(integrand, quad_panels);
}

double mtw_first(const GeometryJet& geo, const Vector& u, const Vector& v, const Vector& w) {
    const auto& nr = geo.nabla_riemann;
    return 0.5 * nabla_riemann_form(nr, w, w, u, v, u) + 0.25 * nabla_riemann_form(nr, v, w, u, w, u);
}

double mtw_first(const MetricField& metric, const Vector& x, const Vector& u, const Vector& v, const Vector& w) {
    return mtw_first(geometry_jet(Lagrangian(metric), x, 3), u, v, w);
}

namespace {

// Terms shared by the second-order coefficient and G.
double second_order_common(const GeometryJet& geo, const Vector& u, const Vector& v, const Vector& w) {
    const Vector rvu_u = apply_r(geo, v, u, u);
    const Vector rvw_w = apply_r(geo, v, w, w);
    const Vector rwu_v = apply_r(geo, w, u, v);
    const Vector rvu_w = apply_r(geo, v, u, w);
    const Vector rvw_u = apply_r(geo, v, w, u);
    return n2r(geo, w, w, v, u, v, u) / 10.0 - ip(geo, rvu_u, rvw_w) / 5.0 + 2.0 * n2r(geo, v, w, w, u, v, u) / 5.0 +
           n2r(geo, v, v, w, u, w, u) / 10.0 + 4.0 * (ip(geo, rwu_v, rwu_v) + ip(geo, rvu_w, rwu_v)) / 15.0 +
           (ip(geo, rwu_v, rvw_u) + ip(geo, rvu_w, rvw_u)) / 3.0;
}

}  // namespace

double mtw_second(const GeometryJet& geo, const Vector& u, const Vector& v, const Vector& w) {
    const Vector rvu_v = apply_r(geo, v, u, v);
    const Vector rwu_w = apply_r(geo, w, u, w);
    const Vector rwu_u = apply_r(geo, w, u, u);
    const Vector rvw_v = apply_r(geo, v, w, v);
    return second_order_common(geo, u, v, w) + 4.0 * ip(geo, rvu_v, rwu_w) / 15.0 - ip(geo, rwu_u, rvw_v) / 5.0;
}

double mtw_second(const MetricField& metric, const Vector& x, const Vector& u, const Vector& v, const Vector& w) {
    return mtw_second(riemannian_jet(metric, x), u, v, w);
}

double g_quantity(const GeometryJet& geo, const Vector& u, const Vector& v, const Vector& w) {
    require_zero_curvature_plane(geo, u, w);
    return second_order_common(geo, u, v, w);
}

double g_quantity(const MetricField& metric, const Vector& x, const Vector& u, const Vector& v, const Vector& w) {
    return g_quantity(riemannian_jet(metric, x), u, v, w);
}

double first_order_vanishing(const GeometryJet& geo, const Vector& u, const Vector& w) {
    const auto n = geo.dim;
    Vector c(n);
    for (int j = 0; j < n; ++j) c(j) = nabla_riemann_form(geo.nabla_riemann, w, w, u, Vector::Unit(n, j), u);
    return std::sqrt(std::max(0.0, c.dot(geo.g_inv * c)));
}

double first_order_vanishing(const MetricField& metric, const Vector& x, const Vector& u, const Vector& w) {
    return first_order_vanishing(geometry_jet(Lagrangian(metric), x, 3), u, w);
}

Vector metric_rotation(const Matrix& g, const Vector& u) {
    if (g.rows() != 2 || u.size() != 2) throw DomainError("metric rotation is defined in two dimensions only");
    const Vector gu = g * u;
    const double root = std::sqrt(g.determinant());
    Vector w(2);
    w << -gu(1) / root, gu(0) / root;
    return w;
}

Discriminant discriminant_2d(const GeometryJet& geo, const Vector& u) {
    if (geo.dim != 2) throw DomainError("discriminant condition requires dimension 2");
    Discriminant d;
    d.w = metric_rotation(geo.g, u);
    const Vector& w = d.w;
    if (std::abs(sectional(geo, u, w)) > kFlatCurvatureTolerance)
        throw DomainError("Gauss curvature does not vanish at x");
    const double mixed = n2r(geo, w, u, w, u, w, u);
    d.lhs = 3.0 * mixed * mixed;
    d.rhs = 2.0 * n2r(geo, w, w, w, u, w, u) * n2r(geo, u, u, w, u, w, u);
    d.satisfied = d.lhs <= d.rhs + kInequalitySlack;
    return d;
}

Discriminant discriminant_2d(const MetricField& metric, const Vector& x, const Vector& u) {
    return discriminant_2d(riemannian_jet(metric, x), u);
}

QuarticCheck quartic_potential_check(const Matrix& a, const Vector& u, const Vector& w) {
    const auto n = static_cast<int>(a.rows());
    const Lagrangian lagrangian(euclidean_metric(n), quartic_potential(a));
    QuarticCheck q;
    q.mtw_value = mtw_zeroth_simplified(lagrangian, Vector::Zero(n), u, w);
    const double auw = (a * u).dot(w);
    q.condition_value = 4.0 * auw * auw + 2.0 * (a * u).dot(u) * (a * w).dot(w);
    q.violates = q.mtw_value < 0.0;
    return q;
}

Calibration calibrate_normalization(const std::vector<CalibrationCase>& cases) {
    std::vector<double> ratios;
    for (const auto& c : cases)
        if (std::abs(c.closed_form) > 1e-12) ratios.push_back(c.measured / c.closed_form);
    if (ratios.empty()) throw CalibrationError("no informative calibration cases");

    Calibration best;
    double best_residual = INFINITY;
    for (double kappa : {0.5, 1.0, 2.0}) {
        double residual = 0.0;
        for (double r : ratios) residual += (r / kappa - 1.0) * (r / kappa - 1.0);
        if (residual < best_residual) {
            best_residual = residual;
            best.kappa = kappa;
        }
    }
    for (double r : ratios) best.spread = std::max(best.spread, std::abs(r / best.kappa - 1.0));
    best.informative_cases = static_cast<int>(ratios.size());
    if (best.spread > kCalibrationSpread)
        throw CalibrationError("calibration cases disagree: relative spread " + std::to_string(best.spread));
    return best;
}

std::vector<CalibrationCase> oracle_suite(Method method, int steps) {
    struct Spec {
        std::string name;
        Lagrangian lagrangian;
        Vector x, u, w;
        double closed_form;
    };
    std::vector<Spec> specs;
    const MetricField sphere = sphere_metric();
    const std::array<std::array<double, 4>, 3> sphere_cases{{{1.0, 0.3, 0.4, 1.0}, {0.7, -0.4, 1.0, -0.5}, {1.3, 1.0, 0.2, 0.9}}};
    for (std::size_t k = 0; k < sphere_cases.size(); ++k) {
        const auto& c = sphere_cases[k];
        Vector x(2);
        x << c[0], c[1];
        Matrix frame(2, 2);
        frame << c[2], 1.0, c[3], 0.0;
        const Matrix e = gram_schmidt(sphere(x), frame);
        specs.push_back({"sphere-" + std::to_string(k), Lagrangian(sphere), x, e.col(0), e.col(1), 1.0});
    }
    auto quartic = [&](const std::string& name, const Matrix& a, const Vector& u, const Vector& w) {
        const Lagrangian l(euclidean_metric(2), quartic_potential(a));
        specs.push_back({name, l, Vector::Zero(2), u, w, mtw_zeroth_simplified(l, Vector::Zero(2), u, w)});
    };
    quartic("quartic-identity", Matrix::Identity(2, 2), Vector::Unit(2, 0), Vector::Unit(2, 1));
    quartic("quartic-saddle", Eigen::Vector2d(1.0, -1.0).asDiagonal().toDenseMatrix(), Vector::Unit(2, 0), Vector::Unit(2, 1));
    Matrix mixed(2, 2);
    mixed << 1.0, 0.5, 0.5, 2.0;
    quartic("quartic-mixed", mixed, Vector::Unit(2, 0), Vector::Unit(2, 1));
    specs.push_back({"flat", Lagrangian(euclidean_metric(2)), Vector::Zero(2), Vector::Unit(2, 0), Vector::Unit(2, 1), 0.0});

    std::vector<CalibrationCase> cases;
    for (const auto& s : specs) {
        const Vector v = Vector::Zero(s.x.size());
        double measured = 0.0;
        switch (method) {
            case Method::Jacobi: measured = mtw_jacobi(s.lagrangian, s.x, s.u, v, s.w, kDefaultStep, steps).value; break;
            case Method::DirectCost:
                measured = mtw_direct_cost(s.lagrangian, s.x, s.u, v, s.w, kDefaultStep, kDefaultStep, steps).value;
                break;
            default: measured = mtw_zeroth_simplified(s.lagrangian, s.x, s.u, s.w); break;
        }
        cases.push_back({s.name, measured, s.closed_form});
    }
    return cases;
}

}  // namespace mtw
