#include "mtwcheck/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "mtwcheck/error.hpp"

namespace mtw {

namespace {

Matrix christoffel_along(const TensorN<3>& gamma, const Vector& a) {
    // (k, j) -> Gamma^k_ij a^i
    const auto n = static_cast<int>(a.size());
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(k, j) += gamma(k, i, j) * a(i);
    return m;
}

double condition_number(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 0.0) return INFINITY;
    return s(0) / s(s.size() - 1);
}

}  // namespace

double CurvePath::energy_drift() const {
    const auto [lo, hi] = std::minmax_element(energy.begin(), energy.end());
    const double scale = std::max(1.0, std::abs(energy.front()));
    return (*hi - *lo) / scale;
}

Flow integrate_flow(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& v,
                    const FlowRequest& request) {
    const int n = lagrangian.dim();
    if (x.size() != n || v.size() != n) throw DomainError("flow initial data dimension mismatch");
    if (request.steps < 1) throw DomainError("step count must be positive");
    const int frame_cols = static_cast<int>(request.transport.cols());
    if (frame_cols > 0 && request.transport.rows() != n) throw DomainError("transported frame dimension mismatch");
    const bool variational = request.variational;

    const int off_action = 2 * n;
    const int off_frame = off_action + 1;
    const int off_phi = off_frame + n * frame_cols;
    const int size = off_phi + (variational ? 4 * n * n : 0);

    auto rhs = [&](const Vector& y) -> Vector {
        const auto xs = y.segment(0, n);
        const Vector xd = y.segment(n, n);
        const ConnectionJet c = connection_jet(lagrangian, xs, variational);
        const Matrix gx = christoffel_along(c.christoffel, xd);
        Vector dy(size);
        dy.segment(0, n) = xd;
        dy.segment(n, n) = c.force - gx * xd;
        dy(off_action) = 0.5 * xd.dot(c.g * xd) - c.potential;
        for (int col = 0; col < frame_cols; ++col)
            dy.segment(off_frame + col * n, n) = -gx * y.segment(off_frame + col * n, n);
        if (variational) {
            Matrix a = Matrix::Zero(2 * n, 2 * n);
            a.topRightCorner(n, n).setIdentity();
            for (int k = 0; k < n; ++k) {
                for (int m = 0; m < n; ++m) {
                    double s = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) s += c.d_christoffel(m, k, i, j) * xd(i) * xd(j);
                    a(n + k, m) = c.d_force(k, m) - s;
                }
            }
            a.bottomRightCorner(n, n) = -2.0 * gx;
            const Eigen::Map<const Matrix> phi(y.data() + off_phi, 2 * n, 2 * n);
            Eigen::Map<Matrix>(dy.data() + off_phi, 2 * n, 2 * n) = a * phi;
        }
        return dy;
    };

    Vector y = Vector::Zero(size);
    y.segment(0, n) = x;
    y.segment(n, n) = v;
    for (int col = 0; col < frame_cols; ++col) y.segment(off_frame + col * n, n) = request.transport.col(col);
    if (variational) Eigen::Map<Matrix>(y.data() + off_phi, 2 * n, 2 * n).setIdentity();

    Flow flow;
    CurvePath& path = flow.path;
    path.lagrangian = lagrangian;
    path.steps = request.steps;
    const double h = 1.0 / request.steps;
    auto record = [&](int i) {
        path.tau.push_back(i == request.steps ? 1.0 : i * h);
        const Vector xs = y.segment(0, n);
        const Vector xd = y.segment(n, n);
        path.position.push_back(xs);
        path.velocity.push_back(xd);
        const Matrix g = lagrangian.metric(xs);
        path.energy.push_back(0.5 * xd.dot(g * xd) + lagrangian.potential(xs));
        if (frame_cols > 0) flow.transported.push_back(Eigen::Map<const Matrix>(y.data() + off_frame, n, frame_cols));
        if (variational) flow.fundamental.push_back(Eigen::Map<const Matrix>(y.data() + off_phi, 2 * n, 2 * n));
    };
    record(0);
    for (int i = 1; i <= request.steps; ++i) {
        y = rk4_step(rhs, y, h);
        if (!y.allFinite()) throw NumericalError("least-action integration produced non-finite values");
        record(i);
    }
    path.action = y(off_action);
    return flow;
}

CurvePath least_action_curve(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x,
                             const Eigen::Ref<const Vector>& v, int steps) {
    return integrate_flow(lagrangian, x, v, {steps, Matrix(), false}).path;
}

Vector c_exp(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& v,
             int steps) {
    return least_action_curve(lagrangian, x, v, steps).end();
}

ShootingResult shoot(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                     int steps, std::optional<Vector> guess) {
    constexpr int kMaxIterations = 50;
    constexpr int kPolishSteps = 2;
    constexpr double kTolerance = 1e-10;
    const int n = lagrangian.dim();
    if (y.size() != n) throw DomainError("target dimension mismatch");

    Vector v = guess ? *guess : Vector(y - x);
    const FlowRequest request{steps, Matrix(), true};
    auto try_flow = [&](const Vector& vel) -> std::optional<Flow> {
        try {
            return integrate_flow(lagrangian, x, vel, request);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
    };

    std::optional<Flow> flow = try_flow(v);
    if (!flow) throw ShootingError("least-action curve from the initial guess is not integrable");
    double residual = (flow->path.end() - y).norm();
    int iterations = 0;
    int polish = 0;
    while (iterations < kMaxIterations) {
        const bool converged = residual <= kTolerance;
        if (converged && (polish >= kPolishSteps || residual == 0.0)) break;
        const Matrix jac = flow->fundamental.back().topRightCorner(n, n);
        if (condition_number(jac) > 1e12) throw ShootingError("endpoint map is singular during shooting");
        const Vector step = -jac.partialPivLu().solve(Vector(flow->path.end() - y));
        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 30 && !accepted; ++halving, lambda *= 0.5) {
            const Vector trial = v + lambda * step;
            auto f = try_flow(trial);
            if (!f) continue;
            const double r = (f->path.end() - y).norm();
            if (r < residual || (converged && r <= residual)) {
                v = trial;
                flow = std::move(f);
                residual = r;
                accepted = true;
            }
        }
        ++iterations;
        if (converged) {
            ++polish;
            if (!accepted) break;
        } else if (!accepted) {
            throw ShootingError("damped Newton made no progress (residual " + std::to_string(residual) + ")");
        }
    }
    if (residual > kTolerance) throw ShootingError("shooting did not converge in " + std::to_string(kMaxIterations) + " iterations");
    const Matrix jac = flow->fundamental.back().topRightCorner(n, n);
    if (condition_number(jac) > kConjugateCondition)
        throw ShootingError("endpoint map is singular at the solution; the least-action curve is not unique");
    return {v, std::move(flow->path), iterations, residual};
}

double cost(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
            int steps) {
    return shoot(lagrangian, x, y, steps).path.action;
}

ParallelFrame parallel_transport(const CurvePath& path, const Eigen::Ref<const Vector>& u) {
    const Flow flow = integrate_flow(path.lagrangian, path.start(), path.initial_velocity(), {path.steps, Matrix(u), false});
    ParallelFrame frame;
    for (const auto& m : flow.transported) frame.field.push_back(m.col(0));
    return frame;
}

JacobiSolution jacobi_bvp(const CurvePath& path, const Eigen::Ref<const Vector>& u) {
    return jacobi_bvp(integrate_flow(path.lagrangian, path.start(), path.initial_velocity(), {path.steps, Matrix(), true}), u);
}

JacobiSolution jacobi_bvp(const Flow& flow, const Eigen::Ref<const Vector>& u) {
    if (flow.fundamental.empty()) throw DomainError("flow was integrated without fundamental matrices");
    const auto n = static_cast<int>(u.size());
    const Matrix& phi1 = flow.fundamental.back();
    const Matrix b = phi1.topRightCorner(n, n);
    if (condition_number(b) > kConjugateCondition) throw ConjugatePointError("conjugate point at the end of the curve");
    Vector initial(2 * n);
    initial.head(n) = u;
    initial.tail(n) = -b.partialPivLu().solve(Vector(phi1.topLeftCorner(n, n) * u));

    JacobiSolution sol;
    for (std::size_t i = 0; i < flow.fundamental.size(); ++i) {
        const Vector state = flow.fundamental[i] * initial;
        const Vector j = state.head(n);
        const Vector jd = state.tail(n);
        const ConnectionJet c = connection_jet(flow.path.lagrangian, flow.path.position[i], false);
        sol.field.push_back(j);
        sol.coordinate_derivative.push_back(jd);
        sol.derivative.push_back(jd + christoffel_along(c.christoffel, flow.path.velocity[i]) * j);
    }
    return sol;
}

double LinearizedModes::wbar(double mu, double tau) { return mu < 1e-8 ? tau : std::sinh(mu * tau) / mu; }

double LinearizedModes::utilde(double mu, double tau) {
    return mu < 1e-8 ? 1.0 - tau : std::sinh(mu * (1.0 - tau)) / std::sinh(mu);
}

LinearizedModes linearized_modes(const GeometryJet& geo) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(geo.hess_V, geo.g);
    if (es.info() != Eigen::Success) throw NumericalError("generalized eigenproblem failed");
    LinearizedModes modes;
    modes.basis = es.eigenvectors();
    modes.mu.resize(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < modes.mu.size(); ++k) {
        const double lambda = es.eigenvalues()(k);
        if (lambda > 1e-12) throw DomainError("potential Hessian has a positive eigenvalue; not a local maximum");
        modes.mu(k) = std::sqrt(std::max(0.0, -lambda));
    }
    return modes;
}

}  // namespace mtw
