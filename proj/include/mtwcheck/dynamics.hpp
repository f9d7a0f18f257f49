#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mtwcheck/geometry.hpp"

namespace mtw {

inline constexpr int kDefaultSteps = 200;

/// One classical Runge-Kutta step of y' = f(y).
template <typename Scalar, typename F>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rk4_step(const F& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, Scalar h) {
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const V k1 = f(y);
    const V k2 = f(V(y + (h / 2) * k1));
    const V k3 = f(V(y + (h / 2) * k2));
    const V k4 = f(V(y + h * k3));
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Discretized curve of least action on the uniform grid tau_i = i/N.
struct CurvePath {
    Lagrangian lagrangian;
    int steps = kDefaultSteps;
    std::vector<double> tau;
    std::vector<Vector> position;
    std::vector<Vector> velocity;
    std::vector<double> energy;  // |dgamma|^2/2 + V
    double action = 0.0;  // integral of |dgamma|^2/2 - V

    const Vector& start() const { return position.front(); }
    const Vector& end() const { return position.back(); }
    const Vector& initial_velocity() const { return velocity.front(); }
    double energy_drift() const;
};

/// Parallel transport of a vector along a CurvePath.
struct ParallelFrame {
    std::vector<Vector> field;
};

/// Jacobi field with J(0) = u, J(1) = 0. `derivative` is the covariant
/// derivative D_tau J; `coordinate_derivative` is dJ/dtau in the chart.
struct JacobiSolution {
    std::vector<Vector> field;
    std::vector<Vector> derivative;
    std::vector<Vector> coordinate_derivative;
};

/// Everything the coupled integration can produce in one pass.
struct Flow {
    CurvePath path;
    std::vector<Matrix> transported;  // columns follow the requested frame
    std::vector<Matrix> fundamental;  // 2n x 2n, d(x, xdot)(tau) / d(x, xdot)(0)
};

struct FlowRequest {
    int steps = kDefaultSteps;
    Matrix transport;  // n x k frame to transport, may be empty
    bool variational = false;
};

Flow integrate_flow(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& v,
                    const FlowRequest& request);

CurvePath least_action_curve(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x,
                             const Eigen::Ref<const Vector>& v, int steps = kDefaultSteps);

/// exp^c_x(v) = gamma(1).
Vector c_exp(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& v,
             int steps = kDefaultSteps);

struct ShootingResult {
    Vector velocity;
    CurvePath path;
    int iterations = 0;
    double residual = 0.0;
};

/// Solves exp^c_x(v) = y by damped Newton. Throws ShootingError when Newton
/// fails or the endpoint map is singular at the solution.
ShootingResult shoot(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                     int steps = kDefaultSteps, std::optional<Vector> guess = std::nullopt);

/// Action of the least-action curve from x to y found by shooting.
double cost(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
            int steps = kDefaultSteps);

ParallelFrame parallel_transport(const CurvePath& path, const Eigen::Ref<const Vector>& u);

/// Threshold on cond(d gamma(1) / d xdot(0)) above which tau = 1 counts as conjugate.
inline constexpr double kConjugateCondition = 1e6;

/// Jacobi field along `path` with J(0) = u, J(1) = 0, by superposition of
/// fundamental solutions. Throws ConjugatePointError at a conjugate endpoint.
JacobiSolution jacobi_bvp(const CurvePath& path, const Eigen::Ref<const Vector>& u);

/// Same, reusing an already integrated flow with fundamental matrices.
JacobiSolution jacobi_bvp(const Flow& flow, const Eigen::Ref<const Vector>& u);

/// Linearization of the flow at a critical point of V in a flat chart:
/// modes of Hess V relative to g, with Hess V e = -mu^2 g e.
struct LinearizedModes {
    Matrix basis;  // g-orthonormal eigenvectors as columns
    Vector mu;

    /// sinh(mu tau)/mu, tending to tau.
    static double wbar(double mu, double tau);
    /// sinh(mu (1 - tau))/sinh(mu), tending to 1 - tau.
    static double utilde(double mu, double tau);
    /// Applies f(mu_k, tau) to the mode coefficients of a vector.
    template <typename F>
    Vector apply(const Matrix& g, const Vector& a, double tau, F f) const {
        Vector out = Vector::Zero(a.size());
        for (Eigen::Index k = 0; k < basis.cols(); ++k) out += f(mu(k), tau) * inner(g, basis.col(k), a) * basis.col(k);
        return out;
    }
};

/// Throws DomainError if Hess V has a positive eigenvalue (not a local max).
LinearizedModes linearized_modes(const GeometryJet& geo);

}  // namespace mtw
