#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <unsupported/Eigen/CXX11/Tensor>
#include <vector>

#include "mtwcheck/expr.hpp"

namespace mtw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
template <int Rank>
using TensorN = Eigen::Tensor<double, Rank>;

/// Symmetric matrix of scalar fields g_ij(x). Positive definiteness is checked
/// pointwise on evaluation.
class MetricField {
public:
    MetricField() = default;
    explicit MetricField(std::vector<std::vector<ScalarField>> entries);
    static MetricField diagonal(std::vector<ScalarField> entries);

    int dim() const noexcept { return dim_; }
    const ScalarField& entry(int i, int j) const { return entries_[static_cast<std::size_t>(i * dim_ + j)]; }
    /// g(x); throws DegenerateMetricError if not positive definite there.
    Matrix operator()(const Eigen::Ref<const Vector>& x) const;
    MetricField scaled(double lambda) const;
    std::string to_string() const;

private:
    int dim_ = 0;
    std::vector<ScalarField> entries_;
};

/// Mechanical Lagrangian L(x, v) = |v|_g^2 / 2 - V(x). A zero potential gives
/// the Riemannian case.
struct Lagrangian {
    MetricField metric;
    ScalarField potential;

    Lagrangian() = default;
    explicit Lagrangian(MetricField m) : metric(std::move(m)), potential(ScalarField::constant(metric.dim(), 0.0)) {}
    Lagrangian(MetricField m, ScalarField v) : metric(std::move(m)), potential(std::move(v)) {}

    int dim() const noexcept { return metric.dim(); }
    bool riemannian() const { return potential.is_zero(); }
};

/// Pointwise geometric data of a Lagrangian, from exact Taylor jets.
/// Index layouts:
///   christoffel(k, i, j)            = Gamma^k_ij
///   riemann(i, j, k, l)             = <R(d_i, d_j) d_k, d_l>, with
///                                     R(X,Y)Z = nabla_Y nabla_X Z - nabla_X nabla_Y Z + nabla_[X,Y] Z
///   nabla_riemann(m, i, j, k, l)    = (nabla_m R)_ijkl
///   nabla2_riemann(a, b, i, j, k, l)= (nabla_a nabla_b R)_ijkl
///   nabla4_V(a, b, c, d)            = (nabla_a nabla_b nabla_c nabla_d V), outermost first
/// Tensors beyond the requested depth are left empty.
struct GeometryJet {
    int dim = 0;
    int depth = 0;
    Matrix g;
    Matrix g_inv;
    TensorN<3> christoffel;
    TensorN<4> riemann;
    TensorN<5> nabla_riemann;
    TensorN<6> nabla2_riemann;
    bool has_potential = false;
    double potential = 0.0;
    Vector dV;
    Matrix hess_V;
    TensorN<3> nabla3_V;
    TensorN<4> nabla4_V;
};

/// depth is the Taylor order of the metric jet: 2 gives curvature, 4 gives
/// the second covariant derivative of curvature and nabla^4 V.
GeometryJet geometry_jet(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, int depth = 4);

/// Connection and force data driving the coordinate flow.
struct ConnectionJet {
    Matrix g;
    TensorN<3> christoffel;  // (k, i, j)
    TensorN<4> d_christoffel;  // (m, k, i, j) = d_m Gamma^k_ij
    Vector force;  // -g^{-1} dV
    Matrix d_force;  // (k, m) = d_m force^k
    double potential = 0.0;
};

ConnectionJet connection_jet(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, bool with_derivatives);

TensorN<3> christoffel(const MetricField& metric, const Eigen::Ref<const Vector>& x);

/// Taylor jets of Gamma^k_ij around x to the given order, flattened row-major in (k, i, j).
std::vector<Jet> christoffel_jets(const MetricField& metric, const Eigen::Ref<const Vector>& x, int order);
TensorN<4> riemann(const MetricField& metric, const Eigen::Ref<const Vector>& x);

/// Full contraction T(v1, ..., vr) over all slots.
template <typename Scalar, int Rank, typename... Vecs>
Scalar contract(const Eigen::Tensor<Scalar, Rank>& t, const Vecs&... vecs) {
    static_assert(sizeof...(Vecs) == Rank, "one vector per tensor slot");
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const std::array<V, Rank> v{V(vecs)...};
    const Eigen::Index n = t.dimension(0);
    Scalar sum(0);
    std::array<Eigen::Index, Rank> idx{};
    for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
        Scalar term = t.data()[flat];
        if (term == Scalar(0)) continue;
        Eigen::Index rest = flat;
        for (int r = 0; r < Rank; ++r) {
            idx[static_cast<std::size_t>(r)] = rest % n;
            rest /= n;
            term *= v[static_cast<std::size_t>(r)](idx[static_cast<std::size_t>(r)]);
        }
        sum += term;
    }
    return sum;
}

/// Contraction over all slots but the last, giving a covector.
template <typename Scalar, int Rank, typename... Vecs>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> contract_partial(const Eigen::Tensor<Scalar, Rank>& t, const Vecs&... vecs) {
    static_assert(sizeof...(Vecs) == Rank - 1, "leave the last slot open");
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const std::array<V, Rank - 1> v{V(vecs)...};
    const Eigen::Index n = t.dimension(0);
    V out = V::Zero(n);
    for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
        Scalar term = t.data()[flat];
        if (term == Scalar(0)) continue;
        Eigen::Index rest = flat;
        for (int r = 0; r < Rank - 1; ++r) {
            term *= v[static_cast<std::size_t>(r)](rest % n);
            rest /= n;
        }
        out(rest) += term;
    }
    return out;
}

inline double inner(const Matrix& g, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    return a.dot(g * b);
}

/// |a ^ b|^2 = |a|^2 |b|^2 - <a, b>^2.
inline double wedge_norm2(const Matrix& g, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    const double ab = inner(g, a, b);
    return inner(g, a, a) * inner(g, b, b) - ab * ab;
}

/// <R(a,b)c, d>.
inline double riemann_form(const TensorN<4>& r, const Vector& a, const Vector& b, const Vector& c, const Vector& d) {
    return contract(r, a, b, c, d);
}

/// R(a,b)c as a vector.
inline Vector riemann_apply(const TensorN<4>& r, const Matrix& g_inv, const Vector& a, const Vector& b, const Vector& c) {
    return g_inv * contract_partial(r, a, b, c);
}

inline double nabla_riemann_form(const TensorN<5>& nr, const Vector& m, const Vector& a, const Vector& b,
                                 const Vector& c, const Vector& d) {
    return contract(nr, m, a, b, c, d);
}

inline double nabla2_riemann_form(const TensorN<6>& n2r, const Vector& p, const Vector& q, const Vector& a,
                                  const Vector& b, const Vector& c, const Vector& d) {
    return contract(n2r, p, q, a, b, c, d);
}

/// Sectional curvature of span{u, w}: <R(w,u)w,u> / |u ^ w|^2.
double sectional(const GeometryJet& geo, const Vector& u, const Vector& w);

/// nabla^4 V(w, w, u, u).
double fourth_contraction(const GeometryJet& geo, const Vector& w, const Vector& u);

/// g-orthonormalization of the columns of `vectors`, in order.
Matrix gram_schmidt(const Matrix& g, const Matrix& vectors);

MetricField euclidean_metric(int n);
/// Round unit sphere in (colatitude-like) chart: diag(1, sin(x)^2).
MetricField sphere_metric();
/// V(x) = -<A x, x>^2.
ScalarField quartic_potential(const Matrix& a);

}  // namespace mtw
