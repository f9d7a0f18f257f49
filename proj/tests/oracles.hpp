#pragma once

// Reference computations used by the tests. They rely only on plain
// evaluation and finite differences, never on the jet machinery.

#include <array>
#include <functional>
#include <random>

#include "mtwcheck/geometry.hpp"

namespace oracle {

using mtw::Matrix;
using mtw::Vector;

/// Richardson-extrapolated central difference of f along direction e.
inline double directional(const std::function<double(const Vector&)>& f, const Vector& x, const Vector& e, double h) {
    auto central = [&](double s) { return (f(x + s * e) - f(x - s * e)) / (2 * s); };
    return (4 * central(h / 2) - central(h)) / 3;
}

/// Mixed derivative d^2/da^2 d^2/db^2 of f(x + a p + b q) at 0, from 5-point
/// stencils in both variables. Exact up to rounding on quartic polynomials.
inline double mixed_fourth(const std::function<double(const Vector&)>& f, const Vector& x, const Vector& p,
                           const Vector& q, double h) {
    constexpr std::array<double, 5> d2{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    double sum = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) sum += d2[i] * d2[j] * f(x + (i - 2) * h * p + (j - 2) * h * q);
    return sum / (h * h * h * h);
}

/// Christoffel symbols Gamma^k_ij from central differences of g.
inline mtw::TensorN<3> christoffel(const mtw::MetricField& m, const Vector& x, double h = 1e-4) {
    const auto n = x.size();
    std::vector<Matrix> dg(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const Vector e = Vector::Unit(n, l);
        dg[l] = (8 * (m(x + h * e) - m(x - h * e)) - (m(x + 2 * h * e) - m(x - 2 * h * e))) / (12 * h);
    }
    const Matrix g_inv = m(x).inverse();
    mtw::TensorN<3> gamma(n, n, n);
    gamma.setZero();
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index l = 0; l < n; ++l)
                    gamma(k, i, j) += 0.5 * g_inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
    return gamma;
}

/// <R(d_i, d_j) d_k, d_l> with R(X,Y)Z = nabla_Y nabla_X Z - nabla_X nabla_Y Z + nabla_[X,Y] Z,
/// from finite differences of the finite-difference Christoffel symbols.
inline mtw::TensorN<4> riemann(const mtw::MetricField& m, const Vector& x, double h = 1e-3) {
    const auto n = x.size();
    const mtw::TensorN<3> gamma = oracle::christoffel(m, x);
    std::vector<mtw::TensorN<3>> dgamma;
    for (Eigen::Index a = 0; a < n; ++a) {
        const Vector e = Vector::Unit(n, a);
        mtw::TensorN<3> d = (oracle::christoffel(m, Vector(x + h * e)) - oracle::christoffel(m, Vector(x - h * e))) * (1.0 / (2 * h));
        dgamma.push_back(d);
    }
    const Matrix g = m(x);
    mtw::TensorN<4> upper(n, n, n, n);  // (p, i, j, k) = R^p_ijk, R(d_i, d_j) d_k = R^p_ijk d_p
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index k = 0; k < n; ++k) {
                    // nabla_j nabla_i d_k - nabla_i nabla_j d_k
                    double s = dgamma[j](p, i, k) - dgamma[i](p, j, k);
                    for (Eigen::Index q = 0; q < n; ++q) s += gamma(p, j, q) * gamma(q, i, k) - gamma(p, i, q) * gamma(q, j, k);
                    upper(p, i, j, k) = s;
                }
    mtw::TensorN<4> lowered(n, n, n, n);
    lowered.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index l = 0; l < n; ++l)
                    for (Eigen::Index p = 0; p < n; ++p) lowered(i, j, k, l) += g(l, p) * upper(p, i, j, k);
    return lowered;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

inline double max_abs(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

template <int Rank>
double max_abs(const mtw::TensorN<Rank>& t) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t.data()[i]));
    return m;
}

}  // namespace oracle
