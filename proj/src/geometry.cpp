#include "mtwcheck/geometry.hpp"

#include <cmath>

#include "mtwcheck/error.hpp"

namespace mtw {

namespace {

using JetArray = std::vector<Jet>;

std::size_t ipow(int n, int r) {
    std::size_t p = 1;
    for (int k = 0; k < r; ++k) p *= static_cast<std::size_t>(n);
    return p;
}

// Row-major flat index helpers: first index most significant.
std::size_t at2(int n, int i, int j) { return static_cast<std::size_t>(i * n + j); }
std::size_t at3(int n, int i, int j, int k) { return static_cast<std::size_t>((i * n + j) * n + k); }

// Product of jet matrices (row-major, n x n).
JetArray mat_mul(const JetArray& a, const JetArray& b, int n) {
    JetArray c;
    c.reserve(a.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Jet s = a[at2(n, i, 0)] * b[at2(n, 0, j)];
            for (int k = 1; k < n; ++k) s += a[at2(n, i, k)] * b[at2(n, k, j)];
            c.push_back(std::move(s));
        }
    }
    return c;
}

// Neumann series around the constant term G0: sum_k (-G0^{-1} N)^k G0^{-1}.
JetArray inverse_jets(const JetArray& g, const Matrix& g0_inv, int n, const JetSpacePtr& space, int order) {
    JetArray m;
    m.reserve(g.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Jet s(space, order);
            for (int k = 0; k < n; ++k) {
                Jet nk = g[at2(n, k, j)];
                nk[0] = 0.0;
                s += nk * (-g0_inv(i, k));
            }
            m.push_back(std::move(s));
        }
    }
    JetArray term;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) term.push_back(Jet::constant(space, g0_inv(i, j), order));
    JetArray sum = term;
    for (int k = 1; k <= order; ++k) {
        term = mat_mul(m, term, n);
        for (std::size_t e = 0; e < sum.size(); ++e) sum[e] += term[e];
    }
    return sum;
}

JetArray christoffel_jets(const JetArray& g, const JetArray& g_inv, int n) {
    std::vector<JetArray> dg(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m)
        for (const auto& e : g) dg[static_cast<std::size_t>(m)].push_back(e.derivative(m));
    JetArray gamma;
    gamma.reserve(ipow(n, 3));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Jet s;
                for (int l = 0; l < n; ++l) {
                    Jet first = dg[static_cast<std::size_t>(i)][at2(n, j, l)] + dg[static_cast<std::size_t>(j)][at2(n, i, l)] -
                                dg[static_cast<std::size_t>(l)][at2(n, i, j)];
                    Jet t = g_inv[at2(n, k, l)] * first;
                    if (l == 0) s = std::move(t);
                    else s += t;
                }
                gamma.push_back(s * 0.5);
            }
        }
    }
    return gamma;
}

// Lowered curvature R_ijkl = g_lm R^m_ijk with the sign convention of the header.
JetArray riemann_jets(const JetArray& gamma, const JetArray& g, int n) {
    std::vector<JetArray> dgamma(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m)
        for (const auto& e : gamma) dgamma[static_cast<std::size_t>(m)].push_back(e.derivative(m));
    JetArray upper;  // (m, i, j, k)
    upper.reserve(ipow(n, 4));
    for (int m = 0; m < n; ++m) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    Jet s = dgamma[static_cast<std::size_t>(i)][at3(n, m, j, k)] -
                            dgamma[static_cast<std::size_t>(j)][at3(n, m, i, k)];
                    for (int p = 0; p < n; ++p) {
                        s += gamma[at3(n, m, i, p)] * gamma[at3(n, p, j, k)];
                        s -= gamma[at3(n, m, j, p)] * gamma[at3(n, p, i, k)];
                    }
                    upper.push_back(-s);
                }
            }
        }
    }
    JetArray lowered;
    lowered.reserve(upper.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    Jet s = g[at2(n, l, 0)] * upper[static_cast<std::size_t>(((0 * n + i) * n + j) * n + k)];
                    for (int m = 1; m < n; ++m)
                        s += g[at2(n, l, m)] * upper[static_cast<std::size_t>(((m * n + i) * n + j) * n + k)];
                    lowered.push_back(std::move(s));
                }
            }
        }
    }
    return lowered;
}

// (nabla T)_{m i1..ir} = d_m T_{i1..ir} - sum_p Gamma^q_{m i_p} T_{..q..}.
JetArray covariant(const JetArray& t, int rank, const JetArray& gamma, int n) {
    const std::size_t block = ipow(n, rank);
    JetArray out;
    out.reserve(block * static_cast<std::size_t>(n));
    std::vector<int> idx(static_cast<std::size_t>(rank));
    for (int m = 0; m < n; ++m) {
        for (std::size_t flat = 0; flat < block; ++flat) {
            std::size_t rest = flat;
            for (int p = rank - 1; p >= 0; --p) {
                idx[static_cast<std::size_t>(p)] = static_cast<int>(rest % static_cast<std::size_t>(n));
                rest /= static_cast<std::size_t>(n);
            }
            Jet d = t[flat].derivative(m);
            for (int p = 0; p < rank; ++p) {
                const std::size_t stride = ipow(n, rank - 1 - p);
                const std::size_t base = flat - static_cast<std::size_t>(idx[static_cast<std::size_t>(p)]) * stride;
                for (int q = 0; q < n; ++q) {
                    const Jet& c = gamma[at3(n, q, m, idx[static_cast<std::size_t>(p)])];
                    if (c.value() == 0.0 && c.order() == 0) continue;
                    d -= c * t[base + static_cast<std::size_t>(q) * stride];
                }
            }
            out.push_back(std::move(d));
        }
    }
    return out;
}

template <int Rank>
TensorN<Rank> values(const JetArray& jets, int n) {
    TensorN<Rank> t;
    std::array<Eigen::Index, Rank> dims;
    dims.fill(n);
    t.resize(dims);
    std::array<Eigen::Index, Rank> idx{};
    for (std::size_t flat = 0; flat < jets.size(); ++flat) {
        std::size_t rest = flat;
        for (int p = Rank - 1; p >= 0; --p) {
            idx[static_cast<std::size_t>(p)] = static_cast<Eigen::Index>(rest % static_cast<std::size_t>(n));
            rest /= static_cast<std::size_t>(n);
        }
        t(idx) = jets[flat].value();
    }
    return t;
}

template <int Rank>
TensorN<Rank> zeros(int n) {
    TensorN<Rank> t;
    std::array<Eigen::Index, Rank> dims;
    dims.fill(n);
    t.resize(dims);
    t.setZero();
    return t;
}

Matrix matrix_values(const JetArray& jets, int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = jets[at2(n, i, j)].value();
    return m;
}

void check_positive_definite(const Matrix& g) {
    if (!g.allFinite()) throw DegenerateMetricError("metric is not finite");
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-10) throw DegenerateMetricError("metric is not positive definite");
}

JetArray metric_jets(const MetricField& metric, const Eigen::Ref<const Vector>& x, const JetSpacePtr& space, int order) {
    const int n = metric.dim();
    JetArray g;
    g.reserve(ipow(n, 2));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j < i) g.push_back(g[at2(n, j, i)]);
            else g.push_back(metric.entry(i, j).jet(x, space, order));
        }
    return g;
}

}  // namespace

MetricField::MetricField(std::vector<std::vector<ScalarField>> entries) : dim_(static_cast<int>(entries.size())) {
    if (dim_ == 0) throw DomainError("metric must have positive dimension");
    for (const auto& row : entries) {
        if (static_cast<int>(row.size()) != dim_) throw DomainError("metric must be square");
        for (const auto& e : row) {
            if (e.dim() != dim_) throw DomainError("metric entry dimension does not match metric size");
            entries_.push_back(e);
        }
    }
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j)
            if (entry(i, j).to_string() != entry(j, i).to_string())
                throw DomainError("metric entries (" + std::to_string(i) + "," + std::to_string(j) + ") are not symmetric");
}

MetricField MetricField::diagonal(std::vector<ScalarField> entries) {
    const int n = static_cast<int>(entries.size());
    std::vector<std::vector<ScalarField>> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rows[static_cast<std::size_t>(i)].push_back(i == j ? entries[static_cast<std::size_t>(i)]
                                                               : ScalarField::constant(n, 0.0));
    return MetricField(std::move(rows));
}

Matrix MetricField::operator()(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != dim_) throw DomainError("point dimension does not match metric");
    Matrix g(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) g(i, j) = g(j, i) = entry(i, j)(x);
    check_positive_definite(g);
    return g;
}

MetricField MetricField::scaled(double lambda) const {
    MetricField m = *this;
    for (auto& e : m.entries_) e = lambda * e;
    return m;
}

std::string MetricField::to_string() const {
    std::string s = "[";
    for (int i = 0; i < dim_; ++i) {
        s += i ? "; " : "";
        for (int j = 0; j < dim_; ++j) s += (j ? ", " : "") + entry(i, j).to_string();
    }
    return s + "]";
}

GeometryJet geometry_jet(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, int depth) {
    const int n = lagrangian.dim();
    if (depth < 1 || depth > kMaxPartialOrder) throw DomainError("geometry jet depth out of range");
    const auto space = JetSpace::get(n, depth);

    GeometryJet geo;
    geo.dim = n;
    geo.depth = depth;
    const JetArray g = metric_jets(lagrangian.metric, x, space, depth);
    geo.g = matrix_values(g, n);
    check_positive_definite(geo.g);
    geo.g_inv = geo.g.inverse();
    const JetArray g_inv = inverse_jets(g, geo.g_inv, n, space, depth);
    const JetArray gamma = christoffel_jets(g, g_inv, n);
    geo.christoffel = values<3>(gamma, n);

    if (depth >= 2) {
        const JetArray r = riemann_jets(gamma, g, n);
        geo.riemann = values<4>(r, n);
        if (depth >= 3) {
            const JetArray nr = covariant(r, 4, gamma, n);
            geo.nabla_riemann = values<5>(nr, n);
            if (depth >= 4) geo.nabla2_riemann = values<6>(covariant(nr, 5, gamma, n), n);
        }
    }

    geo.has_potential = !lagrangian.riemannian();
    geo.dV = Vector::Zero(n);
    geo.hess_V = Matrix::Zero(n, n);
    if (depth >= 3) geo.nabla3_V = zeros<3>(n);
    if (depth >= 4) geo.nabla4_V = zeros<4>(n);
    if (!geo.has_potential) return geo;

    const Jet v = lagrangian.potential.jet(x, space, depth);
    geo.potential = v.value();
    JetArray dv;
    for (int i = 0; i < n; ++i) dv.push_back(v.derivative(i));
    for (int i = 0; i < n; ++i) geo.dV(i) = dv[static_cast<std::size_t>(i)].value();
    if (depth >= 2) {
        const JetArray h = covariant(dv, 1, gamma, n);
        geo.hess_V = matrix_values(h, n);
        if (depth >= 3) {
            const JetArray h3 = covariant(h, 2, gamma, n);
            geo.nabla3_V = values<3>(h3, n);
            if (depth >= 4) geo.nabla4_V = values<4>(covariant(h3, 3, gamma, n), n);
        }
    }
    return geo;
}

ConnectionJet connection_jet(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x, bool with_derivatives) {
    const int n = lagrangian.dim();
    const int order = with_derivatives ? 2 : 1;
    const auto space = JetSpace::get(n, order);
    const JetArray g = metric_jets(lagrangian.metric, x, space, order);

    ConnectionJet c;
    c.g = matrix_values(g, n);
    check_positive_definite(c.g);
    const Matrix g0_inv = c.g.inverse();
    const JetArray g_inv = inverse_jets(g, g0_inv, n, space, order);
    const JetArray gamma = christoffel_jets(g, g_inv, n);
    c.christoffel = values<3>(gamma, n);
    if (with_derivatives) {
        c.d_christoffel = zeros<4>(n);
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) c.d_christoffel(m, k, i, j) = gamma[at3(n, k, i, j)].derivative(m).value();
    }

    c.force = Vector::Zero(n);
    c.d_force = Matrix::Zero(n, n);
    if (lagrangian.riemannian()) return c;
    const Jet v = lagrangian.potential.jet(x, space, order);
    c.potential = v.value();
    for (int k = 0; k < n; ++k) {
        Jet f;
        for (int l = 0; l < n; ++l) {
            Jet t = g_inv[at2(n, k, l)] * v.derivative(l);
            if (l == 0) f = std::move(t);
            else f += t;
        }
        f *= -1.0;
        c.force(k) = f.value();
        if (with_derivatives)
            for (int m = 0; m < n; ++m) c.d_force(k, m) = f.derivative(m).value();
    }
    return c;
}

TensorN<3> christoffel(const MetricField& metric, const Eigen::Ref<const Vector>& x) {
    return geometry_jet(Lagrangian(metric), x, 1).christoffel;
}

std::vector<Jet> christoffel_jets(const MetricField& metric, const Eigen::Ref<const Vector>& x, int order) {
    const int n = metric.dim();
    const int depth = order + 1;
    const auto space = JetSpace::get(n, depth);
    const JetArray g = metric_jets(metric, x, space, depth);
    const Matrix g0 = matrix_values(g, n);
    check_positive_definite(g0);
    return christoffel_jets(g, inverse_jets(g, g0.inverse(), n, space, depth), n);
}

TensorN<4> riemann(const MetricField& metric, const Eigen::Ref<const Vector>& x) {
    return geometry_jet(Lagrangian(metric), x, 2).riemann;
}

double sectional(const GeometryJet& geo, const Vector& u, const Vector& w) {
    const double area = wedge_norm2(geo.g, u, w);
    if (area <= 1e-12 * inner(geo.g, u, u) * inner(geo.g, w, w) || area <= 0.0) throw DomainError("sectional curvature of a degenerate plane");
    return riemann_form(geo.riemann, w, u, w, u) / area;
}

double fourth_contraction(const GeometryJet& geo, const Vector& w, const Vector& u) {
    if (geo.depth < 4) throw DomainError("geometry jet too shallow for nabla^4 V");
    return contract(geo.nabla4_V, w, w, u, u);
}

Matrix gram_schmidt(const Matrix& g, const Matrix& vectors) {
    Matrix e = vectors;
    for (Eigen::Index k = 0; k < e.cols(); ++k) {
        for (Eigen::Index j = 0; j < k; ++j) e.col(k) -= inner(g, e.col(k), e.col(j)) * e.col(j);
        const double norm = std::sqrt(inner(g, e.col(k), e.col(k)));
        if (norm < 1e-14) throw DomainError("vectors are linearly dependent");
        e.col(k) /= norm;
    }
    return e;
}

MetricField euclidean_metric(int n) {
    std::vector<ScalarField> d(static_cast<std::size_t>(n), ScalarField::constant(n, 1.0));
    return MetricField::diagonal(std::move(d));
}

MetricField sphere_metric() {
    return MetricField::diagonal({ScalarField::constant(2, 1.0), pow(sin(ScalarField::variable(2, 0)), 2)});
}

ScalarField quartic_potential(const Matrix& a) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n) throw DomainError("quartic potential needs a square matrix");
    ScalarField q = ScalarField::constant(n, 0.0);
    bool first = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (a(i, j) == 0.0) continue;
            ScalarField t = a(i, j) * (ScalarField::variable(n, i) * ScalarField::variable(n, j));
            q = first ? t : q + t;
            first = false;
        }
    }
    return -pow(q, 2);
}

}  // namespace mtw
