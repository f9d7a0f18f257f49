#include "mtwcheck/jet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "mtwcheck/error.hpp"

namespace mtw {

namespace {

void enumerate(int dim, int degree, int var, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (var == dim - 1) {
        current[static_cast<std::size_t>(var)] = degree;
        out.push_back(current);
        return;
    }
    for (int a = degree; a >= 0; --a) {
        current[static_cast<std::size_t>(var)] = a;
        enumerate(dim, degree - a, var + 1, current, out);
    }
}

}  // namespace

JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
    if (dim <= 0 || order < 0) throw DomainError("invalid jet space shape");
    std::vector<std::vector<int>> monomials;
    std::vector<int> current(static_cast<std::size_t>(dim), 0);
    count_upto_.resize(static_cast<std::size_t>(order) + 1);
    for (int d = 0; d <= order; ++d) {
        enumerate(dim, d, 0, current, monomials);
        count_upto_[static_cast<std::size_t>(d)] = static_cast<int>(monomials.size());
    }
    std::map<std::vector<int>, int> lookup;
    for (std::size_t k = 0; k < monomials.size(); ++k) {
        lookup[monomials[k]] = static_cast<int>(k);
        int deg = 0;
        double fact = 1.0;
        for (int a : monomials[k]) {
            exponents_.push_back(a);
            deg += a;
            for (int q = 2; q <= a; ++q) fact *= q;
        }
        degree_.push_back(deg);
        factorial_.push_back(fact);
    }
    raised_.assign(monomials.size() * static_cast<std::size_t>(dim), -1);
    lowered_.assign(monomials.size() * static_cast<std::size_t>(dim), -1);
    for (std::size_t k = 0; k < monomials.size(); ++k) {
        for (int i = 0; i < dim; ++i) {
            auto up = monomials[k];
            ++up[static_cast<std::size_t>(i)];
            if (auto it = lookup.find(up); it != lookup.end()) raised_[k * dim + i] = it->second;
            if (monomials[k][static_cast<std::size_t>(i)] > 0) {
                auto down = monomials[k];
                --down[static_cast<std::size_t>(i)];
                lowered_[k * dim + i] = lookup.at(down);
            }
        }
    }
    // Products grouped by output degree so that truncation is a prefix.
    std::vector<std::vector<Product>> by_degree(static_cast<std::size_t>(order) + 1);
    for (std::size_t a = 0; a < monomials.size(); ++a) {
        for (std::size_t b = 0; b < monomials.size(); ++b) {
            if (degree_[a] + degree_[b] > order) continue;
            std::vector<int> sum(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i) sum[i] = monomials[a][i] + monomials[b][i];
            by_degree[static_cast<std::size_t>(degree_[a] + degree_[b])].push_back(
                {static_cast<int>(a), static_cast<int>(b), lookup.at(sum)});
        }
    }
    for (auto& group : by_degree) {
        products_.insert(products_.end(), group.begin(), group.end());
        product_count_upto_.push_back(static_cast<int>(products_.size()));
    }
}

std::shared_ptr<const JetSpace> JetSpace::get(int dim, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, order}];
    if (!slot) slot = std::make_shared<const JetSpace>(dim, order);
    return slot;
}

int JetSpace::index_of(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != dim_) throw DomainError("multi-index dimension mismatch");
    int deg = 0;
    for (int a : alpha) {
        if (a < 0) throw DomainError("negative multi-index entry");
        deg += a;
    }
    if (deg > order_) return -1;
    for (int k = deg == 0 ? 0 : count_upto(deg - 1); k < count_upto(deg); ++k) {
        if (std::equal(alpha.begin(), alpha.end(), exponents(k).begin())) return k;
    }
    return -1;
}

Jet::Jet(JetSpacePtr space, int order) : space_(std::move(space)), order_(order) {
    assert(order_ <= space_->order());
    coeffs_.assign(static_cast<std::size_t>(space_->count_upto(order_)), 0.0);
}

Jet Jet::constant(JetSpacePtr space, double value, int order) {
    Jet j(std::move(space), order);
    j.coeffs_[0] = value;
    return j;
}

Jet Jet::variable(JetSpacePtr space, int var, double value, int order) {
    Jet j(std::move(space), order);
    j.coeffs_[0] = value;
    if (order >= 1) j.coeffs_[static_cast<std::size_t>(j.space_->raised(0, var))] = 1.0;
    return j;
}

double Jet::partial(std::span<const int> alpha) const {
    int k = space_->index_of(alpha);
    if (k < 0 || space_->degree(k) > order_) throw DomainError("derivative order exceeds jet order");
    return space_->factorial(k) * coeffs_[static_cast<std::size_t>(k)];
}

Jet Jet::derivative(int var) const {
    if (order_ == 0) throw DomainError("cannot differentiate an order-0 jet");
    Jet d(space_, order_ - 1);
    const auto& sp = *space_;
    for (int k = 0; k < sp.count_upto(order_ - 1); ++k) {
        int up = sp.raised(k, var);
        d.coeffs_[static_cast<std::size_t>(k)] =
            (sp.exponents(k)[static_cast<std::size_t>(var)] + 1) * coeffs_[static_cast<std::size_t>(up)];
    }
    return d;
}

Jet Jet::truncated(int order) const {
    if (order >= order_) return *this;
    Jet t(space_, order);
    std::copy_n(coeffs_.begin(), t.coeffs_.size(), t.coeffs_.begin());
    return t;
}

Jet& Jet::operator+=(const Jet& other) {
    if (other.order_ < order_) {
        order_ = other.order_;
        coeffs_.resize(other.coeffs_.size());
    }
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& other) {
    if (other.order_ < order_) {
        order_ = other.order_;
        coeffs_.resize(other.coeffs_.size());
    }
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    const int order = std::min(a.order_, b.order_);
    Jet r(a.space_, order);
    const double* ac = a.coeffs_.data();
    const double* bc = b.coeffs_.data();
    double* rc = r.coeffs_.data();
    for (const auto& p : a.space_->products_upto(order)) rc[p.out] += ac[p.lhs] * bc[p.rhs];
    return r;
}

namespace {

// sum_k weights[k] * h^k for a jet h with zero constant term.
Jet power_series(const Jet& h, std::span<const double> weights) {
    Jet result = Jet::constant(h.space_ptr(), weights[0], h.order());
    Jet power = Jet::constant(h.space_ptr(), 1.0, h.order());
    for (std::size_t k = 1; k < weights.size() && static_cast<int>(k) <= h.order(); ++k) {
        power = power * h;
        if (weights[k] != 0.0) result += power * weights[k];
    }
    return result;
}

Jet nonconstant_part(const Jet& a) {
    Jet h = a;
    h[0] = 0.0;
    return h;
}

}  // namespace

Jet exp(const Jet& a) {
    std::vector<double> w(static_cast<std::size_t>(a.order()) + 1);
    double f = 1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k > 0) f *= static_cast<double>(k);
        w[k] = 1.0 / f;
    }
    return power_series(nonconstant_part(a), w) * std::exp(a.value());
}

namespace {

// Series of cos(h) and sin(h) for h with zero constant term.
std::pair<Jet, Jet> trig_series(const Jet& h) {
    std::vector<double> c(static_cast<std::size_t>(h.order()) + 1, 0.0);
    std::vector<double> s(c.size(), 0.0);
    double f = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k > 0) f *= static_cast<double>(k);
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        (k % 2 == 0 ? c : s)[k] = sign / f;
    }
    return {power_series(h, c), power_series(h, s)};
}

}  // namespace

Jet sin(const Jet& a) {
    auto [ch, sh] = trig_series(nonconstant_part(a));
    return ch * std::sin(a.value()) + sh * std::cos(a.value());
}

Jet cos(const Jet& a) {
    auto [ch, sh] = trig_series(nonconstant_part(a));
    return ch * std::cos(a.value()) - sh * std::sin(a.value());
}

Jet pow(const Jet& a, unsigned exponent) {
    Jet result = Jet::constant(a.space_ptr(), 1.0, a.order());
    Jet base = a;
    while (exponent > 0) {
        if (exponent & 1u) result = result * base;
        exponent >>= 1u;
        if (exponent > 0) base = base * base;
    }
    return result;
}

Jet compose(const Jet& outer, std::span<const Jet> inner) {
    const JetSpace& osp = outer.space();
    if (static_cast<int>(inner.size()) != osp.dim()) throw DomainError("composition arity mismatch");
    if (inner.empty()) throw DomainError("empty composition");
    const auto& target = inner.front().space_ptr();
    int order = outer.order();
    for (const auto& j : inner) order = std::min(order, j.order());

    std::vector<Jet> deltas;
    deltas.reserve(inner.size());
    for (const auto& j : inner) deltas.push_back(nonconstant_part(j.truncated(order)));

    // Monomials of the displacement, built in graded order from a lower one.
    const int terms = osp.count_upto(std::min(order, outer.order()));
    std::vector<Jet> monomial(static_cast<std::size_t>(terms));
    monomial[0] = Jet::constant(target, 1.0, order);
    Jet result = Jet::constant(target, outer[0], order);
    for (int k = 1; k < terms; ++k) {
        int var = 0;
        while (osp.lowered(k, var) < 0) ++var;
        monomial[static_cast<std::size_t>(k)] = monomial[static_cast<std::size_t>(osp.lowered(k, var))] * deltas[static_cast<std::size_t>(var)];
        if (outer[k] != 0.0) result += monomial[static_cast<std::size_t>(k)] * outer[k];
    }
    return result;
}

}  // namespace mtw
