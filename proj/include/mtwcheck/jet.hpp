#pragma once

#include <memory>
#include <span>
#include <vector>

namespace mtw {

/// Graded monomial basis for Taylor polynomials in `dim` variables truncated
/// at total degree `order`. Instances are interned and shared by all jets of
/// the same shape.
class JetSpace {
public:
    struct Product {
        int lhs;
        int rhs;
        int out;
    };

    static std::shared_ptr<const JetSpace> get(int dim, int order);

    int dim() const noexcept { return dim_; }
    int order() const noexcept { return order_; }
    int size() const noexcept { return static_cast<int>(degree_.size()); }
    /// Number of monomials of total degree <= d.
    int count_upto(int d) const noexcept { return count_upto_[static_cast<std::size_t>(d)]; }
    int degree(int k) const noexcept { return degree_[static_cast<std::size_t>(k)]; }
    std::span<const int> exponents(int k) const {
        return {exponents_.data() + static_cast<std::size_t>(k) * dim_, static_cast<std::size_t>(dim_)};
    }
    /// alpha! for monomial k.
    double factorial(int k) const noexcept { return factorial_[static_cast<std::size_t>(k)]; }
    /// Index of x^alpha, or -1 when |alpha| exceeds the order.
    int index_of(std::span<const int> alpha) const;
    /// Index of alpha_k + e_var, or -1.
    int raised(int k, int var) const noexcept { return raised_[static_cast<std::size_t>(k * dim_ + var)]; }
    /// Index of alpha_k - e_var, or -1 when alpha_k[var] == 0.
    int lowered(int k, int var) const noexcept { return lowered_[static_cast<std::size_t>(k * dim_ + var)]; }
    /// All (lhs, rhs, out) with deg(out) <= d, ordered by output degree.
    std::span<const Product> products_upto(int d) const {
        return {products_.data(), static_cast<std::size_t>(product_count_upto_[static_cast<std::size_t>(d)])};
    }

    JetSpace(int dim, int order);

private:
    int dim_;
    int order_;
    std::vector<int> exponents_;
    std::vector<int> degree_;
    std::vector<int> count_upto_;
    std::vector<double> factorial_;
    std::vector<int> raised_;
    std::vector<int> lowered_;
    std::vector<Product> products_;
    std::vector<int> product_count_upto_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

/// Truncated multivariate Taylor polynomial (forward-mode jet) around a point.
/// Coefficients are Taylor coefficients c_alpha, so the partial derivative
/// d^alpha f equals alpha! * c_alpha. A jet carries its own valid order, which
/// may be lower than the order of its space after differentiation.
class Jet {
public:
    Jet() = default;
    Jet(JetSpacePtr space, int order);

    static Jet constant(JetSpacePtr space, double value, int order);
    static Jet variable(JetSpacePtr space, int var, double value, int order);

    const JetSpace& space() const noexcept { return *space_; }
    const JetSpacePtr& space_ptr() const noexcept { return space_; }
    int order() const noexcept { return order_; }
    double value() const noexcept { return coeffs_[0]; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }

    /// alpha! * c_alpha; throws if |alpha| exceeds this jet's order.
    double partial(std::span<const int> alpha) const;
    Jet derivative(int var) const;
    Jet truncated(int order) const;

    Jet& operator+=(const Jet& other);
    Jet& operator-=(const Jet& other);
    Jet& operator*=(double s);
    Jet& operator+=(double s) {
        coeffs_[0] += s;
        return *this;
    }

    friend Jet operator*(const Jet& a, const Jet& b);

private:
    JetSpacePtr space_;
    int order_ = 0;
    std::vector<double> coeffs_;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator+(Jet a, double s) { return a += s; }

Jet exp(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow(const Jet& a, unsigned exponent);

/// Taylor composition f(p + delta): `outer` is a jet of f at p, `inner[i]` are
/// jets (in another space) of the displacement of coordinate i. Constant terms
/// of `inner` are ignored.
Jet compose(const Jet& outer, std::span<const Jet> inner);

}  // namespace mtw
