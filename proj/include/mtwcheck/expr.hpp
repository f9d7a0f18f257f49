#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "mtwcheck/jet.hpp"

namespace mtw {

/// Highest total derivative order eval_partial accepts.
inline constexpr int kMaxPartialOrder = 6;

using Constants = std::map<std::string, double, std::less<>>;

/// Closed-form scalar field on an n-dimensional chart. Built from constants,
/// chart variables, +, -, *, non-negative integer powers, exp, sin and cos.
/// Immutable; copies share the expression tree.
class ScalarField {
public:
    ScalarField() = default;

    static ScalarField constant(int dim, double value);
    static ScalarField variable(int dim, int index);

    int dim() const noexcept { return dim_; }
    bool is_constant() const;
    /// True when the tree is the literal constant 0.
    bool is_zero() const;

    double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// Taylor jet of the field at x up to `order`.
    Jet jet(const Eigen::Ref<const Eigen::VectorXd>& x, int order) const;
    Jet jet(const Eigen::Ref<const Eigen::VectorXd>& x, const JetSpacePtr& space, int order) const;

    /// Parseable canonical text; constants are printed with round-trip precision.
    std::string to_string() const;
    std::size_t hash() const { return std::hash<std::string>{}(to_string()); }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a);
    friend ScalarField pow(const ScalarField& a, unsigned exponent);
    friend ScalarField exp(const ScalarField& a);
    friend ScalarField sin(const ScalarField& a);
    friend ScalarField cos(const ScalarField& a);

    struct Node;
    static ScalarField from_node(std::shared_ptr<const Node> root, int dim) { return {std::move(root), dim}; }

private:
    ScalarField(std::shared_ptr<const Node> root, int dim) : root_(std::move(root)), dim_(dim) {}

    std::shared_ptr<const Node> root_;
    int dim_ = 0;
};

inline ScalarField operator*(double s, const ScalarField& f) { return ScalarField::constant(f.dim(), s) * f; }
inline ScalarField operator+(const ScalarField& f, double s) { return f + ScalarField::constant(f.dim(), s); }

/// Parses `text` with the grammar
///   expr := term (('+'|'-') term)*;  term := factor ('*' factor)*;
///   factor := base ('^' uint)?;      base := number | ident | '(' expr ')' | func '(' expr ')' | '-' base
/// Identifiers are chart variables (x, y, z or x1..xn) or names bound in `constants`.
ScalarField parse_field(std::string_view text, int dim, const Constants& constants = {});

/// Exact partial derivative d^alpha f(x); alpha holds per-variable counts.
double eval_partial(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const int> alpha);

/// Same as eval_partial, with the derivative given as a sequence of variable indices.
double eval_partial_sequence(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                             std::span<const int> variables);

}  // namespace mtw
