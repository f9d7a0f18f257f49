#include "mtwcheck/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "mtwcheck/error.hpp"

namespace mtw {

struct ScalarField::Node {
    enum class Kind { Constant, Variable, Add, Sub, Mul, Neg, Pow, Exp, Sin, Cos };
    Kind kind;
    double value = 0.0;
    int index = 0;  // variable index or exponent
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using Node = ScalarField::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

NodePtr make(Kind kind, NodePtr lhs, NodePtr rhs = nullptr, int index = 0) {
    return std::make_shared<const Node>(Node{kind, 0.0, index, std::move(lhs), std::move(rhs)});
}

double evaluate(const Node& n, const Eigen::Ref<const Eigen::VectorXd>& x) {
    switch (n.kind) {
        case Kind::Constant: return n.value;
        case Kind::Variable: return x[n.index];
        case Kind::Add: return evaluate(*n.lhs, x) + evaluate(*n.rhs, x);
        case Kind::Sub: return evaluate(*n.lhs, x) - evaluate(*n.rhs, x);
        case Kind::Mul: return evaluate(*n.lhs, x) * evaluate(*n.rhs, x);
        case Kind::Neg: return -evaluate(*n.lhs, x);
        case Kind::Pow: {
            const double b = evaluate(*n.lhs, x);
            double r = 1.0;
            for (int k = 0; k < n.index; ++k) r *= b;
            return r;
        }
        case Kind::Exp: return std::exp(evaluate(*n.lhs, x));
        case Kind::Sin: return std::sin(evaluate(*n.lhs, x));
        case Kind::Cos: return std::cos(evaluate(*n.lhs, x));
    }
    return 0.0;
}

Jet evaluate_jet(const Node& n, const Eigen::Ref<const Eigen::VectorXd>& x, const JetSpacePtr& space, int order) {
    switch (n.kind) {
        case Kind::Constant: return Jet::constant(space, n.value, order);
        case Kind::Variable: return Jet::variable(space, n.index, x[n.index], order);
        case Kind::Add: return evaluate_jet(*n.lhs, x, space, order) + evaluate_jet(*n.rhs, x, space, order);
        case Kind::Sub: return evaluate_jet(*n.lhs, x, space, order) - evaluate_jet(*n.rhs, x, space, order);
        case Kind::Mul: {
            // Constant factors are common (coefficients); skip the convolution.
            if (n.lhs->kind == Kind::Constant) return evaluate_jet(*n.rhs, x, space, order) * n.lhs->value;
            if (n.rhs->kind == Kind::Constant) return evaluate_jet(*n.lhs, x, space, order) * n.rhs->value;
            return evaluate_jet(*n.lhs, x, space, order) * evaluate_jet(*n.rhs, x, space, order);
        }
        case Kind::Neg: return -evaluate_jet(*n.lhs, x, space, order);
        case Kind::Pow: return pow(evaluate_jet(*n.lhs, x, space, order), static_cast<unsigned>(n.index));
        case Kind::Exp: return exp(evaluate_jet(*n.lhs, x, space, order));
        case Kind::Sin: return sin(evaluate_jet(*n.lhs, x, space, order));
        case Kind::Cos: return cos(evaluate_jet(*n.lhs, x, space, order));
    }
    return Jet::constant(space, 0.0, order);
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // Round-trip precision sometimes prints noise; prefer the shortest exact form.
    for (int prec = 1; prec < 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            s = buf;
            break;
        }
    }
    return s;
}

std::string variable_name(int index, int dim) {
    static const char* short_names[] = {"x", "y", "z"};
    if (dim <= 3) return short_names[index];
    return "x" + std::to_string(index + 1);
}

std::string print(const Node& n, int dim) {
    switch (n.kind) {
        case Kind::Constant: {
            std::string s = format_number(n.value);
            return n.value < 0 ? "(" + s + ")" : s;
        }
        case Kind::Variable: return variable_name(n.index, dim);
        case Kind::Add: return "(" + print(*n.lhs, dim) + " + " + print(*n.rhs, dim) + ")";
        case Kind::Sub: return "(" + print(*n.lhs, dim) + " - " + print(*n.rhs, dim) + ")";
        case Kind::Mul: return "(" + print(*n.lhs, dim) + "*" + print(*n.rhs, dim) + ")";
        case Kind::Neg: return "(-" + print(*n.lhs, dim) + ")";
        case Kind::Pow: {
            std::string base = print(*n.lhs, dim);
            if (n.lhs->kind != Kind::Variable && base.front() != '(') base = "(" + base + ")";
            return base + "^" + std::to_string(n.index);
        }
        case Kind::Exp: return "exp(" + print(*n.lhs, dim) + ")";
        case Kind::Sin: return "sin(" + print(*n.lhs, dim) + ")";
        case Kind::Cos: return "cos(" + print(*n.lhs, dim) + ")";
    }
    return "0";
}

class Parser {
public:
    Parser(std::string_view text, int dim, const Constants& constants)
        : text_(text), dim_(dim), constants_(constants) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != text_.size()) fail("unexpected character");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what, ParseError::Kind kind = ParseError::Kind::Syntax) const {
        throw ParseError(kind, pos_, what);
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Kind::Add, lhs, term());
            else if (accept('-')) lhs = make(Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (accept('*')) lhs = make(Kind::Mul, lhs, factor());
        return lhs;
    }

    NodePtr factor() {
        NodePtr b = base();
        if (accept('^')) {
            skip();
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected non-negative integer exponent");
            int e = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, e);
            if (ec != std::errc{} || e > 64) {
                pos_ = start;
                fail("exponent out of range");
            }
            b = make(Kind::Pow, b, nullptr, e);
        }
        return b;
    }

    NodePtr base() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return make(Kind::Neg, base());
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto is_digit = [&](std::size_t i) { return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i])); };
        while (is_digit(pos_)) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (is_digit(pos_)) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (is_digit(p)) {
                pos_ = p;
                while (is_digit(pos_)) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc{} || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        auto n = std::make_shared<Node>(Node{Kind::Constant, v, 0, nullptr, nullptr});
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "exp" || name == "sin" || name == "cos") {
            if (!accept('(')) fail("expected '(' after function name");
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')'");
            const Kind k = name == "exp" ? Kind::Exp : name == "sin" ? Kind::Sin : Kind::Cos;
            return make(k, arg);
        }
        if (auto it = constants_.find(name); it != constants_.end()) {
            return std::make_shared<Node>(Node{Kind::Constant, it->second, 0, nullptr, nullptr});
        }
        int index = -1;
        if (name == "x") index = 0;
        else if (name == "y") index = 1;
        else if (name == "z") index = 2;
        else if (name.size() > 1 && name[0] == 'x') {
            int k = 0;
            auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
            if (ec == std::errc{} && ptr == name.data() + name.size() && k >= 1) index = k - 1;
        }
        if (index < 0) {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'", ParseError::Kind::UnknownIdentifier);
        }
        if (index >= dim_) {
            pos_ = start;
            fail("variable '" + std::string(name) + "' exceeds dimension " + std::to_string(dim_),
                 ParseError::Kind::DimensionMismatch);
        }
        return std::make_shared<Node>(Node{Kind::Variable, 0.0, index, nullptr, nullptr});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int dim_;
    const Constants& constants_;
};

void require_same_dim(const ScalarField& a, const ScalarField& b) {
    if (a.dim() != b.dim()) throw DomainError("scalar fields of different dimension");
}

}  // namespace

ScalarField ScalarField::constant(int dim, double value) {
    return {std::make_shared<Node>(Node{Kind::Constant, value, 0, nullptr, nullptr}), dim};
}

ScalarField ScalarField::variable(int dim, int index) {
    if (index < 0 || index >= dim) throw DomainError("variable index out of range");
    return {std::make_shared<Node>(Node{Kind::Variable, 0.0, index, nullptr, nullptr}), dim};
}

bool ScalarField::is_constant() const { return !root_ || root_->kind == Kind::Constant; }
bool ScalarField::is_zero() const { return !root_ || (root_->kind == Kind::Constant && root_->value == 0.0); }

double ScalarField::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (!root_) return 0.0;
    return evaluate(*root_, x);
}

Jet ScalarField::jet(const Eigen::Ref<const Eigen::VectorXd>& x, int order) const {
    return jet(x, JetSpace::get(dim_, order), order);
}

Jet ScalarField::jet(const Eigen::Ref<const Eigen::VectorXd>& x, const JetSpacePtr& space, int order) const {
    if (x.size() != dim_) throw DomainError("point dimension does not match field");
    if (!root_) return Jet::constant(space, 0.0, order);
    return evaluate_jet(*root_, x, space, order);
}

std::string ScalarField::to_string() const { return root_ ? print(*root_, dim_) : "0"; }

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_dim(a, b);
    return {make(Kind::Add, a.root_, b.root_), a.dim_};
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_dim(a, b);
    return {make(Kind::Sub, a.root_, b.root_), a.dim_};
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same_dim(a, b);
    return {make(Kind::Mul, a.root_, b.root_), a.dim_};
}

ScalarField operator-(const ScalarField& a) { return {make(Kind::Neg, a.root_), a.dim_}; }
ScalarField pow(const ScalarField& a, unsigned exponent) {
    return {make(Kind::Pow, a.root_, nullptr, static_cast<int>(exponent)), a.dim_};
}
ScalarField exp(const ScalarField& a) { return {make(Kind::Exp, a.root_), a.dim_}; }
ScalarField sin(const ScalarField& a) { return {make(Kind::Sin, a.root_), a.dim_}; }
ScalarField cos(const ScalarField& a) { return {make(Kind::Cos, a.root_), a.dim_}; }

ScalarField parse_field(std::string_view text, int dim, const Constants& constants) {
    if (dim <= 0) throw DomainError("field dimension must be positive");
    Parser parser(text, dim, constants);
    return ScalarField::from_node(parser.parse(), dim);
}

double eval_partial(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const int> alpha) {
    int order = 0;
    for (int a : alpha) order += a;
    if (order > kMaxPartialOrder) throw DomainError("derivative order exceeds supported maximum");
    return f.jet(x, order).partial(alpha);
}

double eval_partial_sequence(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                             std::span<const int> variables) {
    std::vector<int> alpha(static_cast<std::size_t>(f.dim()), 0);
    for (int v : variables) {
        if (v < 0 || v >= f.dim()) throw DomainError("variable index out of range");
        ++alpha[static_cast<std::size_t>(v)];
    }
    return eval_partial(f, x, alpha);
}

}  // namespace mtw
