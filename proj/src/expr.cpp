#include "starcalc/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <system_error>

namespace starcalc::expr {

struct Expression::Node {
    Kind kind;
    double value;
    std::vector<Expression> children;
};

namespace {

std::size_t expected_arity(Kind kind) noexcept {
    switch (kind) {
    case Kind::Constant:
    case Kind::Variable:
        return 0;
    case Kind::Exp:
    case Kind::Log:
    case Kind::Sqrt:
    case Kind::Neg:
        return 1;
    default:
        return 2;
    }
}

} // namespace

std::string_view kind_name(Kind kind) noexcept {
    switch (kind) {
    case Kind::Constant: return "Constant";
    case Kind::Variable: return "Variable";
    case Kind::Add: return "Add";
    case Kind::Sub: return "Sub";
    case Kind::Mul: return "Mul";
    case Kind::Div: return "Div";
    case Kind::Pow: return "Pow";
    case Kind::Exp: return "Exp";
    case Kind::Log: return "Log";
    case Kind::Sqrt: return "Sqrt";
    case Kind::Neg: return "Neg";
    }
    return "?";
}

std::string_view reason_name(DomainReason reason) noexcept {
    switch (reason) {
    case DomainReason::LogNonPositive: return "LogNonPositive";
    case DomainReason::DivByZero: return "DivByZero";
    case DomainReason::PowIndeterminate: return "PowIndeterminate";
    case DomainReason::SqrtNegative: return "SqrtNegative";
    }
    return "?";
}

EvalDomainError::EvalDomainError(Kind node, double x, DomainReason reason)
    : DomainError(std::string(reason_name(reason)) + " in " + std::string(kind_name(node)) +
                  " at x = " + std::to_string(x)),
      node_(node), x_(x), reason_(reason) {}

Expression::Expression() {
    static const auto zero = std::make_shared<const Node>(Node{Kind::Constant, 0.0, {}});
    node_ = zero;
}

Kind Expression::kind() const noexcept { return node_->kind; }
double Expression::value() const noexcept { return node_->value; }
std::size_t Expression::arity() const noexcept { return node_->children.size(); }

const Expression& Expression::child(std::size_t i) const {
    if (i >= node_->children.size())
        throw std::out_of_range("expression child index out of range");
    return node_->children[i];
}

Expression Expression::make(Kind kind, std::vector<Expression> children, double value) {
    if (children.size() != expected_arity(kind))
        throw std::invalid_argument("arity mismatch for " + std::string(kind_name(kind)));
    if (kind == Kind::Constant && !std::isfinite(value))
        throw std::invalid_argument("constant must be finite");
    if (kind != Kind::Constant)
        value = 0.0;
    return Expression(std::make_shared<const Node>(Node{kind, value, std::move(children)}));
}

bool operator==(const Expression& a, const Expression& b) noexcept {
    if (a.node_ == b.node_)
        return true;
    if (a.kind() != b.kind() || a.value() != b.value() || a.arity() != b.arity())
        return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.node_->children[i] != b.node_->children[i])
            return false;
    return true;
}

Expression constant(double v) { return Expression::make(Kind::Constant, {}, v); }

Expression variable() {
    static const Expression x = Expression::make(Kind::Variable, {});
    return x;
}

Expression add(Expression a, Expression b) { return Expression::make(Kind::Add, {std::move(a), std::move(b)}); }
Expression sub(Expression a, Expression b) { return Expression::make(Kind::Sub, {std::move(a), std::move(b)}); }
Expression mul(Expression a, Expression b) { return Expression::make(Kind::Mul, {std::move(a), std::move(b)}); }
Expression div(Expression a, Expression b) { return Expression::make(Kind::Div, {std::move(a), std::move(b)}); }
Expression exp(Expression u) { return Expression::make(Kind::Exp, {std::move(u)}); }
Expression log(Expression u) { return Expression::make(Kind::Log, {std::move(u)}); }
Expression sqrt(Expression u) { return Expression::make(Kind::Sqrt, {std::move(u)}); }
Expression neg(Expression u) { return Expression::make(Kind::Neg, {std::move(u)}); }

Expression pow(Expression base, Expression exponent) {
    if (base.is(std::numbers::e))
        return exp(std::move(exponent));
    if (contains_variable(exponent))
        return exp(mul(std::move(exponent), log(std::move(base))));
    return Expression::make(Kind::Pow, {std::move(base), std::move(exponent)});
}

bool contains_variable(const Expression& e) noexcept {
    if (e.is_variable())
        return true;
    for (std::size_t i = 0; i < e.arity(); ++i)
        if (contains_variable(e.child(i)))
            return true;
    return false;
}

std::size_t node_count(const Expression& e) noexcept {
    std::size_t n = 1;
    for (std::size_t i = 0; i < e.arity(); ++i)
        n += node_count(e.child(i));
    return n;
}

bool approx_equal(const Expression& a, const Expression& b, double rel_tol) noexcept {
    if (a.kind() != b.kind() || a.arity() != b.arity())
        return false;
    if (a.is_constant()) {
        const double scale = std::max(std::abs(a.value()), std::abs(b.value()));
        return std::abs(a.value() - b.value()) <= rel_tol * scale;
    }
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (!approx_equal(a.child(i), b.child(i), rel_tol))
            return false;
    return true;
}

double evaluate(const Expression& e, double x) {
    switch (e.kind()) {
    case Kind::Constant:
        return e.value();
    case Kind::Variable:
        return x;
    case Kind::Add:
        return evaluate(e.lhs(), x) + evaluate(e.rhs(), x);
    case Kind::Sub:
        return evaluate(e.lhs(), x) - evaluate(e.rhs(), x);
    case Kind::Mul:
        return evaluate(e.lhs(), x) * evaluate(e.rhs(), x);
    case Kind::Div: {
        const double num = evaluate(e.lhs(), x);
        const double den = evaluate(e.rhs(), x);
        if (den == 0.0)
            throw EvalDomainError(Kind::Div, x, DomainReason::DivByZero);
        return num / den;
    }
    case Kind::Pow: {
        const double base = evaluate(e.lhs(), x);
        const double p = evaluate(e.rhs(), x);
        if ((base == 0.0 && p <= 0.0) || (base < 0.0 && p != std::trunc(p)))
            throw EvalDomainError(Kind::Pow, x, DomainReason::PowIndeterminate);
        return std::pow(base, p);
    }
    case Kind::Exp:
        return std::exp(evaluate(e.lhs(), x));
    case Kind::Log: {
        const double u = evaluate(e.lhs(), x);
        if (u <= 0.0)
            throw EvalDomainError(Kind::Log, x, DomainReason::LogNonPositive);
        return std::log(u);
    }
    case Kind::Sqrt: {
        const double u = evaluate(e.lhs(), x);
        if (u < 0.0)
            throw EvalDomainError(Kind::Sqrt, x, DomainReason::SqrtNegative);
        return std::sqrt(u);
    }
    case Kind::Neg:
        return -evaluate(e.lhs(), x);
    }
    throw std::logic_error("unknown expression kind");
}

namespace {

Expression d_raw(const Expression& e) {
    switch (e.kind()) {
    case Kind::Constant:
        return constant(0.0);
    case Kind::Variable:
        return constant(1.0);
    case Kind::Add:
        return add(d_raw(e.lhs()), d_raw(e.rhs()));
    case Kind::Sub:
        return sub(d_raw(e.lhs()), d_raw(e.rhs()));
    case Kind::Mul: {
        const auto& u = e.lhs();
        const auto& v = e.rhs();
        if (!contains_variable(u))
            return mul(u, d_raw(v));
        if (!contains_variable(v))
            return mul(d_raw(u), v);
        return add(mul(d_raw(u), v), mul(u, d_raw(v)));
    }
    case Kind::Div: {
        const auto& u = e.lhs();
        const auto& v = e.rhs();
        if (!contains_variable(v))
            return div(d_raw(u), v);
        const auto v2 = Expression::make(Kind::Pow, {v, constant(2.0)});
        if (!contains_variable(u))
            return neg(div(mul(u, d_raw(v)), v2));
        return div(sub(mul(d_raw(u), v), mul(u, d_raw(v))), v2);
    }
    case Kind::Pow: {
        const auto& base = e.lhs();
        const auto& p = e.rhs();
        if (contains_variable(p)) {
            // Only reachable through Expression::make; builders rewrite this case.
            return mul(e, add(mul(d_raw(p), log(base)), mul(p, div(d_raw(base), base))));
        }
        if (!contains_variable(base))
            return constant(0.0);
        return mul(mul(p, Expression::make(Kind::Pow, {base, sub(p, constant(1.0))})), d_raw(base));
    }
    case Kind::Exp:
        return mul(e, d_raw(e.lhs()));
    case Kind::Log:
        return div(d_raw(e.lhs()), e.lhs());
    case Kind::Sqrt:
        return div(d_raw(e.lhs()), mul(constant(2.0), e));
    case Kind::Neg:
        return neg(d_raw(e.lhs()));
    }
    throw std::logic_error("unknown expression kind");
}

} // namespace

Expression differentiate(const Expression& e) { return simplify(d_raw(simplify(e))); }

Expression differentiate(const Expression& e, int order) {
    if (order < 0)
        throw std::invalid_argument("derivative order must be non-negative");
    Expression d = simplify(e);
    for (int i = 0; i < order; ++i)
        d = simplify(d_raw(d));
    return d;
}

namespace {

constexpr int kAddPrec = 1;
constexpr int kMulPrec = 2;
constexpr int kUnaryPrec = 3;
constexpr int kPowPrec = 4;
constexpr int kAtomPrec = 5;

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Rendered {
    std::string text;
    int prec;
};

Rendered render_node(const Expression& e);

std::string at_least(const Expression& e, int min_prec) {
    auto r = render_node(e);
    if (r.prec < min_prec)
        return "(" + r.text + ")";
    return r.text;
}

// exp(v*log(w)) prints as w^v whenever parsing w^v rebuilds exactly that tree.
bool renders_as_power(const Expression& e) {
    if (e.kind() != Kind::Exp || e.lhs().kind() != Kind::Mul)
        return false;
    const auto& m = e.lhs();
    return m.rhs().kind() == Kind::Log && contains_variable(m.lhs()) &&
           !m.rhs().lhs().is(std::numbers::e);
}

Rendered render_node(const Expression& e) {
    switch (e.kind()) {
    case Kind::Constant: {
        const double v = e.value();
        if (v == std::numbers::e)
            return {"e", kAtomPrec};
        if (v == std::numbers::pi)
            return {"pi", kAtomPrec};
        if (v < 0.0 || (v == 0.0 && std::signbit(v)))
            return {"-" + format_number(-v), kUnaryPrec};
        return {format_number(v), kAtomPrec};
    }
    case Kind::Variable:
        return {"x", kAtomPrec};
    case Kind::Add:
        return {at_least(e.lhs(), kAddPrec) + "+" + at_least(e.rhs(), kAddPrec + 1), kAddPrec};
    case Kind::Sub:
        return {at_least(e.lhs(), kAddPrec) + "-" + at_least(e.rhs(), kAddPrec + 1), kAddPrec};
    case Kind::Mul:
        return {at_least(e.lhs(), kMulPrec) + "*" + at_least(e.rhs(), kMulPrec + 1), kMulPrec};
    case Kind::Div:
        return {at_least(e.lhs(), kMulPrec) + "/" + at_least(e.rhs(), kMulPrec + 1), kMulPrec};
    case Kind::Neg:
        return {"-" + at_least(e.lhs(), kUnaryPrec), kUnaryPrec};
    case Kind::Pow:
        return {at_least(e.lhs(), kAtomPrec) + "^" + at_least(e.rhs(), kUnaryPrec), kPowPrec};
    case Kind::Exp:
        if (renders_as_power(e)) {
            const auto& m = e.lhs();
            return {at_least(m.rhs().lhs(), kAtomPrec) + "^" + at_least(m.lhs(), kUnaryPrec), kPowPrec};
        }
        return {"e^" + at_least(e.lhs(), kUnaryPrec), kPowPrec};
    case Kind::Log:
        return {"log(" + render_node(e.lhs()).text + ")", kAtomPrec};
    case Kind::Sqrt:
        return {"sqrt(" + render_node(e.lhs()).text + ")", kAtomPrec};
    }
    throw std::logic_error("unknown expression kind");
}

} // namespace

std::string render(const Expression& e) { return render_node(e).text; }

} // namespace starcalc::expr
