#pragma once

// Univariate real expression trees: construction, parsing, evaluation,
// symbolic differentiation and rule-based simplification.
//
// Expressions are immutable values. Copies share structure, so passing them
// by value is cheap and concurrent use needs no synchronization.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "starcalc/errors.hpp"

namespace starcalc::expr {

enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt, Neg };

std::string_view kind_name(Kind kind) noexcept;

class Expression {
public:
    /// The constant 0.
    Expression();

    Kind kind() const noexcept;
    /// Value of a Constant node; 0 for every other kind.
    double value() const noexcept;
    std::size_t arity() const noexcept;
    /// Child i (0 for unary nodes, 0/1 for binary nodes).
    const Expression& child(std::size_t i) const;
    const Expression& lhs() const { return child(0); }
    const Expression& rhs() const { return child(1); }

    bool is_constant() const noexcept { return kind() == Kind::Constant; }
    bool is_variable() const noexcept { return kind() == Kind::Variable; }
    /// True when this node is a Constant equal to v.
    bool is(double v) const noexcept { return is_constant() && value() == v; }

    /// Structural equality: same kinds, same constant values, node by node.
    friend bool operator==(const Expression& a, const Expression& b) noexcept;
    friend bool operator!=(const Expression& a, const Expression& b) noexcept { return !(a == b); }

    /// Low-level constructor; no rewriting. Throws std::invalid_argument on an
    /// arity mismatch or a non-finite constant.
    static Expression make(Kind kind, std::vector<Expression> children, double value = 0.0);

private:
    struct Node;
    explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Builders. pow() keeps a Pow node only for exponents free of x; otherwise it
// rewrites f^g as exp(g*log f). A base equal to the constant e always becomes
// exp(exponent).
Expression constant(double v);
Expression variable();
Expression add(Expression a, Expression b);
Expression sub(Expression a, Expression b);
Expression mul(Expression a, Expression b);
Expression div(Expression a, Expression b);
Expression pow(Expression base, Expression exponent);
Expression exp(Expression u);
Expression log(Expression u);
Expression sqrt(Expression u);
Expression neg(Expression u);

inline Expression operator+(Expression a, Expression b) { return add(std::move(a), std::move(b)); }
inline Expression operator-(Expression a, Expression b) { return sub(std::move(a), std::move(b)); }
inline Expression operator*(Expression a, Expression b) { return mul(std::move(a), std::move(b)); }
inline Expression operator/(Expression a, Expression b) { return div(std::move(a), std::move(b)); }
inline Expression operator-(Expression a) { return neg(std::move(a)); }

bool contains_variable(const Expression& e) noexcept;
std::size_t node_count(const Expression& e) noexcept;

/// Structural equality that compares constants to a relative tolerance.
bool approx_equal(const Expression& a, const Expression& b, double rel_tol = 1e-12) noexcept;

enum class DomainReason { LogNonPositive, DivByZero, PowIndeterminate, SqrtNegative };

std::string_view reason_name(DomainReason reason) noexcept;

class EvalDomainError : public DomainError {
public:
    EvalDomainError(Kind node, double x, DomainReason reason);

    Kind node() const noexcept { return node_; }
    double x() const noexcept { return x_; }
    DomainReason reason() const noexcept { return reason_; }

private:
    Kind node_;
    double x_;
    DomainReason reason_;
};

/// IEEE double value of e at x. Overflow yields +/-inf; domain violations throw.
double evaluate(const Expression& e, double x);

/// d/dx of e, simplified.
Expression differentiate(const Expression& e);

/// n-th derivative, simplifying after every step.
Expression differentiate(const Expression& e, int order);

/// Pointwise-equal tree after constant folding and algebraic identities.
/// exp(log u) -> u is applied and is only valid where u > 0.
Expression simplify(const Expression& e);

/// Compact infix text that parses back to a structurally equal tree.
std::string render(const Expression& e);

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what);

    ErrorCategory category() const noexcept override { return ErrorCategory::Parse; }
    /// Byte offset into the input where parsing stopped.
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Names that parse to Constant nodes, in addition to e and pi.
using Bindings = std::map<std::string, double, std::less<>>;

/// Grammar:
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?
///   atom  := NUMBER | 'x' | 'e' | 'pi' | NAME | FUNC '(' expr ')' | '(' expr ')'
/// FUNC is one of exp, log, sqrt. '^' is right-associative and binds tighter
/// than unary minus, so -x^2 is -(x^2).
Expression parse(std::string_view text, const Bindings& bindings = {});

} // namespace starcalc::expr
