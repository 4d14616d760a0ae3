#include "starcalc/expr.hpp"

#include <cmath>
#include <optional>

namespace starcalc::expr {

namespace {

// Guards against pathological rule interaction; real trees settle in a few passes.
constexpr int kMaxDepth = 200;
constexpr int kMaxPasses = 16;

Expression reduce(Kind kind, const Expression& a, const Expression& b, int depth);

Expression S(Kind kind, const Expression& a, int depth) { return reduce(kind, a, Expression(), depth + 1); }
Expression S(Kind kind, const Expression& a, const Expression& b, int depth) {
    return reduce(kind, a, b, depth + 1);
}

Expression build(Kind kind, const Expression& a, const Expression& b) {
    switch (kind) {
    case Kind::Exp:
    case Kind::Log:
    case Kind::Sqrt:
    case Kind::Neg:
        return Expression::make(kind, {a});
    default:
        return Expression::make(kind, {a, b});
    }
}

bool is_unary(Kind kind) {
    return kind == Kind::Exp || kind == Kind::Log || kind == Kind::Sqrt || kind == Kind::Neg;
}

// Exponents that are integers up to rounding noise become exact integers.
double snap(double v) {
    const double r = std::round(v);
    if (std::abs(v - r) <= 1e-13 * std::max(1.0, std::abs(v)))
        return r;
    return v;
}

std::optional<double> fold(Kind kind, const Expression& a, const Expression& b) {
    try {
        const Expression e = build(kind, a, b);
        const double v = evaluate(e, 0.0);
        if (std::isfinite(v))
            return v;
    } catch (const EvalDomainError&) {
    }
    return std::nullopt;
}

struct Factor {
    Expression base;
    double power;
};

struct Product {
    double coefficient = 1.0;
    bool has_coefficient = false;
    int constant_count = 0;
    std::vector<Factor> factors;
};

// Collects the factors of e into out, with every power multiplied by sign.
// Nested quotients contribute their denominators with the opposite sign.
void flatten(const Expression& e, Product& out, double sign = 1.0) {
    if (e.kind() == Kind::Mul) {
        flatten(e.lhs(), out, sign);
        flatten(e.rhs(), out, sign);
    } else if (e.kind() == Kind::Div) {
        flatten(e.lhs(), out, sign);
        flatten(e.rhs(), out, -sign);
    } else if (e.is_constant() && (sign > 0.0 || e.value() != 0.0)) {
        out.coefficient = sign > 0.0 ? out.coefficient * e.value() : out.coefficient / e.value();
        out.has_coefficient = true;
        ++out.constant_count;
    } else if (e.kind() == Kind::Pow && e.rhs().is_constant()) {
        out.factors.push_back({e.lhs(), sign * e.rhs().value()});
    } else if (e.kind() == Kind::Sqrt) {
        out.factors.push_back({e.lhs(), sign * 0.5});
    } else {
        out.factors.push_back({e, sign});
    }
}

Expression power_of(const Expression& base, double power, int depth) {
    if (power == 1.0)
        return base;
    if (power == 0.5)
        return S(Kind::Sqrt, base, depth);
    return S(Kind::Pow, base, constant(power), depth);
}

// Positive powers go to the numerator, negative ones to the denominator.
Expression rebuild(const Product& p, int depth) {
    std::optional<Expression> num;
    std::optional<Expression> den;
    for (const auto& f : p.factors) {
        if (f.power == 0.0)
            continue;
        auto& side = f.power > 0.0 ? num : den;
        const Expression term = power_of(f.base, std::abs(f.power), depth);
        side = side ? S(Kind::Mul, *side, term, depth) : term;
    }
    Expression top = num ? *num : constant(p.coefficient);
    if (num && p.coefficient != 1.0)
        top = S(Kind::Mul, constant(p.coefficient), top, depth);
    return den ? S(Kind::Div, top, *den, depth) : top;
}

// Merges repeated bases and folds several numeric coefficients into one.
// Returns nullopt when the factor list is already in merged form.
std::optional<Expression> merge_factors(Product p, int depth) {
    bool changed = p.constant_count > 1 && !p.factors.empty();
    std::vector<Factor> merged;
    for (const auto& f : p.factors) {
        bool found = false;
        for (auto& m : merged) {
            if (m.base == f.base) {
                m.power = snap(m.power + f.power);
                found = changed = true;
                break;
            }
        }
        if (!found)
            merged.push_back(f);
    }
    if (!changed)
        return std::nullopt;
    p.factors = std::move(merged);
    return rebuild(p, depth);
}

std::optional<Expression> merge_product(const Expression& a, const Expression& b, int depth) {
    Product p;
    flatten(a, p);
    flatten(b, p);
    return merge_factors(std::move(p), depth);
}

std::optional<Expression> cancel_quotient(const Expression& a, const Expression& b, int depth) {
    Product p;
    flatten(a, p);
    flatten(b, p, -1.0);
    return merge_factors(std::move(p), depth);
}

bool is_log(const Expression& e) { return e.kind() == Kind::Log; }

Expression reduce_add(const Expression& a, const Expression& b, int depth) {
    if (a.is(0.0))
        return b;
    if (b.is(0.0))
        return a;
    if (b.kind() == Kind::Neg)
        return S(Kind::Sub, a, b.lhs(), depth);
    if (a.kind() == Kind::Neg)
        return S(Kind::Sub, b, a.lhs(), depth);
    if (b.is_constant() && b.value() < 0.0)
        return S(Kind::Sub, a, constant(-b.value()), depth);
    if (a == b)
        return S(Kind::Mul, constant(2.0), a, depth);
    if (b.is_constant() && a.kind() == Kind::Add && a.rhs().is_constant())
        return S(Kind::Add, a.lhs(), constant(a.rhs().value() + b.value()), depth);
    return add(a, b);
}

Expression reduce_sub(const Expression& a, const Expression& b, int depth) {
    if (b.is(0.0))
        return a;
    if (a.is(0.0))
        return S(Kind::Neg, b, depth);
    if (a == b)
        return constant(0.0);
    if (b.kind() == Kind::Neg)
        return S(Kind::Add, a, b.lhs(), depth);
    if (b.is_constant() && b.value() < 0.0)
        return S(Kind::Add, a, constant(-b.value()), depth);
    return sub(a, b);
}

Expression reduce_mul(const Expression& a, const Expression& b, int depth) {
    if (a.is(0.0) || b.is(0.0))
        return constant(0.0);
    if (a.is(1.0))
        return b;
    if (b.is(1.0))
        return a;
    if (b.is_constant())
        return S(Kind::Mul, b, a, depth);
    if (a.is(-1.0))
        return S(Kind::Neg, b, depth);
    if (a.kind() == Kind::Neg)
        return S(Kind::Neg, S(Kind::Mul, a.lhs(), b, depth), depth);
    if (b.kind() == Kind::Neg)
        return S(Kind::Neg, S(Kind::Mul, a, b.lhs(), depth), depth);
    if (a.is_constant()) {
        if (b.kind() == Kind::Mul && b.lhs().is_constant())
            return S(Kind::Mul, constant(a.value() * b.lhs().value()), b.rhs(), depth);
        if (b.kind() == Kind::Div && b.lhs().is_constant())
            return S(Kind::Div, constant(a.value() * b.lhs().value()), b.rhs(), depth);
        return mul(a, b);
    }
    // a is not constant from here on.
    if (b.kind() == Kind::Div)
        return S(Kind::Div, S(Kind::Mul, a, b.lhs(), depth), b.rhs(), depth);
    if (a.kind() == Kind::Div && a.lhs().is(1.0))
        return S(Kind::Div, b, a.rhs(), depth);
    if (b.kind() == Kind::Mul && b.lhs().is_constant())
        return S(Kind::Mul, b.lhs(), S(Kind::Mul, a, b.rhs(), depth), depth);
    if (a.kind() == Kind::Mul && a.lhs().is_constant())
        return S(Kind::Mul, a.lhs(), S(Kind::Mul, a.rhs(), b, depth), depth);
    if (auto merged = merge_product(a, b, depth))
        return *merged;
    return mul(a, b);
}

Expression reduce_div(const Expression& a, const Expression& b, int depth) {
    if (b.is(1.0))
        return a;
    if (b.is(-1.0))
        return S(Kind::Neg, a, depth);
    if (a.is(0.0) && !b.is(0.0))
        return constant(0.0);
    if (a == b)
        return constant(1.0);
    if (a.kind() == Kind::Neg)
        return S(Kind::Neg, S(Kind::Div, a.lhs(), b, depth), depth);
    if (b.kind() == Kind::Neg)
        return S(Kind::Neg, S(Kind::Div, a, b.lhs(), depth), depth);
    if (b.kind() == Kind::Div && b.lhs().is(1.0))
        return S(Kind::Mul, a, b.rhs(), depth);
    if (auto c = cancel_quotient(a, b, depth))
        return *c;
    if (a.kind() == Kind::Mul && a.lhs().is_constant())
        return S(Kind::Mul, a.lhs(), S(Kind::Div, a.rhs(), b, depth), depth);
    return div(a, b);
}

Expression reduce_pow(const Expression& base, const Expression& p, int depth) {
    if (!p.is_constant())
        return pow(base, p);
    if (p.is(1.0))
        return base;
    if (p.is(0.0))
        return constant(1.0);
    if (p.is(-1.0))
        return S(Kind::Div, constant(1.0), base, depth);
    const double q = p.value();
    if (base.kind() == Kind::Pow && base.rhs().is_constant() && q == std::trunc(q))
        return S(Kind::Pow, base.lhs(), constant(snap(base.rhs().value() * q)), depth);
    if (base.kind() == Kind::Sqrt && q == 2.0)
        return base.lhs();
    if (base.kind() == Kind::Exp)
        return S(Kind::Exp, S(Kind::Mul, p, base.lhs(), depth), depth);
    return pow(base, p);
}

Expression reduce_exp(const Expression& u, int depth) {
    if (u.kind() == Kind::Log)
        return u.lhs();
    if (u.kind() == Kind::Add && (is_log(u.lhs()) || is_log(u.rhs())))
        return S(Kind::Mul, S(Kind::Exp, u.lhs(), depth), S(Kind::Exp, u.rhs(), depth), depth);
    if (u.kind() == Kind::Mul && u.lhs().is_constant() && is_log(u.rhs()))
        return S(Kind::Pow, u.rhs().lhs(), u.lhs(), depth);
    return exp(u);
}

Expression reduce_neg(const Expression& u, int depth) {
    if (u.kind() == Kind::Neg)
        return u.lhs();
    if (u.kind() == Kind::Mul && u.lhs().is_constant())
        return S(Kind::Mul, constant(-u.lhs().value()), u.rhs(), depth);
    if (u.kind() == Kind::Div && u.lhs().is_constant())
        return S(Kind::Div, constant(-u.lhs().value()), u.rhs(), depth);
    if (u.kind() == Kind::Sub)
        return S(Kind::Sub, u.rhs(), u.lhs(), depth);
    return neg(u);
}

Expression reduce(Kind kind, const Expression& a, const Expression& b, int depth) {
    if (depth > kMaxDepth)
        return build(kind, a, b);
    const bool all_constant = a.is_constant() && (is_unary(kind) || b.is_constant());
    if (all_constant) {
        if (auto v = fold(kind, a, b))
            return constant(*v);
    }
    switch (kind) {
    case Kind::Add: return reduce_add(a, b, depth);
    case Kind::Sub: return reduce_sub(a, b, depth);
    case Kind::Mul: return reduce_mul(a, b, depth);
    case Kind::Div: return reduce_div(a, b, depth);
    case Kind::Pow: return reduce_pow(a, b, depth);
    case Kind::Exp: return reduce_exp(a, depth);
    case Kind::Log:
        if (a.kind() == Kind::Exp)
            return a.lhs();
        return log(a);
    case Kind::Sqrt: return sqrt(a);
    case Kind::Neg: return reduce_neg(a, depth);
    default: return build(kind, a, b);
    }
}

Expression simplify_pass(const Expression& e) {
    if (e.arity() == 0)
        return e;
    const Expression a = simplify_pass(e.child(0));
    const Expression b = e.arity() == 2 ? simplify_pass(e.child(1)) : Expression();
    return reduce(e.kind(), a, b, 0);
}

} // namespace

Expression simplify(const Expression& e) {
    Expression current = e;
    for (int i = 0; i < kMaxPasses; ++i) {
        Expression next = simplify_pass(current);
        if (next == current)
            return next;
        current = std::move(next);
    }
    return current;
}

} // namespace starcalc::expr
