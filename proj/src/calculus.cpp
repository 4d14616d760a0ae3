#include "starcalc/calculus.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace starcalc {

using namespace expr;

std::string_view class_name(ConvergenceClass c) noexcept {
    switch (c) {
    case ConvergenceClass::Finite: return "Finite";
    case ConvergenceClass::DivergentToZero: return "DivergentToZero";
    case ConvergenceClass::DivergentToInfinity: return "DivergentToInfinity";
    }
    return "?";
}

std::string_view pattern_name(ClosedFormPattern p) noexcept {
    switch (p) {
    case ClosedFormPattern::PowerN: return "PowerN";
    case ClosedFormPattern::ExpX: return "ExpX";
    case ClosedFormPattern::ExpKOverX: return "ExpKOverX";
    case ClosedFormPattern::ExpExpX: return "ExpExpX";
    case ClosedFormPattern::XToX: return "XToX";
    case ClosedFormPattern::AToX: return "AToX";
    case ClosedFormPattern::Linear: return "Linear";
    }
    return "?";
}

StarResult classify_log_integral(double log_value, double log_error) noexcept {
    if (log_value < kLogUnderflowBound)
        return {0.0, ConvergenceClass::DivergentToZero, 0.0};
    if (log_value > kLogOverflowBound)
        return {std::numeric_limits<double>::infinity(), ConvergenceClass::DivergentToInfinity, 0.0};
    const double v = std::exp(log_value);
    return {v, ConvergenceClass::Finite, v * std::expm1(std::abs(log_error))};
}

namespace {

struct SignedLog {
    double log_abs; // log|v|; -inf when v == 0
    int sign;       // -1, 0 or 1
};

SignedLog direct_log(double v) {
    if (v == 0.0)
        return {-std::numeric_limits<double>::infinity(), 0};
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

// log|e(x)| without forming e(x) across products, quotients, powers and exp,
// so factors like e^(800x) do not overflow before the log is taken.
SignedLog signed_log(const Expression& e, double x) {
    switch (e.kind()) {
    case Kind::Exp:
        return {evaluate(e.lhs(), x), 1};
    case Kind::Neg: {
        const SignedLog u = signed_log(e.lhs(), x);
        return {u.log_abs, -u.sign};
    }
    case Kind::Mul:
    case Kind::Div: {
        const SignedLog l = signed_log(e.lhs(), x);
        const SignedLog r = signed_log(e.rhs(), x);
        if (r.sign == 0 && e.kind() == Kind::Div)
            throw EvalDomainError(Kind::Div, x, DomainReason::DivByZero);
        if (l.sign == 0 || r.sign == 0)
            return direct_log(0.0);
        const double v = e.kind() == Kind::Mul ? l.log_abs + r.log_abs : l.log_abs - r.log_abs;
        return {v, l.sign * r.sign};
    }
    case Kind::Sqrt: {
        const SignedLog u = signed_log(e.lhs(), x);
        if (u.sign < 0)
            throw EvalDomainError(Kind::Sqrt, x, DomainReason::SqrtNegative);
        return {0.5 * u.log_abs, u.sign};
    }
    case Kind::Pow: {
        const SignedLog base = signed_log(e.lhs(), x);
        if (base.sign > 0)
            return {evaluate(e.rhs(), x) * base.log_abs, 1};
        return direct_log(evaluate(e, x));
    }
    default:
        return direct_log(evaluate(e, x));
    }
}

} // namespace

double log_evaluate(const Expression& f, double x) {
    const SignedLog r = signed_log(f, x);
    if (r.sign < 0)
        throw EvalDomainError(Kind::Log, x, DomainReason::LogNonPositive);
    return r.log_abs;
}

quad::RealFunction log_integrand(const Expression& f) {
    return [f](double x) { return log_evaluate(f, x); };
}

StarResult star_integral_definite(const Expression& f, Interval iv, const QuadSettings& s) {
    if (iv.empty())
        return {1.0, ConvergenceClass::Finite, 0.0};
    if (!contains_variable(f)) {
        // Constant integrand: c^(b-a), including c == 0 where every sample is -inf.
        const double log_c = log_evaluate(f, iv.a);
        if (std::isinf(log_c))
            return classify_log_integral(iv.reversed() ? -log_c : log_c, 0.0);
        return classify_log_integral(log_c * iv.length(), 0.0);
    }
    const auto r = quad::integrate(log_integrand(f), iv, s);
    if (r.value < kLogUnderflowBound || r.value > kLogOverflowBound || std::isnan(r.value))
        return classify_log_integral(r.value, r.error_estimate);
    if (!r.converged)
        throw ConvergenceError("star-integral did not converge", std::exp(r.value),
                               std::exp(r.value) * r.error_estimate);
    return classify_log_integral(r.value, r.error_estimate);
}

namespace {

const Expression& x_var() {
    static const Expression x = variable();
    return x;
}

Expression half_square(double divisor) {
    return div(Expression::make(Kind::Pow, {x_var(), constant(2.0)}), constant(divisor));
}

std::optional<ClosedFormEntry> entry(ClosedFormPattern p, Expression anti) {
    ClosedFormEntry e{p, 0, 0, 0, 0, simplify(anti)};
    return e;
}

std::optional<ClosedFormEntry> power_n(double n) {
    // (x/e)^(n x)
    auto e = entry(ClosedFormPattern::PowerN,
                   exp(mul(mul(constant(n), x_var()), log(div(x_var(), constant(std::numbers::e))))));
    e->n = n;
    return e;
}

std::optional<ClosedFormEntry> a_to_x(double log_a) {
    auto e = entry(ClosedFormPattern::AToX, exp(mul(constant(log_a), half_square(2.0))));
    e->a = std::exp(log_a);
    return e;
}

std::optional<ClosedFormEntry> linear(double a, double b, const Expression& f) {
    std::optional<ClosedFormEntry> e;
    if (a == 0.0) {
        if (!(b > 0.0))
            return std::nullopt;
        e = entry(ClosedFormPattern::Linear, exp(mul(constant(std::log(b)), x_var())));
    } else {
        // ((a x + b)/e)^x * (a x + b)^(b/a)
        Expression first = exp(mul(x_var(), log(div(f, constant(std::numbers::e)))));
        Expression anti = b == 0.0 ? first : mul(first, Expression::make(Kind::Pow, {f, constant(b / a)}));
        e = entry(ClosedFormPattern::Linear, anti);
    }
    e->a = a;
    e->b = b;
    return e;
}

// Recognises c*x (c may be 1) and returns c.
std::optional<double> linear_coefficient(const Expression& e) {
    if (e.is_variable())
        return 1.0;
    if (e.kind() == Kind::Mul && e.lhs().is_constant() && e.rhs().is_variable())
        return e.lhs().value();
    if (e.kind() == Kind::Mul && e.rhs().is_constant() && e.lhs().is_variable())
        return e.rhs().value();
    if (e.kind() == Kind::Neg && e.lhs().is_variable())
        return -1.0;
    return std::nullopt;
}

std::optional<ClosedFormEntry> match_exp(const Expression& u) {
    if (u.is_variable())
        return entry(ClosedFormPattern::ExpX, exp(half_square(2.0)));
    if (u.kind() == Kind::Div && u.lhs().is_constant() && u.rhs().is_variable()) {
        const double k = u.lhs().value();
        auto e = entry(ClosedFormPattern::ExpKOverX, Expression::make(Kind::Pow, {x_var(), constant(k)}));
        e->k = k;
        return e;
    }
    if (u.kind() == Kind::Exp && u.lhs().is_variable())
        return entry(ClosedFormPattern::ExpExpX, exp(exp(x_var())));
    if (u.kind() == Kind::Mul) {
        const auto& l = u.lhs();
        const auto& r = u.rhs();
        const bool x_log_x = (l.is_variable() && r.kind() == Kind::Log && r.lhs().is_variable()) ||
                             (r.is_variable() && l.kind() == Kind::Log && l.lhs().is_variable());
        if (x_log_x) {
            // (x^2/e)^(x^2/4)
            Expression x2 = Expression::make(Kind::Pow, {x_var(), constant(2.0)});
            return entry(ClosedFormPattern::XToX,
                         exp(mul(half_square(4.0), log(div(x2, constant(std::numbers::e))))));
        }
    }
    if (auto c = linear_coefficient(u))
        return a_to_x(*c);
    return std::nullopt;
}

} // namespace

std::optional<ClosedFormEntry> star_integral_closed(const Expression& f) {
    const Expression g = simplify(f);
    switch (g.kind()) {
    case Kind::Constant:
        return linear(0.0, g.value(), g);
    case Kind::Variable:
        return power_n(1.0);
    case Kind::Pow:
        if (g.lhs().is_variable() && g.rhs().is_constant())
            return power_n(g.rhs().value());
        break;
    case Kind::Sqrt:
        if (g.lhs().is_variable())
            return power_n(0.5);
        break;
    case Kind::Div:
        if (g.lhs().is(1.0) && g.rhs().is_variable())
            return power_n(-1.0);
        break;
    case Kind::Exp:
        return match_exp(g.lhs());
    case Kind::Mul:
        if (auto a = linear_coefficient(g))
            return linear(*a, 0.0, g);
        break;
    case Kind::Add:
    case Kind::Sub: {
        const double sign = g.kind() == Kind::Add ? 1.0 : -1.0;
        if (g.rhs().is_constant()) {
            if (auto a = linear_coefficient(g.lhs()))
                return linear(*a, sign * g.rhs().value(), g);
        }
        if (g.lhs().is_constant()) {
            if (auto a = linear_coefficient(g.rhs()))
                return linear(sign * *a, g.lhs().value(), g);
        }
        break;
    }
    default:
        break;
    }
    return std::nullopt;
}

Expression star_derivative_closed(const Expression& f) {
    const Expression g = simplify(f);
    return simplify(exp(div(differentiate(g), g)));
}

std::vector<double> central_stencil(int order, int accuracy) {
    if (order < 1)
        throw std::invalid_argument("stencil order must be at least 1");
    if (accuracy < 2 || accuracy % 2 != 0)
        throw std::invalid_argument("stencil accuracy must be a positive even number");
    const int m = (order + 1) / 2 + accuracy / 2 - 1;
    const int points = 2 * m + 1;
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = static_cast<double>(i - m);

    // Fornberg: delta[k][n][j] = weight of grid[j] for the k-th derivative
    // using the first n+1 nodes, evaluated at 0.
    const auto M = static_cast<std::size_t>(order);
    const auto N = static_cast<std::size_t>(points);
    std::vector<std::vector<std::vector<double>>> delta(
        M + 1, std::vector<std::vector<double>>(N, std::vector<double>(N, 0.0)));
    delta[0][0][0] = 1.0;
    double c1 = 1.0;
    for (std::size_t n = 1; n < N; ++n) {
        double c2 = 1.0;
        for (std::size_t v = 0; v < n; ++v) {
            const double c3 = grid[n] - grid[v];
            c2 *= c3;
            for (std::size_t k = 0; k <= std::min(n, M); ++k) {
                const double prev = k > 0 ? delta[k - 1][n - 1][v] : 0.0;
                delta[k][n][v] = (grid[n] * delta[k][n - 1][v] - static_cast<double>(k) * prev) / c3;
            }
        }
        for (std::size_t k = 0; k <= std::min(n, M); ++k) {
            const double prev = k > 0 ? delta[k - 1][n - 1][n - 1] : 0.0;
            delta[k][n][n] = c1 / c2 * (static_cast<double>(k) * prev - grid[n - 1] * delta[k][n - 1][n - 1]);
        }
        c1 = c2;
    }
    return delta[M][N - 1];
}

namespace {

constexpr int kHighOrderAccuracy = 6;

double checked_log(const Expression& f, double x) {
    const double y = evaluate(f, x);
    if (!(y > 0.0))
        throw EvalDomainError(Kind::Log, x, DomainReason::LogNonPositive);
    return std::log(y);
}

double numeric_star_derivative(const Expression& f, double x, int order, const NumericDerivativeOptions& opt) {
    const double floor = std::ldexp(1.0, -40) * (1.0 + std::abs(x));
    // Order 1 is the second-order geometric quotient; higher orders use a
    // sixth-order stencil with the rounding-limited step eps^(1/(order+2)).
    const int accuracy = order == 1 ? 2 : kHighOrderAccuracy;
    double h = opt.step.value_or(
        std::max(std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2)) * (1.0 + std::abs(x)),
                 std::ldexp(1.0, -40)));
    // Use the step that is actually representable around x.
    h = (x + h) - x;
    if (!(h >= floor))
        throw StepUnderflow("star-derivative step " + std::to_string(h) + " is below 2^-40*(1+|x|)");

    if (opt.one_sided) {
        if (order != 1)
            throw std::invalid_argument("one-sided star-derivative is defined for order 1 only");
        return std::exp((checked_log(f, x + h) - checked_log(f, x)) / h);
    }
    const auto weights = central_stencil(order, accuracy);
    const int m = static_cast<int>(weights.size() / 2);
    double acc = 0.0;
    for (int j = -m; j <= m; ++j) {
        const double w = weights[static_cast<std::size_t>(j + m)];
        if (w != 0.0)
            acc += w * checked_log(f, x + j * h);
    }
    return std::exp(acc / std::pow(h, order));
}

} // namespace

double star_derivative(const Expression& f, double x, int order, DerivativeMethod method,
                       const NumericDerivativeOptions& options) {
    if (order < 1)
        throw std::invalid_argument("star-derivative order must be at least 1");
    const double fx = evaluate(f, x);
    if (!(fx > 0.0))
        throw EvalDomainError(Kind::Log, x, DomainReason::LogNonPositive);
    if (method == DerivativeMethod::Numeric)
        return numeric_star_derivative(f, x, order, options);
    return std::exp(evaluate(differentiate(log(f), order), x));
}

double ftc_evaluate(const Expression& F, Interval iv) {
    if (iv.empty())
        return 1.0;
    const double fa = evaluate(F, iv.a);
    if (fa == 0.0)
        throw EvalDomainError(Kind::Div, iv.a, DomainReason::DivByZero);
    return evaluate(F, iv.b) / fa;
}

double by_parts_residual(const Expression& f, const Expression& g, double x) {
    const Expression log_f = log(f);
    const double g_prime_log_f = evaluate(mul(differentiate(g), log_f), x);
    const double d_g_log_f = evaluate(differentiate(mul(g, log_f)), x);
    const double g_log_star = evaluate(mul(g, div(differentiate(f), f)), x);
    return std::abs(g_prime_log_f - d_g_log_f + g_log_star);
}

} // namespace starcalc
