#include "starcalc/transforms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace starcalc {

namespace {

double log_or_minus_inf(double y) {
    return y == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(y);
}

} // namespace

const GTransform& transform(TransformKind kind) {
    static const GTransform exp_t{
        TransformKind::Exp, "exp", [](double u) { return std::exp(u); }, log_or_minus_inf,
        [](double y) { return y >= 0.0; }};
    static const GTransform id_t{
        TransformKind::Identity, "id", [](double u) { return u; }, [](double y) { return y; },
        [](double y) { return std::isfinite(y); }};
    static const GTransform log_t{
        TransformKind::Log, "log", [](double u) { return std::log(u); }, [](double y) { return std::exp(y); },
        [](double y) { return std::isfinite(y); }};
    static const GTransform square_t{
        TransformKind::Square, "square", [](double u) { return u * u; }, [](double y) { return std::sqrt(y); },
        [](double y) { return y >= 0.0; }};
    switch (kind) {
    case TransformKind::Exp: return exp_t;
    case TransformKind::Identity: return id_t;
    case TransformKind::Log: return log_t;
    case TransformKind::Square: return square_t;
    }
    throw std::invalid_argument("unknown transform");
}

TransformKind parse_transform(std::string_view name) {
    if (name == "exp")
        return TransformKind::Exp;
    if (name == "id" || name == "identity")
        return TransformKind::Identity;
    if (name == "log")
        return TransformKind::Log;
    if (name == "square")
        return TransformKind::Square;
    throw std::invalid_argument("unknown transform '" + std::string(name) + "'");
}

double g_integral(const Expression& f, const GTransform& g, Interval iv, const QuadSettings& s) {
    if (iv.reversed() && (g.kind == TransformKind::Square || g.kind == TransformKind::Log))
        throw IntervalError(std::string("reversed intervals are not defined for G = ") + std::string(g.name));
    auto integrand = [&](double x) {
        const double y = expr::evaluate(f, x);
        if (!g.in_inverse_domain(y)) {
            const auto reason = g.kind == TransformKind::Square ? expr::DomainReason::SqrtNegative
                                                                : expr::DomainReason::LogNonPositive;
            const auto node = g.kind == TransformKind::Square ? expr::Kind::Sqrt : expr::Kind::Log;
            throw expr::EvalDomainError(node, x, reason);
        }
        return g.inverse(y);
    };
    const auto r = quad::integrate(integrand, iv, s);
    if (!r.converged)
        throw ConvergenceError("G-transform integral did not converge", g.forward(r.value), r.error_estimate);
    return g.forward(r.value);
}

StarResult double_star_integral(const BivariateFunction& f, double inner_lower, Interval outer,
                                const QuadSettings& s) {
    if (outer.empty())
        return {1.0, ConvergenceClass::Finite, 0.0};
    auto inner_log = [&](double y) {
        auto log_f = [&](double x) {
            const double v = f(x, y);
            if (v > 0.0)
                return std::log(v);
            if (v == 0.0)
                return -std::numeric_limits<double>::infinity();
            throw DomainError("double star-integrand is negative at (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
        };
        const auto r = quad::integrate(log_f, {inner_lower, y}, s);
        if (!r.converged)
            throw ConvergenceError("inner star-integral did not converge", std::exp(r.value), r.error_estimate);
        return r.value;
    };
    const auto r = quad::integrate(inner_log, outer, s);
    if (r.value < kLogUnderflowBound || r.value > kLogOverflowBound)
        return classify_log_integral(r.value, r.error_estimate);
    if (!r.converged)
        throw ConvergenceError("outer star-integral did not converge", std::exp(r.value), r.error_estimate);
    return classify_log_integral(r.value, r.error_estimate);
}

} // namespace starcalc
