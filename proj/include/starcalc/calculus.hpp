#pragma once

// Star-integrals and star-derivatives: definite evaluation through the log
// homomorphism, the closed-form antiderivative table, symbolic and numeric
// star-derivatives, the fundamental theorem and integration by parts.

#include <optional>
#include <string_view>

#include "starcalc/expr.hpp"
#include "starcalc/quad.hpp"

namespace starcalc {

using expr::Expression;
using quad::Interval;
using quad::QuadSettings;

enum class ConvergenceClass { Finite, DivergentToZero, DivergentToInfinity };

std::string_view class_name(ConvergenceClass c) noexcept;

/// value is 0 for DivergentToZero and +inf for DivergentToInfinity.
struct StarResult {
    double value = 1.0;
    ConvergenceClass cls = ConvergenceClass::Finite;
    double error_estimate = 0.0;
};

/// Log-integral values past these bounds leave the range of exp in double.
inline constexpr double kLogUnderflowBound = -708.0;
inline constexpr double kLogOverflowBound = 709.0;

/// exp(log_value) with divergence classification at the IEEE bounds above.
StarResult classify_log_integral(double log_value, double log_error) noexcept;

/// log f(x), summing logs through products, quotients, powers and exp so that
/// a factor overflowing double does not hide a finite log. f(x) == 0 gives
/// -inf; f(x) < 0 throws EvalDomainError.
double log_evaluate(const Expression& f, double x);

/// x -> log_evaluate(f, x). f(x) == 0 maps to -inf (dropped by the quadrature as a
/// measure-zero point); f(x) < 0 throws EvalDomainError.
quad::RealFunction log_integrand(const Expression& f);

/// exp(integral of log f over iv). a == b gives exactly 1. Throws
/// ConvergenceError when a finite result fails to converge.
StarResult star_integral_definite(const Expression& f, Interval iv, const QuadSettings& s = {});

enum class ClosedFormPattern { PowerN, ExpX, ExpKOverX, ExpExpX, XToX, AToX, Linear };

std::string_view pattern_name(ClosedFormPattern p) noexcept;

/// One row of the antiderivative table, instantiated for a concrete integrand.
/// Only the parameters that belong to the pattern are meaningful:
///   PowerN: x^n           -> (x/e)^(n*x)
///   ExpX: e^x             -> e^(x^2/2)
///   ExpKOverX: e^(k/x)    -> x^k
///   ExpExpX: e^(e^x)      -> e^(e^x)
///   XToX: x^x             -> (x^2/e)^(x^2/4)
///   AToX: a^x             -> a^(x^2/2), stored as e^(log(a)*x^2/2)
///   Linear: a*x+b         -> ((a*x+b)/e)^x * (a*x+b)^(b/a); a = 0 gives b^x
/// The multiplicative constant C is fixed to 1.
struct ClosedFormEntry {
    ClosedFormPattern pattern;
    double n = 0.0;
    double k = 0.0;
    double a = 0.0;
    double b = 0.0;
    Expression antiderivative;
};

/// Matches simplify(f) against the table; std::nullopt when nothing matches.
std::optional<ClosedFormEntry> star_integral_closed(const Expression& f);

enum class DerivativeMethod { Symbolic, Numeric };

struct NumericDerivativeOptions {
    /// Overrides the default step (see star_derivative).
    std::optional<double> step;
    /// (f(x+h)/f(x))^(1/h) instead of the central quotient; order 1 only.
    bool one_sided = false;
};

/// The order-th star-derivative of f at x.
///
/// Symbolic evaluates exp of the order-th symbolic derivative of log f.
/// Numeric uses the central geometric quotient (f(x+h)/f(x-h))^(1/(2h)) with
/// h = cbrt(eps) * (1+|x|) for order 1, and exponentiates a sixth-order
/// central difference stencil on log f with h = eps^(1/(order+2)) * (1+|x|)
/// for higher orders. Throws StepUnderflow when the step falls below
/// 2^-40 * (1+|x|).
double star_derivative(const Expression& f, double x, int order = 1,
                       DerivativeMethod method = DerivativeMethod::Symbolic,
                       const NumericDerivativeOptions& options = {});

/// simplify(exp(f'/f)).
Expression star_derivative_closed(const Expression& f);

/// F(b)/F(a). a == b gives 1; F(a) == 0 throws EvalDomainError(DivByZero).
/// Endpoints where F only has a limiting value must be avoided by the caller.
double ftc_evaluate(const Expression& F, Interval iv);

/// |g' log f - (g log f)' + g f'/f| at x, the log-differentiated form of
/// integration by parts for star-integrals.
double by_parts_residual(const Expression& f, const Expression& g, double x);

/// Central difference weights for the order-th derivative on offsets -m..m,
/// m = (order+1)/2 + accuracy/2 - 1, with truncation error O(h^accuracy)
/// (Fornberg's recursion). accuracy must be even.
std::vector<double> central_stencil(int order, int accuracy = 2);

} // namespace starcalc
