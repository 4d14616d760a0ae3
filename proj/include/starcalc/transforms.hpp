#pragma once

// The conjugated integral L(f, G) = G(integral of G^-1(f)) for four named
// transforms, and nested double star-integrals.

#include <functional>
#include <string_view>

#include "starcalc/calculus.hpp"

namespace starcalc {

enum class TransformKind { Exp, Identity, Log, Square };

struct GTransform {
    TransformKind kind;
    std::string_view name;
    quad::RealFunction forward;
    quad::RealFunction inverse;
    /// Whether y may be passed to inverse.
    std::function<bool(double)> in_inverse_domain;
};

/// Exp: G = exp, G^-1 = log (y >= 0, log 0 = -inf as a measure-zero point).
/// Identity: both maps are the identity.
/// Log: G = log, G^-1 = exp.
/// Square: G(u) = u^2, G^-1 = positive square root (y >= 0).
const GTransform& transform(TransformKind kind);

/// Accepts exp, id, identity, log, square. Throws std::invalid_argument otherwise.
TransformKind parse_transform(std::string_view name);

/// G(integrate(G^-1 o f, iv)). Throws EvalDomainError when f leaves the inverse
/// domain, IntervalError for reversed intervals under Square and Log, and
/// ConvergenceError when the quadrature does not converge.
double g_integral(const Expression& f, const GTransform& g, Interval iv, const QuadSettings& s = {});

using BivariateFunction = std::function<double(double x, double y)>;

/// Star-integral over y in outer of the star-integral of f(., y) from
/// inner_lower to y, i.e. exp of the double integral of log f.
StarResult double_star_integral(const BivariateFunction& f, double inner_lower, Interval outer,
                                const QuadSettings& s = {});

} // namespace starcalc
