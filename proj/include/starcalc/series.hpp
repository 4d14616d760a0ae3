#pragma once

// Product-form Taylor expansions f(x) = prod a_i^((x-c)^i) with
// a_i = (i-th star-derivative at c)^(1/i!).

#include <vector>

#include "starcalc/calculus.hpp"

namespace starcalc {

class TaylorProduct {
public:
    /// a_0 is exp(log_coefficients[0]).
    TaylorProduct(double center, std::vector<double> log_coefficients);
    /// a_0 is given exactly; log_coefficients[0] must be log(a0).
    TaylorProduct(double center, std::vector<double> log_coefficients, double a0);

    double center() const noexcept { return center_; }
    /// n: the highest power kept. coefficients().size() == n + 1.
    int term_count() const noexcept { return static_cast<int>(log_coefficients_.size()) - 1; }

    /// log a_i = (d^i log f)(c) / i!, stored directly to avoid exp/log round trips.
    const std::vector<double>& log_coefficients() const noexcept { return log_coefficients_; }
    /// a_i = exp(log_coefficients()[i]) for i >= 1; a_0 = f(c) exactly.
    std::vector<double> coefficients() const;
    double leading() const noexcept { return a0_; }

private:
    double center_;
    std::vector<double> log_coefficients_;
    double a0_;
};

/// Symbolic coefficients up to order n. Throws EvalDomainError when f(c) <= 0
/// and OverflowError when some |d^i log f(c)| / i! exceeds 709.
TaylorProduct taylor_coefficients(const Expression& f, double c, int n);

struct TaylorValue {
    double value = 0.0;
    ConvergenceClass cls = ConvergenceClass::Finite;
    /// Set when the magnitudes of the last partial-sum increments grow,
    /// a sign that x lies outside the radius of the log series.
    bool growing_terms = false;
};

/// exp(sum log(a_i) (x-c)^i). x == c returns a_0 exactly.
TaylorValue taylor_evaluate(const TaylorProduct& tp, double x);

/// |(d^i log f)(c) - log(f^{*(i)}(c))| with f^{*(i)} the star-derivative
/// operator applied i times.
double log_identity_residual(const Expression& f, double c, int i);

} // namespace starcalc
