#pragma once

// Ordinary definite integration that tolerates integrable endpoint
// singularities, and the midpoint product-Riemann evaluator.

#include <cstddef>
#include <cstdint>
#include <functional>

namespace starcalc::quad {

using RealFunction = std::function<double(double)>;

/// Oriented interval; a > b and a == b are both allowed.
struct Interval {
    double a = 0.0;
    double b = 0.0;

    double length() const noexcept { return b - a; }
    bool reversed() const noexcept { return a > b; }
    bool empty() const noexcept { return a == b; }
};

struct QuadSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_levels = 12;

    /// Throws std::invalid_argument when a tolerance is not positive or max_levels < 1.
    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    int levels = 0;
    std::size_t evaluations = 0;
    /// Samples that returned +/-inf and were dropped. Only an isolated
    /// zero of f under a log lands here; a non-zero count on a well-behaved
    /// integrand means the integrand is wrong.
    std::size_t skipped_samples = 0;
};

/// Tanh-sinh (double exponential) quadrature with step halving.
///
/// Never samples a or b. Reversed intervals give the negated value and a == b
/// gives exactly 0. Exhausting max_levels returns converged = false with the
/// best estimate. A NaN sample throws NonFiniteSample.
QuadResult integrate(const RealFunction& f, Interval iv, const QuadSettings& s = {});

/// (prod f(t_i))^((b-a)/n) over the n subinterval midpoints, accumulated as a
/// sum of logs. Throws NonPositiveSample if some f(t_i) <= 0 and
/// std::invalid_argument if n < 1. Returns 1 when a == b.
double product_riemann(const RealFunction& f, Interval iv, std::int64_t n);

/// The log-space sum behind product_riemann: (b-a)/n * sum log f(t_i).
double midpoint_log_sum(const RealFunction& f, Interval iv, std::int64_t n);

} // namespace starcalc::quad
