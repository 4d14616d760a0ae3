#pragma once

#include <stdexcept>
#include <string>

namespace starcalc {

/// Coarse failure families. The CLI maps each one onto a stable exit code.
enum class ErrorCategory { Parse, Domain, Convergence, NoClosedForm };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ErrorCategory category() const noexcept = 0;
};

class DomainError : public Error {
public:
    using Error::Error;
    ErrorCategory category() const noexcept override { return ErrorCategory::Domain; }
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
        : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    ErrorCategory category() const noexcept override { return ErrorCategory::Convergence; }
    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

/// A sampled integrand value was NaN inside the open interval.
class NonFiniteSample : public DomainError {
public:
    explicit NonFiniteSample(double x)
        : DomainError("integrand is not finite at x = " + std::to_string(x)), x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

/// A product-Riemann test point where f(t) <= 0.
class NonPositiveSample : public DomainError {
public:
    NonPositiveSample(double t, double value)
        : DomainError("f(t) = " + std::to_string(value) + " is not positive at t = " +
                      std::to_string(t)),
          t_(t), value_(value) {}
    double t() const noexcept { return t_; }
    double value() const noexcept { return value_; }

private:
    double t_;
    double value_;
};

/// Interval orientation or shape the operation does not define.
class IntervalError : public DomainError {
public:
    using DomainError::DomainError;
};

class StepUnderflow : public Error {
public:
    using Error::Error;
    ErrorCategory category() const noexcept override { return ErrorCategory::Convergence; }
};

class OverflowError : public Error {
public:
    using Error::Error;
    ErrorCategory category() const noexcept override { return ErrorCategory::Convergence; }
};

class NoClosedForm : public Error {
public:
    using Error::Error;
    ErrorCategory category() const noexcept override { return ErrorCategory::NoClosedForm; }
};

} // namespace starcalc
