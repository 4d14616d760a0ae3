#include "starcalc/series.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace starcalc {

TaylorProduct::TaylorProduct(double center, std::vector<double> log_coefficients)
    : center_(center), log_coefficients_(std::move(log_coefficients)) {
    if (log_coefficients_.empty())
        throw std::invalid_argument("a Taylor product needs at least a_0");
    a0_ = std::exp(log_coefficients_[0]);
}

TaylorProduct::TaylorProduct(double center, std::vector<double> log_coefficients, double a0)
    : TaylorProduct(center, std::move(log_coefficients)) {
    a0_ = a0;
}

std::vector<double> TaylorProduct::coefficients() const {
    std::vector<double> out{a0_};
    out.reserve(log_coefficients_.size());
    for (std::size_t i = 1; i < log_coefficients_.size(); ++i)
        out.push_back(std::exp(log_coefficients_[i]));
    return out;
}

TaylorProduct taylor_coefficients(const Expression& f, double c, int n) {
    if (n < 0)
        throw std::invalid_argument("term count must be non-negative");
    const double f0 = expr::evaluate(f, c);
    if (!(f0 > 0.0))
        throw expr::EvalDomainError(expr::Kind::Log, c, expr::DomainReason::LogNonPositive);

    std::vector<double> logs{std::log(f0)};
    Expression d = expr::simplify(expr::log(f));
    double factorial = 1.0;
    for (int i = 1; i <= n; ++i) {
        d = expr::differentiate(d);
        factorial *= i;
        const double b = expr::evaluate(d, c) / factorial;
        if (!(std::abs(b) <= kLogOverflowBound))
            throw OverflowError("log Taylor coefficient " + std::to_string(i) + " has magnitude above 709");
        logs.push_back(b);
    }
    return TaylorProduct(c, std::move(logs), f0);
}

TaylorValue taylor_evaluate(const TaylorProduct& tp, double x) {
    const auto& b = tp.log_coefficients();
    if (x == tp.center())
        return {tp.leading(), ConvergenceClass::Finite, false};
    const double dx = x - tp.center();
    double sum = 0.0;
    double power = 1.0;
    double prev_term = 0.0;
    int growth = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double term = b[i] * power;
        sum += term;
        if (i >= 2 && term != 0.0 && std::abs(term) > std::abs(prev_term))
            ++growth;
        else if (term != 0.0)
            growth = 0;
        if (term != 0.0)
            prev_term = term;
        power *= dx;
    }
    TaylorValue out;
    out.growing_terms = growth >= 2;
    const StarResult r = classify_log_integral(sum, 0.0);
    out.value = r.value;
    out.cls = r.cls;
    return out;
}

double log_identity_residual(const Expression& f, double c, int i) {
    const double direct = expr::evaluate(expr::differentiate(expr::log(f), i), c);
    // The i-th star-derivative built by applying exp(g'/g) i times, so the two
    // sides come from different trees.
    Expression star = f;
    for (int k = 0; k < i; ++k)
        star = star_derivative_closed(star);
    const double via_star = std::log(expr::evaluate(star, c));
    return std::abs(direct - via_star);
}

} // namespace starcalc
