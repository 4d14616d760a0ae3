#pragma once

// Executable theorems: mean value solvers, the inequality suite, improper
// classification of k^x, the area-integrand demonstration and the
// multiplicative metric.

#include <cstdint>
#include <optional>
#include <string_view>

#include "starcalc/calculus.hpp"

namespace starcalc {

enum class MvtFlag { None, ConstantFunction, NoBracket };

std::string_view flag_name(MvtFlag f) noexcept;

struct MvtResult {
    double c = 0.0;
    MvtFlag flag = MvtFlag::None;
    /// |target(c)| for the bracketed function at the returned point.
    double residual = 0.0;
};

/// c in (a, b) with log f(c) equal to the mean of log f over iv, i.e.
/// f(c)^(b-a) = star-integral. Leftmost root of a 65-point scan, then bisection
/// to width 1e-12. A flat target returns the midpoint with ConstantFunction;
/// no sign change returns the midpoint with NoBracket.
MvtResult mvt_star_integral(const Expression& f, Interval iv, double tol = 1e-12);

/// c in (a, b) with f'(c)/f(c) = (log f(b) - log f(a)) / (b - a), i.e.
/// f*(c) = (f(b)/f(a))^(1/(b-a)). Same scan and flag policy.
MvtResult mvt_star_derivative(const Expression& f, Interval iv, double tol = 1e-12);

enum class InequalityId { ConcavityG, CauchySchwarzEq3, LemmaEq4, TheoremEq5, AmGmN };

std::string_view inequality_name(InequalityId id) noexcept;
/// Accepts concavity, eq3, eq4, eq5, amgm. Throws std::invalid_argument otherwise.
InequalityId parse_inequality(std::string_view name);

inline constexpr double kInequalityTolerance = 1e-9;

struct InequalityReport {
    InequalityId id;
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    /// min over trials of (LHS - RHS) / (1 + |RHS|).
    double worst_margin = 0.0;
    std::uint64_t seed = 0;
};

/// Runs seeded random trials for one inequality. A trial is a violation when
/// LHS < RHS - 1e-9 (1 + |RHS|). Trial i uses its own generator seeded from
/// (seed, i), so the report does not depend on execution order.
InequalityReport inequality_suite(InequalityId id, std::int64_t trials, std::uint64_t seed);

struct Sides {
    double lhs;
    double rhs;
    double margin() const noexcept;
};

/// Individual inequality sides for explicit inputs.
/// star-integral of s f + (1-s) g >= star-integral f^s * star-integral g^(1-s).
Sides concavity_sides(const Expression& f, const Expression& g, double s, Interval iv);
/// star-integral f + g >= 2^(b-a) (star-integral f g)^(1/2).
Sides cauchy_schwarz_sides(const Expression& f, const Expression& g, Interval iv);
/// (alpha + beta + gamma)^2 >= 8 alpha sqrt(beta gamma).
Sides lemma_eq4_sides(double alpha, double beta, double gamma);
/// (sum a_i)^(2^(k-1)) >= 2^(2^k - 1) sqrt(a_1) prod a_(i+1)^(2^(i-2)), k = a.size() - 1.
/// Both sides are returned as logarithms, since they overflow for k = 6.
Sides theorem_eq5_log_sides(const std::vector<double>& a);
/// star-integral of sum a_i >= n^(b-a) (star-integral prod a_i)^(1/n).
Sides amgm_sides(const std::vector<double>& a, Interval iv);

/// Limit of the star-integral of the constant k over [0, X] as X grows.
struct ImproperClass {
    bool converges = false;
    double value = 0.0; // meaningful when converges
};

/// k < 1 converges to 0, k = 1 to 1, k > 1 diverges. k <= 0 throws DomainError.
ImproperClass classify_improper_constant(double k);

/// simplify(log(f) * F) with F the closed-form star-antiderivative of f, the
/// ordinary derivative of F. Throws NoClosedForm when f matches no table row.
Expression area_integrand(const Expression& f);

/// max(x/y, y/x). Non-positive arguments throw DomainError.
double mult_metric(double x, double y);

} // namespace starcalc
