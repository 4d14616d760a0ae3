#include "starcalc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace starcalc {

using namespace expr;

std::string_view flag_name(MvtFlag f) noexcept {
    switch (f) {
    case MvtFlag::None: return "None";
    case MvtFlag::ConstantFunction: return "ConstantFunction";
    case MvtFlag::NoBracket: return "NoBracket";
    }
    return "?";
}

namespace {

constexpr int kScanIntervals = 64;

// Leftmost sign change of target on a uniform scan, refined by bisection.
// scale sets what counts as "flat" for the ConstantFunction flag.
MvtResult scan_and_bisect(const std::function<double(double)>& target, Interval iv, double scale, double tol) {
    if (!(iv.a < iv.b))
        throw IntervalError("mean value solvers need a < b");
    const double mid = 0.5 * (iv.a + iv.b);
    auto safe = [&](double x) {
        try {
            const double v = target(x);
            return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
        } catch (const DomainError&) {
            return std::optional<double>();
        }
    };

    std::vector<double> xs;
    std::vector<double> ys;
    double max_abs = 0.0;
    for (int j = 0; j <= kScanIntervals; ++j) {
        double x = iv.a + (iv.b - iv.a) * j / kScanIntervals;
        auto y = safe(x);
        // Endpoints may sit on a singularity of log f; step inward.
        for (int shift = 30; !y && (j == 0 || j == kScanIntervals) && shift <= 50; shift += 10) {
            const double nudge = std::ldexp(iv.b - iv.a, -shift);
            x = j == 0 ? iv.a + nudge : iv.b - nudge;
            y = safe(x);
        }
        if (!y)
            throw DomainError("mean value target is not finite at x = " + std::to_string(x));
        xs.push_back(x);
        ys.push_back(*y);
        max_abs = std::max(max_abs, std::abs(*y));
    }
    if (max_abs <= 1e-10 * (1.0 + std::abs(scale)))
        return {mid, MvtFlag::ConstantFunction, std::abs(target(mid))};

    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (ys[j] == 0.0)
            return {xs[j], MvtFlag::None, 0.0};
        if (j + 1 < xs.size() && (ys[j] < 0.0) != (ys[j + 1] < 0.0) && ys[j + 1] != 0.0) {
            double lo = xs[j];
            double hi = xs[j + 1];
            double flo = ys[j];
            while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
                const double m = 0.5 * (lo + hi);
                if (m <= lo || m >= hi)
                    break;
                const double fm = target(m);
                if (fm == 0.0 || std::abs(fm) <= tol * 1e-3) {
                    lo = hi = m;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            const double c = 0.5 * (lo + hi);
            return {c, MvtFlag::None, std::abs(target(c))};
        }
    }
    return {mid, MvtFlag::NoBracket, std::abs(target(mid))};
}

double log_of(const Expression& f, double x) {
    const double y = evaluate(f, x);
    if (!(y > 0.0))
        throw EvalDomainError(Kind::Log, x, DomainReason::LogNonPositive);
    return std::log(y);
}

} // namespace

MvtResult mvt_star_integral(const Expression& f, Interval iv, double tol) {
    if (!(iv.a < iv.b))
        throw IntervalError("mean value solvers need a < b");
    const auto r = quad::integrate(log_integrand(f), iv);
    if (!r.converged)
        throw ConvergenceError("log-integral did not converge", r.value, r.error_estimate);
    const double mean = r.value / iv.length();
    return scan_and_bisect([&](double x) { return log_of(f, x) - mean; }, iv, mean, tol);
}

MvtResult mvt_star_derivative(const Expression& f, Interval iv, double tol) {
    if (!(iv.a < iv.b))
        throw IntervalError("mean value solvers need a < b");
    const double slope = (log_of(f, iv.b) - log_of(f, iv.a)) / iv.length();
    const Expression log_derivative = simplify(div(differentiate(f), f));
    return scan_and_bisect([&](double x) { return evaluate(log_derivative, x) - slope; }, iv, slope, tol);
}

std::string_view inequality_name(InequalityId id) noexcept {
    switch (id) {
    case InequalityId::ConcavityG: return "Concavity_g";
    case InequalityId::CauchySchwarzEq3: return "CauchySchwarz_Eq3";
    case InequalityId::LemmaEq4: return "Lemma_Eq4";
    case InequalityId::TheoremEq5: return "Theorem_Eq5";
    case InequalityId::AmGmN: return "AMGM_n";
    }
    return "?";
}

InequalityId parse_inequality(std::string_view name) {
    if (name == "concavity" || name == "Concavity_g")
        return InequalityId::ConcavityG;
    if (name == "eq3" || name == "CauchySchwarz_Eq3")
        return InequalityId::CauchySchwarzEq3;
    if (name == "eq4" || name == "Lemma_Eq4")
        return InequalityId::LemmaEq4;
    if (name == "eq5" || name == "Theorem_Eq5")
        return InequalityId::TheoremEq5;
    if (name == "amgm" || name == "AMGM_n")
        return InequalityId::AmGmN;
    throw std::invalid_argument("unknown inequality '" + std::string(name) + "'");
}

double Sides::margin() const noexcept { return (lhs - rhs) / (1.0 + std::abs(rhs)); }

namespace {

QuadSettings tight() {
    QuadSettings s;
    s.rel_tol = 1e-13;
    s.abs_tol = 1e-15;
    return s;
}

double starint(const Expression& f, Interval iv) {
    const auto r = star_integral_definite(f, iv, tight());
    if (r.cls != ConvergenceClass::Finite)
        throw ConvergenceError("star-integral left the double range", r.value, 0.0);
    return r.value;
}

} // namespace

Sides concavity_sides(const Expression& f, const Expression& g, double s, Interval iv) {
    const double lhs = starint(add(mul(constant(s), f), mul(constant(1.0 - s), g)), iv);
    const double rhs = starint(pow(f, constant(s)), iv) * starint(pow(g, constant(1.0 - s)), iv);
    return {lhs, rhs};
}

Sides cauchy_schwarz_sides(const Expression& f, const Expression& g, Interval iv) {
    const double lhs = starint(add(f, g), iv);
    const double rhs = std::pow(2.0, iv.length()) * std::sqrt(starint(mul(f, g), iv));
    return {lhs, rhs};
}

Sides lemma_eq4_sides(double alpha, double beta, double gamma) {
    const double sum = alpha + beta + gamma;
    return {sum * sum, 8.0 * alpha * std::sqrt(beta * gamma)};
}

Sides theorem_eq5_log_sides(const std::vector<double>& a) {
    if (a.size() < 2)
        throw std::invalid_argument("Theorem_Eq5 needs k >= 1, i.e. at least two values");
    const int k = static_cast<int>(a.size()) - 1;
    double sum = 0.0;
    for (double v : a)
        sum += v;
    const double lhs = std::ldexp(1.0, k - 1) * std::log(sum);
    double rhs = (std::ldexp(1.0, k) - 1.0) * std::numbers::ln2 + 0.5 * std::log(a[0]);
    for (int i = 1; i <= k; ++i)
        rhs += std::ldexp(1.0, i - 2) * std::log(a[static_cast<std::size_t>(i)]);
    return {lhs, rhs};
}

Sides amgm_sides(const std::vector<double>& a, Interval iv) {
    double sum = 0.0;
    double product = 1.0;
    for (double v : a) {
        sum += v;
        product *= v;
    }
    const double n = static_cast<double>(a.size());
    const double lhs = starint(constant(sum), iv);
    const double rhs = std::pow(n, iv.length()) * std::pow(starint(constant(product), iv), 1.0 / n);
    return {lhs, rhs};
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * std::ldexp(static_cast<double>(rng_() >> 11), -53); }
    // (0, hi]
    double positive(double hi) { return hi * (1.0 - std::ldexp(static_cast<double>(rng_() >> 11), -53)); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool one_in(int n) { return integer(1, n) == 1; }

    // exp(p(x)), p of degree <= 3 with coefficients in [-1, 1].
    Expression positive_function() {
        const int degree = integer(0, 3);
        Expression p = constant(uniform(-1.0, 1.0));
        Expression power = variable();
        for (int d = 1; d <= degree; ++d) {
            p = add(p, mul(constant(uniform(-1.0, 1.0)), power));
            power = mul(power, variable());
        }
        return exp(p);
    }

    Interval interval() {
        const double a = uniform(-2.0, 2.0);
        return {a, a + uniform(0.1, 2.0)};
    }

private:
    std::mt19937_64 rng_;
};

double trial_margin(InequalityId id, Draw& d) {
    switch (id) {
    case InequalityId::ConcavityG: {
        const Expression f = d.positive_function();
        const Expression g = d.one_in(10) ? f : d.positive_function();
        const double s = d.uniform(0.0, 1.0);
        return concavity_sides(f, g, s, d.interval()).margin();
    }
    case InequalityId::CauchySchwarzEq3: {
        const Expression f = d.positive_function();
        const Expression g = d.positive_function();
        return cauchy_schwarz_sides(f, g, d.interval()).margin();
    }
    case InequalityId::LemmaEq4: {
        if (d.one_in(4)) {
            // Around the equality point alpha = 2 beta = 2 gamma.
            const double t = d.positive(10.0) / 2.0;
            const double beta = t * (1.0 + d.uniform(0.0, 1e-3));
            const double gamma = t * (1.0 - d.uniform(0.0, 1e-3));
            return lemma_eq4_sides(2.0 * t * (1.0 + d.uniform(-1e-3, 1e-3)), beta, gamma).margin();
        }
        double v[3] = {d.positive(10.0), d.positive(10.0), d.positive(10.0)};
        std::sort(v, v + 3, std::greater<>());
        return lemma_eq4_sides(v[0], v[1], v[2]).margin();
    }
    case InequalityId::TheoremEq5: {
        const int k = d.integer(1, 6);
        std::vector<double> a(static_cast<std::size_t>(k + 1));
        if (d.one_in(4)) {
            // Around the equality point a proportional to (1/2, 1/2, 1, 2, 4, ...).
            const double t = d.positive(10.0);
            for (int i = 0; i <= k; ++i)
                a[static_cast<std::size_t>(i)] = t * std::ldexp(1.0, std::max(i, 1) - 2) * (1.0 + d.uniform(-1e-3, 1e-3));
        } else {
            for (auto& v : a)
                v = d.positive(10.0);
        }
        std::sort(a.begin(), a.end());
        const Sides s = theorem_eq5_log_sides(a);
        // Relative margin (LHS - RHS) / RHS from the log sides.
        return std::expm1(s.lhs - s.rhs);
    }
    case InequalityId::AmGmN: {
        const int n = d.integer(2, 8);
        std::vector<double> a(static_cast<std::size_t>(n));
        for (auto& v : a)
            v = d.positive(10.0);
        return amgm_sides(a, d.interval()).margin();
    }
    }
    return 0.0;
}

} // namespace

InequalityReport inequality_suite(InequalityId id, std::int64_t trials, std::uint64_t seed) {
    if (trials < 1)
        throw std::invalid_argument("trials must be at least 1");
    std::vector<double> margins(static_cast<std::size_t>(trials));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run_range = [&](std::int64_t begin, std::int64_t end) {
        try {
            for (std::int64_t i = begin; i < end; ++i) {
                Draw d(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i))));
                margins[static_cast<std::size_t>(i)] = trial_margin(id, d);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
        }
    };
    const auto workers = static_cast<std::int64_t>(std::max(1u, std::thread::hardware_concurrency()));
    if (workers == 1 || trials < 64) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (trials + workers - 1) / workers;
        for (std::int64_t begin = 0; begin < trials; begin += chunk)
            pool.emplace_back(run_range, begin, std::min(trials, begin + chunk));
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    InequalityReport report{id, trials, 0, std::numeric_limits<double>::infinity(), seed};
    for (double m : margins) {
        if (m < -kInequalityTolerance)
            ++report.violations;
        report.worst_margin = std::min(report.worst_margin, m);
    }
    return report;
}

ImproperClass classify_improper_constant(double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw DomainError("improper classification needs a finite k > 0");
    if (k < 1.0)
        return {true, 0.0};
    if (k == 1.0)
        return {true, 1.0};
    return {false, std::numeric_limits<double>::infinity()};
}

Expression area_integrand(const Expression& f) {
    const auto entry = star_integral_closed(f);
    if (!entry)
        throw NoClosedForm("no closed-form star-antiderivative for " + render(f));
    return simplify(mul(log(f), entry->antiderivative));
}

double mult_metric(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw DomainError("the multiplicative metric needs positive arguments");
    return std::max(x / y, y / x);
}

} // namespace starcalc
