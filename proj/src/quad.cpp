#include "starcalc/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "starcalc/errors.hpp"

namespace starcalc::quad {

namespace {

constexpr int kLevelCap = 20;
constexpr int kMinLevels = 3;
// Distance-to-endpoint floor on [-1,1]; nodes closer than this are unusable in double.
constexpr double kMinComplement = 1e-300;

struct Node {
    double complement; // 1 - |xi|, computed without cancellation
    double weight;     // d xi / dt at this node
};

// Nodes at t = k*h for odd k (all k >= 1 on level 0), t > 0 only; the
// abscissa mirrors to -t. Level 0 uses h = 1.
std::vector<Node> build_level(int level) {
    const double h = std::ldexp(1.0, -level);
    std::vector<Node> nodes;
    const int step = level == 0 ? 1 : 2;
    for (int k = 1;; k += step) {
        const double t = k * h;
        const double u = std::numbers::pi / 2 * std::sinh(t);
        const double ch = std::cosh(u);
        const double complement = 1.0 / (std::exp(u) * ch);
        if (complement < kMinComplement)
            break;
        const double w = std::numbers::pi / 2 * std::cosh(t) / (ch * ch);
        nodes.push_back({complement, w});
    }
    return nodes;
}

const std::vector<Node>& level_nodes(int level) {
    static const auto table = [] {
        std::array<std::vector<Node>, kLevelCap + 1> t;
        for (int l = 0; l <= kLevelCap; ++l)
            t[static_cast<std::size_t>(l)] = build_level(l);
        return t;
    }();
    return table[static_cast<std::size_t>(level)];
}

class Sampler {
public:
    Sampler(const RealFunction& f, double a, double b) : f_(f), a_(a), b_(b), half_(0.5 * (b - a)) {}

    // Weighted contribution of the node pair at +/-t. weight_sum accumulates
    // the same expression with f = 1 so the rule can be normalised.
    double pair(const Node& n) {
        const double l = a_ + half_ * n.complement;
        const double r = b_ - half_ * n.complement;
        weight_sum += n.weight * (inside(l) + inside(r));
        return n.weight * (sample(l) + sample(r));
    }

    double centre() {
        weight_sum += std::numbers::pi / 2 * inside(a_ + half_);
        return std::numbers::pi / 2 * sample(a_ + half_);
    }

    // An interval too short to hold any node in double contributes nothing.
    double normalised(double sum) const { return weight_sum > 0.0 ? sum / weight_sum : 0.0; }

    std::size_t evaluations = 0;
    std::size_t skipped = 0;
    double weight_sum = 0.0;

private:
    double inside(double x) const { return x > a_ && x < b_ ? 1.0 : 0.0; }

    double sample(double x) {
        if (!(x > a_ && x < b_))
            return 0.0;
        ++evaluations;
        const double y = f_(x);
        if (std::isnan(y))
            throw NonFiniteSample(x);
        if (std::isinf(y)) {
            ++skipped;
            return 0.0;
        }
        return y;
    }

    const RealFunction& f_;
    double a_;
    double b_;
    double half_;
};

} // namespace

void QuadSettings::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("quadrature tolerances must be positive");
    if (max_levels < 1)
        throw std::invalid_argument("max_levels must be at least 1");
}

QuadResult integrate(const RealFunction& f, Interval iv, const QuadSettings& s) {
    s.validate();
    if (!std::isfinite(iv.a) || !std::isfinite(iv.b))
        throw std::invalid_argument("integration bounds must be finite");
    if (iv.empty())
        return {0.0, 0.0, true, 0, 0, 0};
    if (iv.reversed()) {
        QuadResult r = integrate(f, {iv.b, iv.a}, s);
        r.value = -r.value;
        return r;
    }

    Sampler sampler(f, iv.a, iv.b);
    const int max_level = std::min(s.max_levels, kLevelCap);

    // The weights are normalised to integrate f = 1 exactly; the correction
    // is below the discretisation error once a few levels are in.
    const double length = iv.length();
    double sum = sampler.centre();
    for (const auto& n : level_nodes(0))
        sum += sampler.pair(n);
    double estimate = length * sampler.normalised(sum);

    QuadResult r;
    r.value = estimate;
    r.error_estimate = std::abs(estimate);
    for (int level = 1; level <= max_level; ++level) {
        for (const auto& n : level_nodes(level))
            sum += sampler.pair(n);
        const double next = length * sampler.normalised(sum);
        r.error_estimate = std::abs(next - estimate);
        r.value = next;
        r.levels = level;
        estimate = next;
        if (!std::isfinite(next))
            break;
        const double tol = std::max(s.abs_tol, s.rel_tol * std::abs(next));
        if (level >= std::min(kMinLevels, max_level) && r.error_estimate <= tol) {
            r.converged = true;
            break;
        }
    }
    r.evaluations = sampler.evaluations;
    r.skipped_samples = sampler.skipped;
    return r;
}

double midpoint_log_sum(const RealFunction& f, Interval iv, std::int64_t n) {
    if (n < 1)
        throw std::invalid_argument("product_riemann needs n >= 1");
    if (iv.empty())
        return 0.0;
    const double dx = iv.length() / static_cast<double>(n);
    // Neumaier summation keeps n = 1e6 factors accurate to a few ulps.
    double sum = 0.0;
    double carry = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = iv.a + (static_cast<double>(i) + 0.5) * dx;
        const double y = f(t);
        if (!(y > 0.0))
            throw NonPositiveSample(t, y);
        const double term = std::log(y);
        const double next = sum + term;
        if (std::abs(sum) >= std::abs(term))
            carry += (sum - next) + term;
        else
            carry += (term - next) + sum;
        sum = next;
    }
    return dx * (sum + carry);
}

double product_riemann(const RealFunction& f, Interval iv, std::int64_t n) {
    if (n < 1)
        throw std::invalid_argument("product_riemann needs n >= 1");
    if (iv.empty())
        return 1.0;
    return std::exp(midpoint_log_sum(f, iv, n));
}

} // namespace starcalc::quad
