#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "starcalc/errors.hpp"
#include "starcalc/quad.hpp"

using namespace starcalc;
using namespace starcalc::quad;

TEST_CASE("integrate: documented examples") {
    const auto log_result = integrate([](double x) { return std::log(x); }, {0, 1});
    CHECK(log_result.converged);
    CHECK(std::abs(log_result.value + 1.0) <= 1e-9);

    const auto one = integrate([](double) { return 1.0; }, {2, 5});
    CHECK(one.value == 3.0);
    CHECK(one.converged);

    CHECK(integrate([](double x) { return x; }, {0, 1}).value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("integrate: orientation and empty intervals") {
    auto f = [](double x) { return std::exp(x); };
    const double forward = integrate(f, {0, 1}).value;
    CHECK(integrate(f, {1, 0}).value == -forward);
    const auto empty = integrate(f, {3, 3});
    CHECK(empty.value == 0.0);
    CHECK(empty.converged);
    CHECK(forward == doctest::Approx(std::numbers::e - 1).epsilon(1e-14));
}

TEST_CASE("integrate: endpoint singularities") {
    // 1/sqrt(x) on [0, 1] = 2.
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, {0, 1});
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
    // log(1 + x) on [0, 1] = 2 log 2 - 1.
    CHECK(integrate([](double x) { return std::log1p(x); }, {0, 1}).value ==
          doctest::Approx(2 * std::numbers::ln2 - 1).epsilon(1e-14));
}

TEST_CASE("integrate: error reporting") {
    CHECK_THROWS_AS(integrate([](double) { return NAN; }, {0, 1}), NonFiniteSample);
    // log|x - 1/2| is -inf at the centre node only; the integral is -log 2 - 1.
    const auto r = integrate([](double x) { return std::log(std::abs(x - 0.5)); }, {0, 1});
    CHECK(r.skipped_samples == 1);
    CHECK(r.value == doctest::Approx(-std::numbers::ln2 - 1).epsilon(1e-3));

    QuadSettings tight;
    tight.rel_tol = 1e-300;
    tight.abs_tol = 1e-300;
    tight.max_levels = 4;
    const auto hard = integrate([](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; }, {0, 1}, tight);
    CHECK_FALSE(hard.converged);
    CHECK(hard.error_estimate > 0);

    QuadSettings bad;
    bad.rel_tol = 0;
    CHECK_THROWS_AS(integrate([](double x) { return x; }, {0, 1}, bad), std::invalid_argument);
    bad = QuadSettings{};
    bad.max_levels = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(integrate([](double x) { return x; }, {0, INFINITY}), std::invalid_argument);
}

TEST_CASE("integrate: converged results honour the stated bound") {
    const QuadSettings s;
    for (double p : {0.5, 1.0, 2.0, 7.0}) {
        const auto r = integrate([p](double x) { return std::pow(x, p); }, {0, 2}, s);
        REQUIRE(r.converged);
        CHECK(r.error_estimate <= std::max(s.abs_tol, s.rel_tol * std::abs(r.value)));
        CHECK(r.value == doctest::Approx(std::pow(2.0, p + 1) / (p + 1)).epsilon(1e-12));
    }
}

TEST_CASE("property: integrate is linear") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coef(-2, 2);
    for (int i = 0; i < 50; ++i) {
        const double alpha = coef(rng);
        const double beta = coef(rng);
        const double c = coef(rng);
        auto f = [c](double x) { return std::exp(c * x); };
        auto g = [c](double x) { return 1.0 / (1.0 + x * x) + c; };
        const Interval iv{-1.0, 1.5};
        const double lhs = integrate([&](double x) { return alpha * f(x) + beta * g(x); }, iv).value;
        const double rhs = alpha * integrate(f, iv).value + beta * integrate(g, iv).value;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(rhs)));
    }
}

TEST_CASE("product_riemann: documented examples") {
    auto x = [](double t) { return t; };
    const double r4 = product_riemann(x, {0, 1}, 10000);
    CHECK(std::abs(r4 - std::exp(-1.0)) <= 1e-2 * std::exp(-1.0));
    CHECK(product_riemann(x, {2, 2}, 5) == 1.0);
    CHECK(product_riemann([](double) { return 1.0; }, {0, 1}, 7) == 1.0);
}

TEST_CASE("product_riemann: errors") {
    CHECK_THROWS_AS(product_riemann([](double t) { return t - 0.5; }, {0, 1}, 10), NonPositiveSample);
    CHECK_THROWS_AS(product_riemann([](double t) { return t; }, {0, 1}, 0), std::invalid_argument);
}

TEST_CASE("product_riemann equals the exponentiated midpoint log sum") {
    auto f = [](double t) { return 1.0 + t * t; };
    for (std::int64_t n : {1, 3, 100, 4096}) {
        double direct = 0.0;
        const double dx = 2.0 / static_cast<double>(n);
        for (std::int64_t i = 0; i < n; ++i)
            direct += std::log(f(-0.5 + (static_cast<double>(i) + 0.5) * dx));
        CHECK(product_riemann(f, {-0.5, 1.5}, n) == doctest::Approx(std::exp(direct * dx)).epsilon(1e-13));
    }
}

TEST_CASE("product_riemann reversal gives the reciprocal") {
    auto f = [](double t) { return 2.0 + t; };
    const double forward = product_riemann(f, {0, 1}, 100);
    CHECK(product_riemann(f, {1, 0}, 100) == doctest::Approx(1.0 / forward).epsilon(1e-14));
}

TEST_CASE("product_riemann converges monotonically toward the log integral") {
    const std::function<double(double)> fs[] = {[](double t) { return t + 1; },
                                                [](double t) { return std::exp(t); }};
    for (const auto& f : fs) {
        const double target = integrate([&](double t) { return std::log(f(t)); }, {0, 1}).value;
        double previous = INFINITY;
        for (std::int64_t n : {100, 1000, 10000}) {
            const double gap = std::abs(std::log(product_riemann(f, {0, 1}, n)) - target);
            CHECK(gap <= previous + 1e-15);
            previous = gap;
        }
    }
}
