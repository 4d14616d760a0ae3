#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "starcalc/calculus.hpp"

using namespace starcalc;
using namespace starcalc::expr;

namespace {

constexpr double kE = std::numbers::e;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// exp of a random polynomial of degree <= 3, plus the same polynomial for oracles.
struct RandomPositive {
    Expression f;
    double c[4];
};

RandomPositive random_positive(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    RandomPositive r{};
    Expression p = constant(0);
    Expression power = constant(1);
    for (int d = 0; d < 4; ++d) {
        r.c[d] = u(rng);
        p = add(p, mul(constant(r.c[d]), power));
        power = mul(power, variable());
    }
    r.f = add(exp(p), mul(constant(0.5), add(variable(), constant(3))));
    return r;
}

Interval random_interval(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> a(-2, 2);
    std::uniform_real_distribution<double> len(0.1, 2);
    const double lo = a(rng);
    return {lo, lo + len(rng)};
}

} // namespace

TEST_CASE("star_integral_definite: documented examples") {
    const auto x = star_integral_definite(parse("x"), {0, 1});
    CHECK(x.cls == ConvergenceClass::Finite);
    CHECK(std::abs(x.value - 1 / kE) <= 1e-9);

    CHECK(std::abs(star_integral_definite(parse("e^(1/x)"), {1, 2}).value - 2.0) <= 1e-10);
    // ((x+1)/e)^x (x+1) from 0 to 1 = (2/e) * 2 / 1.
    CHECK(star_integral_definite(parse("x+1"), {0, 1}).value == doctest::Approx(4 / kE).epsilon(1e-12));
    CHECK(star_integral_definite(parse("x+7"), {3, 3}).value == 1.0);
}

TEST_CASE("star_integral_definite: frozen quadrature oracles") {
    // Values from 30-digit quadrature of log f.
    CHECK(star_integral_definite(parse("x^2+1"), {0, 1}).value ==
          doctest::Approx(1.30205463771252936).epsilon(1e-12));
    CHECK(star_integral_definite(parse("x^x"), {0.5, 2}).value ==
          doctest::Approx(1.70819585618509364).epsilon(1e-12));
    CHECK(star_integral_definite(parse("1/(x+2)"), {-1, 3}).value ==
          doctest::Approx(0.0174714080106061565).epsilon(1e-12));
    CHECK(star_integral_definite(parse("sqrt(x)*e^x"), {0, 2}).value ==
          doctest::Approx(5.43656365691809047).epsilon(1e-12));
}

TEST_CASE("star_integral_definite: divergence classification and errors") {
    const auto zero = star_integral_definite(parse("e^(-1000)"), {0, 1});
    CHECK(zero.cls == ConvergenceClass::DivergentToZero);
    CHECK(zero.value == 0.0);
    const auto inf = star_integral_definite(parse("e^(x*800)"), {1, 2});
    CHECK(inf.cls == ConvergenceClass::DivergentToInfinity);
    CHECK(std::isinf(inf.value));
    const auto fine = star_integral_definite(parse("e^700"), {0, 1});
    CHECK(fine.cls == ConvergenceClass::Finite);

    CHECK_THROWS_AS(star_integral_definite(parse("x-1"), {0, 2}), EvalDomainError);
    QuadSettings s;
    s.max_levels = 3;
    s.rel_tol = 1e-300;
    s.abs_tol = 1e-300;
    CHECK_THROWS_AS(star_integral_definite(parse("x^x"), {0, 1}, s), ConvergenceError);
}

TEST_CASE("classify_log_integral thresholds") {
    CHECK(classify_log_integral(-708.5, 0).cls == ConvergenceClass::DivergentToZero);
    CHECK(classify_log_integral(-707.9, 0).cls == ConvergenceClass::Finite);
    CHECK(classify_log_integral(709.1, 0).cls == ConvergenceClass::DivergentToInfinity);
    CHECK(classify_log_integral(708.9, 0).cls == ConvergenceClass::Finite);
    CHECK(classify_log_integral(0, 0).value == 1.0);
}

TEST_CASE("star-integral properties over random positive functions") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 50; ++i) {
        const auto rf = random_positive(rng);
        const auto g = random_positive(rng);
        const Interval iv = random_interval(rng);
        const double sf = star_integral_definite(rf.f, iv).value;
        const double sg = star_integral_definite(g.f, iv).value;

        // Log homomorphism.
        const double li = quad::integrate(log_integrand(rf.f), iv).value;
        CHECK(std::abs(std::log(sf) - li) <= 1e-10 * std::max(1.0, std::abs(li)));

        // Monotonicity with a positive bump.
        const Expression bumped = add(rf.f, mul(constant(0.1 + u(rng)), exp(neg(mul(variable(), variable())))));
        CHECK(star_integral_definite(bumped, iv).value >= sf);

        // Power rule.
        const double n = -3 + 6 * u(rng);
        const double m = -3 + 6 * u(rng);
        const Expression fg = mul(pow(rf.f, constant(n)), pow(g.f, constant(m)));
        CHECK(rel(star_integral_definite(fg, iv).value, std::pow(sf, n) * std::pow(sg, m)) <= 1e-9);

        // Constant rule.
        const double c = 0.1 + 5 * u(rng);
        CHECK(rel(star_integral_definite(mul(constant(c), rf.f), iv).value, std::pow(c, iv.length()) * sf) <=
              1e-10);

        // Reversal.
        CHECK(rel(star_integral_definite(rf.f, {iv.b, iv.a}).value, 1 / sf) <= 1e-10);

        // Chaining through an interior point.
        const double mid = iv.a + u(rng) * iv.length();
        CHECK(rel(star_integral_definite(rf.f, {iv.a, mid}).value * star_integral_definite(rf.f, {mid, iv.b}).value,
                  sf) <= 1e-10);
    }
}

TEST_CASE("star_integral_closed: table rows") {
    auto anti = [](const char* text) {
        const auto e = star_integral_closed(parse(text));
        REQUIRE(e.has_value());
        return *e;
    };
    const auto p = anti("x^3");
    CHECK(p.pattern == ClosedFormPattern::PowerN);
    CHECK(p.n == 3);
    for (double x : {0.5, 1.0, 2.5})
        CHECK(evaluate(p.antiderivative, x) == doctest::Approx(std::pow(x / kE, 3 * x)).epsilon(1e-13));

    const auto k = anti("e^(2/x)");
    CHECK(k.pattern == ClosedFormPattern::ExpKOverX);
    CHECK(k.k == 2);
    CHECK(k.antiderivative == Expression::make(Kind::Pow, {variable(), constant(2)}));

    const auto xx = anti("x^x");
    CHECK(xx.pattern == ClosedFormPattern::XToX);
    for (double x : {0.5, 1.0, 2.5})
        CHECK(evaluate(xx.antiderivative, x) ==
              doctest::Approx(std::pow(x * x / kE, x * x / 4)).epsilon(1e-13));

    CHECK(anti("e^x").pattern == ClosedFormPattern::ExpX);
    CHECK(render(anti("e^x").antiderivative) == "e^(x^2/2)");
    CHECK(anti("e^e^x").pattern == ClosedFormPattern::ExpExpX);
    const auto ax = anti("3^x");
    CHECK(ax.pattern == ClosedFormPattern::AToX);
    CHECK(ax.a == doctest::Approx(3).epsilon(1e-15));
    CHECK(evaluate(ax.antiderivative, 2.0) == doctest::Approx(9.0).epsilon(1e-14));
    const auto lin = anti("2*x+3");
    CHECK(lin.pattern == ClosedFormPattern::Linear);
    CHECK(lin.a == 2);
    CHECK(lin.b == 3);
    CHECK(evaluate(lin.antiderivative, 1.0) ==
          doctest::Approx(std::pow(5 / kE, 1.0) * std::pow(5.0, 1.5)).epsilon(1e-13));
    CHECK(anti("1").antiderivative == constant(1));
    CHECK(anti("sqrt(x)").n == 0.5);
    CHECK(anti("1/x").n == -1);

    CHECK_FALSE(star_integral_closed(parse("log(x)")).has_value());
    CHECK_FALSE(star_integral_closed(parse("x^2+1")).has_value());
    CHECK_FALSE(star_integral_closed(parse("-2")).has_value());
}

TEST_CASE("star_derivative: documented examples") {
    CHECK(star_derivative(parse("x"), 2) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
    for (double x : {-1.0, 0.0, 3.0})
        CHECK(star_derivative(parse("e^x"), x) == doctest::Approx(kE).epsilon(1e-15));
    CHECK(star_derivative(parse("x^x"), 3) == doctest::Approx(3 * kE).epsilon(1e-15));
    CHECK(star_derivative(parse("x^x"), 3, 1, DerivativeMethod::Numeric) ==
          doctest::Approx(3 * kE).epsilon(1e-9));
}

TEST_CASE("star_derivative_closed: documented examples") {
    CHECK(star_derivative_closed(constant(4)) == constant(1));
    const Expression lin = parse("2*x+3");
    CHECK(star_derivative_closed(lin) == exp(div(constant(2), lin)));
    CHECK(star_derivative_closed(parse("e^e^x")) == parse("e^e^x"));
}

TEST_CASE("star_derivative: methods agree") {
    const char* fs[] = {"x^2+1", "x^x", "e^(1/x)", "sqrt(x)*e^x", "(x+1)^(x/2)"};
    for (const char* text : fs) {
        const Expression f = parse(text);
        for (double x : {0.7, 1.3, 2.2}) {
            INFO(text, " at ", x);
            const double s1 = star_derivative(f, x, 1);
            CHECK(rel(star_derivative(f, x, 1, DerivativeMethod::Numeric), s1) <= 1e-6);
            for (int order : {2, 3}) {
                const double s = star_derivative(f, x, order);
                CHECK(rel(star_derivative(f, x, order, DerivativeMethod::Numeric), s) <= 1e-4);
            }
        }
    }
}

TEST_CASE("star_derivative: one-sided quotient and step guards") {
    NumericDerivativeOptions one;
    one.one_sided = true;
    one.step = 1e-7;
    CHECK(rel(star_derivative(parse("x"), 2, 1, DerivativeMethod::Numeric, one), std::exp(0.5)) <= 1e-6);

    NumericDerivativeOptions tiny;
    tiny.step = 1e-14;
    CHECK_THROWS_AS(star_derivative(parse("x"), 2, 1, DerivativeMethod::Numeric, tiny), StepUnderflow);
    CHECK_THROWS_AS(star_derivative(parse("x"), 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(star_derivative(parse("x-3"), 2, 1), EvalDomainError);
}

TEST_CASE("central_stencil reproduces the classic weights") {
    const auto d1 = central_stencil(1);
    REQUIRE(d1.size() == 3);
    CHECK(d1[0] == doctest::Approx(-0.5));
    CHECK(d1[1] == doctest::Approx(0.0));
    CHECK(d1[2] == doctest::Approx(0.5));
    const auto d2 = central_stencil(2);
    CHECK(d2[0] == doctest::Approx(1.0));
    CHECK(d2[1] == doctest::Approx(-2.0));
    const auto d3 = central_stencil(3);
    REQUIRE(d3.size() == 5);
    CHECK(d3[0] == doctest::Approx(-0.5));
    CHECK(d3[1] == doctest::Approx(1.0));
    CHECK(d3[3] == doctest::Approx(-1.0));

    // Sixth-order second derivative: 1/90, -3/20, 3/2, -49/18, ...
    const auto d2_6 = central_stencil(2, 6);
    REQUIRE(d2_6.size() == 7);
    CHECK(d2_6[0] == doctest::Approx(1.0 / 90));
    CHECK(d2_6[1] == doctest::Approx(-3.0 / 20));
    CHECK(d2_6[2] == doctest::Approx(1.5));
    CHECK(d2_6[3] == doctest::Approx(-49.0 / 18));
    CHECK(d2_6[6] == doctest::Approx(1.0 / 90));
    CHECK_THROWS_AS(central_stencil(2, 3), std::invalid_argument);
}

TEST_CASE("log_evaluate avoids overflow through exp, products and powers") {
    CHECK(log_evaluate(parse("e^(800*x)"), 2) == doctest::Approx(1600));
    CHECK(log_evaluate(parse("x*e^(900)/e^(900)"), 3) == doctest::Approx(std::log(3.0)));
    CHECK(log_evaluate(parse("(e^(400*x))^3"), 1) == doctest::Approx(1200));
    CHECK(log_evaluate(parse("-x*-x"), 2) == doctest::Approx(std::log(4.0)));
    CHECK(std::isinf(log_evaluate(parse("x-1"), 1)));
    CHECK_THROWS_AS(log_evaluate(parse("x-1"), 0.5), EvalDomainError);
}

TEST_CASE("FTC roundtrip over every table pattern") {
    const char* fs[] = {"x^2.5", "e^x", "e^(3/x)", "e^e^x", "x^x", "5^x", "3*x+2", "x", "7"};
    for (const char* text : fs) {
        const Expression f = parse(text);
        const auto entry = star_integral_closed(f);
        REQUIRE(entry.has_value());
        const Expression back = star_derivative_closed(entry->antiderivative);
        for (int i = 0; i < 20; ++i) {
            const double x = 0.3 + 0.1 * i;
            INFO(text, " at ", x);
            CHECK(rel(evaluate(back, x), evaluate(f, x)) <= 1e-9);
        }
    }
}

TEST_CASE("exponent rule for star-derivatives") {
    const Expression f = parse("x+2");
    const Expression g = parse("x^2/3");
    const Expression fg = pow(f, g);
    const Expression lhs = star_derivative_closed(fg);
    const Expression fstar = star_derivative_closed(f);
    for (double x : {0.1, 0.9, 1.7, 2.4}) {
        const double expected = std::pow(evaluate(f, x), evaluate(differentiate(g), x)) *
                                std::pow(evaluate(fstar, x), evaluate(g, x));
        CHECK(rel(evaluate(lhs, x), expected) <= 1e-9);
    }
}

TEST_CASE("ftc_evaluate") {
    CHECK(ftc_evaluate(parse("(x/e)^x"), {1, 2}) == doctest::Approx(4 / kE).epsilon(1e-14));
    CHECK(ftc_evaluate(parse("e^(x^2/2)"), {0, 1}) ==
          doctest::Approx(star_integral_definite(parse("e^x"), {0, 1}).value).epsilon(1e-12));
    CHECK(ftc_evaluate(parse("x"), {3, 3}) == 1.0);
    try {
        ftc_evaluate(parse("x"), {0, 1});
        FAIL("expected DivByZero");
    } catch (const EvalDomainError& e) {
        CHECK(e.reason() == DomainReason::DivByZero);
    }
}

TEST_CASE("by_parts_residual") {
    CHECK(by_parts_residual(parse("x"), parse("x"), 2) <= 1e-10);
    CHECK(by_parts_residual(parse("e^x"), parse("x^2"), 1) <= 1e-10);
    for (double x : {0.5, 1.0, 4.0})
        CHECK(by_parts_residual(parse("x+1"), parse("3"), x) <= 1e-15);
    CHECK_THROWS_AS(by_parts_residual(parse("x"), parse("x"), -1), EvalDomainError);
}
