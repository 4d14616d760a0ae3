#include "starcalc/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "starcalc/analysis.hpp"
#include "starcalc/calculus.hpp"
#include "starcalc/json_writer.hpp"
#include "starcalc/series.hpp"
#include "starcalc/transforms.hpp"

#ifndef STARCALC_VERSION
#define STARCALC_VERSION "0.0.0"
#endif

namespace starcalc::cli {

using nlohmann::json;

std::string version() { return STARCALC_VERSION; }

namespace {

enum class Format { Text, Json, Csv };

struct Options {
    std::string format = "text";
    std::string expression;
    double from = 0.0;
    double to = 0.0;
    double at = 0.0;
    double center = 0.0;
    std::optional<double> eval_at;
    std::optional<double> step;
    bool one_sided = false;
    int order = 1;
    int terms = 0;
    std::int64_t n = 10000;
    std::int64_t points = 0;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    std::string method;
    std::string kind;
    std::string inequality;
    std::string transform;
    std::string op;
    QuadSettings quad;
};

// What a command produced: a result for the envelope plus a text rendering.
struct Outcome {
    json result;
    std::string text;
    json diagnostics = json::array();
    std::string csv; // sample only
};

void diag(Outcome& o, const std::string& level, const std::string& message) {
    o.diagnostics.push_back({{"level", level}, {"message", message}});
}

json number_or_marker(double v) {
    if (std::isinf(v))
        return v > 0 ? "+inf" : "-inf";
    return v;
}

std::string text_number(double v) {
    if (std::isinf(v))
        return v > 0 ? "+inf" : "-inf";
    return format17(v);
}

Outcome star_result(const StarResult& r) {
    Outcome o;
    o.result = number_or_marker(r.value);
    o.text = text_number(r.value);
    diag(o, "info", "convergence class: " + std::string(class_name(r.cls)));
    if (r.cls == ConvergenceClass::Finite)
        diag(o, "info", "error estimate: " + format17(r.error_estimate));
    return o;
}

Expression parse_expr(const Options& opt) { return expr::parse(opt.expression); }

Outcome cmd_starint(const Options& opt) {
    const Expression f = parse_expr(opt);
    if (opt.method == "riemann") {
        const double log_value =
            quad::midpoint_log_sum([&](double x) { return expr::evaluate(f, x); }, {opt.from, opt.to}, opt.n);
        return star_result(classify_log_integral(log_value, 0.0));
    }
    return star_result(star_integral_definite(f, {opt.from, opt.to}, opt.quad));
}

Outcome cmd_starderiv(const Options& opt) {
    const Expression f = parse_expr(opt);
    const auto method = opt.method == "numeric" ? DerivativeMethod::Numeric : DerivativeMethod::Symbolic;
    NumericDerivativeOptions nopt;
    nopt.step = opt.step;
    nopt.one_sided = opt.one_sided;
    const double v = star_derivative(f, opt.at, opt.order, method, nopt);
    Outcome o;
    o.result = number_or_marker(v);
    o.text = text_number(v);
    if (method == DerivativeMethod::Symbolic && opt.order == 1)
        diag(o, "info", "closed form: " + expr::render(star_derivative_closed(f)));
    return o;
}

Outcome cmd_antiderivative(const Options& opt) {
    const Expression f = parse_expr(opt);
    const auto entry = star_integral_closed(f);
    if (!entry)
        throw NoClosedForm("no closed-form star-antiderivative for " + expr::render(f));
    const std::string text =
        entry->antiderivative.is(1.0) ? "C" : "C*" + expr::render(entry->antiderivative);
    Outcome o;
    o.result = text;
    o.text = text;
    diag(o, "info", "pattern: " + std::string(pattern_name(entry->pattern)));
    return o;
}

Outcome cmd_taylor(const Options& opt) {
    const Expression f = parse_expr(opt);
    const TaylorProduct tp = taylor_coefficients(f, opt.center, opt.terms);
    json coeffs = json::array();
    json logs = json::array();
    std::string text = "a = (";
    const auto a = tp.coefficients();
    for (std::size_t i = 0; i < a.size(); ++i) {
        coeffs.push_back(number_or_marker(a[i]));
        logs.push_back(tp.log_coefficients()[i]);
        text += (i ? ", " : "") + text_number(a[i]);
    }
    text += ")";
    Outcome o;
    o.result = {{"center", tp.center()}, {"coefficients", coeffs}, {"log_coefficients", logs}};
    if (opt.eval_at) {
        const TaylorValue v = taylor_evaluate(tp, *opt.eval_at);
        o.result["value"] = number_or_marker(v.value);
        o.result["growing_terms"] = v.growing_terms;
        text += "\nvalue = " + text_number(v.value);
        if (v.growing_terms)
            diag(o, "warning", "partial sums grow; x may lie outside the radius of convergence");
        if (v.cls != ConvergenceClass::Finite)
            diag(o, "warning", "evaluation overflowed: " + std::string(class_name(v.cls)));
    }
    o.text = text;
    return o;
}

Outcome cmd_mvt(const Options& opt) {
    const Expression f = parse_expr(opt);
    const MvtResult r = opt.kind == "derivative" ? mvt_star_derivative(f, {opt.from, opt.to})
                                                 : mvt_star_integral(f, {opt.from, opt.to});
    Outcome o;
    o.result = {{"c", r.c}, {"flag", std::string(flag_name(r.flag))}, {"residual", r.residual}};
    o.text = text_number(r.c);
    if (r.flag != MvtFlag::None) {
        o.text += " (" + std::string(flag_name(r.flag)) + ")";
        diag(o, "warning", "mean value point is not unique: " + std::string(flag_name(r.flag)));
    }
    return o;
}

Outcome cmd_check(const Options& opt) {
    const InequalityReport r = inequality_suite(parse_inequality(opt.inequality), opt.trials, opt.seed);
    Outcome o;
    o.result = {{"id", std::string(inequality_name(r.id))},
                {"trials", r.trials},
                {"violations", r.violations},
                {"worst_margin", r.worst_margin},
                {"seed", r.seed}};
    std::ostringstream s;
    s << inequality_name(r.id) << ": " << r.violations << " violations in " << r.trials
      << " trials, worst margin " << format17(r.worst_margin) << ", seed " << r.seed;
    o.text = s.str();
    if (r.violations > 0)
        diag(o, "warning", std::to_string(r.violations) + " trials violate the inequality");
    return o;
}

Outcome cmd_gtransform(const Options& opt) {
    const Expression f = parse_expr(opt);
    const double v = g_integral(f, transform(parse_transform(opt.transform)), {opt.from, opt.to}, opt.quad);
    Outcome o;
    o.result = number_or_marker(v);
    o.text = text_number(v);
    return o;
}

Outcome cmd_sample(const Options& opt) {
    const Expression f = parse_expr(opt);
    if (opt.points < 1)
        throw std::invalid_argument("--points must be at least 1");
    if (opt.op != "starint-cumulative" && opt.op != "starderiv")
        throw std::invalid_argument("--op must be starint-cumulative or starderiv");
    std::vector<double> xs;
    if (opt.points == 1) {
        xs.push_back(opt.to);
    } else {
        for (std::int64_t j = 0; j < opt.points; ++j)
            xs.push_back(j + 1 == opt.points
                             ? opt.to
                             : opt.from + (opt.to - opt.from) * static_cast<double>(j) /
                                              static_cast<double>(opt.points - 1));
    }

    Outcome o;
    o.result = json::array();
    o.csv = "x,value\n";
    const auto log_f = log_integrand(f);
    double cumulative_log = 0.0;
    double previous = opt.from;
    for (double x : xs) {
        double value = 0.0;
        if (opt.op == "starderiv") {
            value = star_derivative(f, x, 1);
        } else {
            const auto r = quad::integrate(log_f, {previous, x}, opt.quad);
            if (!r.converged)
                throw ConvergenceError("cumulative star-integral did not converge", std::exp(r.value),
                                       r.error_estimate);
            cumulative_log += r.value;
            previous = x;
            value = classify_log_integral(cumulative_log, 0.0).value;
        }
        o.result.push_back({{"x", x}, {"value", number_or_marker(value)}});
        o.csv += format17(x) + "," + text_number(value) + "\n";
    }
    o.text = o.csv;
    return o;
}

int exit_code(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Parse: return kParse;
    case ErrorCategory::Domain: return kDomain;
    case ErrorCategory::Convergence: return kConvergence;
    case ErrorCategory::NoClosedForm: return kNoClosedForm;
    }
    return kUsage;
}

// Requested format, read before CLI11 runs so usage errors can honour it too.
std::string sniff_format(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--format" && i + 1 < args.size())
            return args[i + 1];
        if (args[i].rfind("--format=", 0) == 0)
            return args[i].substr(9);
    }
    return "text";
}

void emit_envelope(std::ostream& out, const std::string& command, const json& inputs, const json& result,
                   const json& diagnostics) {
    json envelope = {{"command", command},
                     {"inputs", inputs},
                     {"result", result},
                     {"diagnostics", diagnostics},
                     {"version", version()}};
    out << write_json(envelope) << "\n";
}

json echo_inputs(const CLI::App& sub) {
    json inputs = json::object();
    for (const CLI::Option* o : sub.get_options()) {
        if (o->get_name() == "--help" || o->get_name() == "--format" || o->count() == 0)
            continue;
        std::string name = o->get_single_name();
        const std::string raw = o->as<std::string>();
        if (o->get_type_size() == 0) {
            inputs[name] = true;
            continue;
        }
        if (o->get_positional()) {
            inputs[name] = raw;
            continue;
        }
        double v = 0.0;
        const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (res.ec == std::errc() && res.ptr == raw.data() + raw.size() && std::isfinite(v))
            inputs[name] = v;
        else
            inputs[name] = raw;
    }
    return inputs;
}

void add_quad_options(CLI::App* sub, Options& opt) {
    sub->add_option("--rel-tol", opt.quad.rel_tol, "Relative tolerance of the inner quadrature")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--abs-tol", opt.quad.abs_tol, "Absolute tolerance of the inner quadrature")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-levels", opt.quad.max_levels, "Maximum tanh-sinh refinement levels")
        ->capture_default_str()
        ->check(CLI::Range(1, 20));
}

void add_interval(CLI::App* sub, Options& opt) {
    sub->add_option("--from", opt.from, "Lower bound a")->required();
    sub->add_option("--to", opt.to, "Upper bound b")->required();
}

void add_expression(CLI::App* sub, Options& opt) {
    sub->add_option("expr", opt.expression, "Expression in x, e.g. \"x^x\" or \"e^(1/x)\"")->required();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Multiplicative (star) calculus engine", "starcalc"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    app.add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();

    std::map<CLI::App*, std::function<Outcome(const Options&)>> handlers;
    auto command = [&](const std::string& name, const std::string& help,
                       std::function<Outcome(const Options&)> fn) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        handlers[sub] = std::move(fn);
        return sub;
    };

    auto* starint = command("starint", "Definite star-integral of expr over [a, b]", cmd_starint);
    add_expression(starint, opt);
    add_interval(starint, opt);
    starint->add_option("--method", opt.method, "quad (default) or riemann")
        ->check(CLI::IsMember({"quad", "riemann"}));
    starint->add_option("--n", opt.n, "Midpoints for the riemann method")->capture_default_str()->check(
        CLI::PositiveNumber);
    add_quad_options(starint, opt);

    auto* starderiv = command("starderiv", "Star-derivative of expr at a point", cmd_starderiv);
    add_expression(starderiv, opt);
    starderiv->add_option("--at", opt.at, "Evaluation point")->required();
    starderiv->add_option("--order", opt.order, "Derivative order")->capture_default_str()->check(
        CLI::Range(1, 12));
    starderiv->add_option("--method", opt.method, "symbolic (default) or numeric")
        ->check(CLI::IsMember({"symbolic", "numeric"}));
    starderiv->add_option("--step", opt.step, "Numeric step override");
    starderiv->add_flag("--one-sided", opt.one_sided, "Use the one-sided quotient (order 1, numeric)");

    auto* anti = command("antiderivative", "Closed-form indefinite star-integral", cmd_antiderivative);
    add_expression(anti, opt);

    auto* taylor = command("taylor", "Product-form Taylor coefficients", cmd_taylor);
    add_expression(taylor, opt);
    taylor->add_option("--center", opt.center, "Expansion center c")->required();
    taylor->add_option("--terms", opt.terms, "Highest order n")->required()->check(CLI::Range(0, 64));
    taylor->add_option("--eval", opt.eval_at, "Evaluate the truncated product at x");

    auto* mvt = command("mvt", "Mean value point for the star-integral or star-derivative", cmd_mvt);
    add_expression(mvt, opt);
    add_interval(mvt, opt);
    mvt->add_option("--kind", opt.kind, "integral or derivative")
        ->required()
        ->check(CLI::IsMember({"integral", "derivative"}));

    auto* check = command("check", "Randomized inequality trials", cmd_check);
    check->add_option("--inequality", opt.inequality, "concavity, eq3, eq4, eq5 or amgm")
        ->required()
        ->check(CLI::IsMember({"concavity", "eq3", "eq4", "eq5", "amgm"}));
    check->add_option("--trials", opt.trials, "Number of trials")->capture_default_str()->check(
        CLI::PositiveNumber);
    check->add_option("--seed", opt.seed, "Seed")->capture_default_str();

    auto* gt = command("gtransform", "Generalized integral G(integral of G^-1(f))", cmd_gtransform);
    add_expression(gt, opt);
    add_interval(gt, opt);
    gt->add_option("--g", opt.transform, "exp, id, log or square")
        ->required()
        ->check(CLI::IsMember({"exp", "id", "log", "square"}));
    add_quad_options(gt, opt);

    auto* sample = command("sample", "CSV samples for plotting", cmd_sample);
    add_expression(sample, opt);
    add_interval(sample, opt);
    sample->add_option("--op", opt.op, "starint-cumulative or starderiv")
        ->required()
        ->check(CLI::IsMember({"starint-cumulative", "starderiv"}));
    sample->add_option("--points", opt.points, "Number of sample points")->required()->check(
        CLI::PositiveNumber);
    add_quad_options(sample, opt);

    const bool json_mode = sniff_format(args) == "json";
    std::string command_name;
    json inputs = json::object();

    auto fail = [&](int code, const std::string& message) {
        err << "error: " << message << "\n";
        if (json_mode)
            emit_envelope(out, command_name, inputs, nullptr,
                          json::array({json{{"level", "error"}, {"message", message}}}));
        return code;
    };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << version() << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        for (CLI::App* sub : app.get_subcommands())
            command_name = sub->get_name();
        return fail(kUsage, e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    command_name = sub->get_name();
    inputs = echo_inputs(*sub);
    const Format format = opt.format == "json" ? Format::Json : opt.format == "csv" ? Format::Csv : Format::Text;
    if (format == Format::Csv && command_name != "sample")
        return fail(kUsage, "csv output is only available for sample");

    Outcome outcome;
    try {
        outcome = handlers.at(sub)(opt);
    } catch (const Error& e) {
        return fail(exit_code(e.category()), e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kUsage, e.what());
    }

    switch (format) {
    case Format::Json:
        emit_envelope(out, command_name, inputs, outcome.result, outcome.diagnostics);
        break;
    case Format::Csv:
        out << outcome.csv;
        break;
    case Format::Text:
        out << outcome.text;
        if (outcome.text.empty() || outcome.text.back() != '\n')
            out << "\n";
        for (const auto& d : outcome.diagnostics)
            if (d["level"] != "info")
                err << d["level"].get<std::string>() << ": " << d["message"].get<std::string>() << "\n";
        break;
    }
    return kOk;
}

} // namespace starcalc::cli
