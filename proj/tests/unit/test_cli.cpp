#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "starcalc/cli.hpp"

using nlohmann::json;
using namespace starcalc::cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args, int expected_code = 0) {
    args.push_back("--format");
    args.push_back("json");
    const Run r = run_cli(args);
    REQUIRE(r.code == expected_code);
    return json::parse(r.out);
}

void check_envelope(const json& j) {
    REQUIRE(j.is_object());
    CHECK(j.size() == 5);
    CHECK(j.at("command").is_string());
    CHECK(j.at("inputs").is_object());
    CHECK(j.contains("result"));
    REQUIRE(j.at("diagnostics").is_array());
    for (const auto& d : j.at("diagnostics")) {
        CHECK(d.at("level").is_string());
        CHECK(d.at("message").is_string());
    }
    CHECK(j.at("version") == version());
}

} // namespace

TEST_CASE("starint") {
    auto j = run_json({"starint", "x", "--from", "0", "--to", "1"});
    check_envelope(j);
    CHECK(j["command"] == "starint");
    CHECK(std::abs(j["result"].get<double>() - std::exp(-1.0)) <= 1e-9);
    CHECK(j["inputs"]["expr"] == "x");
    CHECK(j["inputs"]["from"] == 0);

    CHECK(run_json({"starint", "1", "--from", "3", "--to", "7"})["result"] == 1);
    CHECK(run_json({"starint", "x", "--from", "1", "--to", "0"})["result"].get<double>() ==
          doctest::Approx(std::numbers::e).epsilon(1e-9));
    const auto riemann = run_json({"starint", "x", "--from", "0", "--to", "1", "--method", "riemann", "--n", "1000"});
    CHECK(riemann["result"].get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-2));
    const auto huge = run_json({"starint", "e^(800*x)", "--from", "1", "--to", "2"});
    CHECK(huge["result"] == "+inf");
    CHECK(huge["diagnostics"][0]["message"] == "convergence class: DivergentToInfinity");
}

TEST_CASE("starderiv") {
    CHECK(run_json({"starderiv", "x^x", "--at", "3"})["result"].get<double>() ==
          doctest::Approx(3 * std::numbers::e).epsilon(1e-14));
    CHECK(run_json({"starderiv", "5", "--at", "1"})["result"] == 1);
    const double numeric = run_json({"starderiv", "x", "--at", "2", "--method", "numeric"})["result"];
    CHECK(std::abs(numeric - std::exp(0.5)) <= 1e-6 * std::exp(0.5));
    CHECK(run_json({"starderiv", "x", "--at", "2", "--method", "numeric", "--step", "1e-14"}, kConvergence)["result"]
              .is_null());
}

TEST_CASE("antiderivative") {
    CHECK(run_json({"antiderivative", "e^x"})["result"] == "C*e^(x^2/2)");
    CHECK(run_json({"antiderivative", "1"})["result"] == "C");
    CHECK(run_json({"antiderivative", "e^(2/x)"})["result"] == "C*x^2");
    const auto none = run_json({"antiderivative", "log(x)"}, kNoClosedForm);
    check_envelope(none);
    CHECK(none["diagnostics"][0]["level"] == "error");
}

TEST_CASE("taylor") {
    const auto j = run_json({"taylor", "e^x", "--center", "0", "--terms", "3"});
    const auto a = j["result"]["coefficients"];
    REQUIRE(a.size() == 4);
    CHECK(a[0] == 1);
    CHECK(a[1].get<double>() == doctest::Approx(std::numbers::e).epsilon(1e-15));
    CHECK(a[2] == 1);
    CHECK(a[3] == 1);
    CHECK(run_json({"taylor", "x", "--center", "1", "--terms", "2", "--eval", "1"})["result"]["value"] == 1);
    const double v = run_json({"taylor", "x", "--center", "1", "--terms", "30", "--eval", "1.5"})["result"]["value"];
    CHECK(std::abs(v - 1.5) <= 1e-6);
}

TEST_CASE("mvt") {
    const double c = run_json({"mvt", "e^(1/x)", "--from", "1", "--to", "2", "--kind", "integral"})["result"]["c"];
    CHECK(std::abs(c - 1.4426950408889634) <= 1e-8);
    const auto flat = run_json({"mvt", "3", "--from", "1", "--to", "2", "--kind", "integral"});
    CHECK(flat["result"]["c"] == 1.5);
    CHECK(flat["result"]["flag"] == "ConstantFunction");
    const double d = run_json({"mvt", "x^2", "--from", "1", "--to", "2", "--kind", "derivative"})["result"]["c"];
    CHECK(d == doctest::Approx(1 / std::numbers::ln2).epsilon(1e-10));
}

TEST_CASE("check") {
    const auto eq4 = run_json({"check", "--inequality", "eq4", "--trials", "1000", "--seed", "42"});
    CHECK(eq4["result"]["violations"] == 0);
    CHECK(eq4["result"]["trials"] == 1000);
    CHECK(eq4["result"]["seed"] == 42);
    const auto eq5 = run_json({"check", "--inequality", "eq5", "--trials", "500", "--seed", "7"});
    CHECK(eq5["result"]["violations"] == 0);
    CHECK(eq5["result"]["worst_margin"].get<double>() >= 0);
    const auto a = run_cli({"check", "--inequality", "eq3", "--trials", "1", "--seed", "9", "--format", "json"});
    const auto b = run_cli({"check", "--inequality", "eq3", "--trials", "1", "--seed", "9", "--format", "json"});
    CHECK(a.out == b.out);
}

TEST_CASE("gtransform") {
    CHECK(run_json({"gtransform", "x", "--g", "square", "--from", "0", "--to", "1"})["result"].get<double>() ==
          doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(run_json({"gtransform", "x", "--g", "id", "--from", "0", "--to", "1"})["result"].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-14));
    const double g = run_json({"gtransform", "x", "--g", "exp", "--from", "0", "--to", "1"})["result"];
    const double s = run_json({"starint", "x", "--from", "0", "--to", "1"})["result"];
    CHECK(g == doctest::Approx(s).epsilon(1e-12));
    run_json({"gtransform", "x", "--g", "square", "--from", "1", "--to", "0"}, kDomain);
}

TEST_CASE("sample") {
    const Run r = run_cli({"sample", "x", "--op", "starint-cumulative", "--from", "0", "--to", "1", "--points", "11",
                           "--format", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,value");
    std::vector<std::pair<double, double>> rows;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    REQUIRE(rows.size() == 11);
    CHECK(rows.front().second == 1);
    CHECK(rows.back().first == 1);
    CHECK(rows.back().second == doctest::Approx(0.36788).epsilon(1e-5));
    CHECK(r.out.find('\r') == std::string::npos);

    const auto single = run_json({"sample", "x", "--op", "starderiv", "--from", "1", "--to", "2", "--points", "1"});
    REQUIRE(single["result"].size() == 1);
    CHECK(single["result"][0]["x"] == 2);

    // f > 1 gives an increasing cumulative star-integral.
    const auto inc = run_json({"sample", "x+1", "--op", "starint-cumulative", "--from", "0.5", "--to", "3",
                               "--points", "20"});
    for (std::size_t i = 1; i < inc["result"].size(); ++i)
        CHECK(inc["result"][i]["value"].get<double>() > inc["result"][i - 1]["value"].get<double>());
}

TEST_CASE("exit codes and failure envelopes") {
    const auto parse = run_json({"starint", "x+", "--from", "0", "--to", "1"}, kParse);
    check_envelope(parse);
    CHECK(parse["result"].is_null());
    check_envelope(run_json({"starint", "log(x)", "--from", "0", "--to", "2"}, kDomain));
    check_envelope(run_json({"starint", "x", "--from", "0", "--to", "1", "--max-levels", "1", "--rel-tol", "1e-300",
                             "--abs-tol", "1e-300"},
                            kConvergence));
    check_envelope(run_json({"antiderivative", "x^2+1"}, kNoClosedForm));
    check_envelope(run_json({"starint", "x", "--from", "0"}, kUsage));
    check_envelope(run_json({"frobnicate"}, kUsage));

    const Run text = run_cli({"starint", "x+", "--from", "0", "--to", "1"});
    CHECK(text.code == kParse);
    CHECK(text.out.empty());
    CHECK(text.err.find("parse error at offset 2") != std::string::npos);
    CHECK(run_cli({"starint", "x", "--from", "0", "--to", "1", "--format", "csv"}).code == kUsage);
    CHECK(run_cli({"--version"}).out == version() + "\n");
    CHECK(run_cli({"--help"}).code == kOk);
}

TEST_CASE("identical invocations give identical bytes") {
    const std::vector<std::vector<std::string>> cases = {
        {"starint", "x^x", "--from", "0", "--to", "2", "--format", "json"},
        {"taylor", "x", "--center", "1", "--terms", "7", "--eval", "1.3", "--format", "json"},
        {"check", "--inequality", "concavity", "--trials", "20", "--seed", "3", "--format", "json"},
        {"sample", "x", "--op", "starderiv", "--from", "1", "--to", "2", "--points", "5", "--format", "json"},
    };
    for (const auto& args : cases) {
        const Run a = run_cli(args);
        const Run b = run_cli(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        check_envelope(json::parse(a.out));
    }
}
