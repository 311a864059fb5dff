#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "quadent/report.hpp"

using namespace quadent;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "quadent");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = report::run_command(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
    const std::string path = "quadent_test_" + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("run report for generic dcr") {
    const auto r = cli({"run", "--equation", "dcr", "--diagonal", "++", "--steps", "7", "--no-timing"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["command"] == "run");
    CHECK(j["equation"] == "dcr");
    CHECK(j["mode"]["kind"] == "fundamental");
    CHECK(j["mode"]["diagonal"] == "++");
    CHECK(j["steps"] == 7);
    CHECK(j["trials"] == 3);
    CHECK(j["prime"] == 2305843009213693951ULL);
    CHECK(j["timing_ms"] == 0.0);
    REQUIRE(j["sequences"].size() == 1);
    const auto& s = j["sequences"][0];
    CHECK(s["values"] == json::array({1, 2, 4, 9, 21, 50, 120, 289}));
    CHECK(s["disagreements"] == 0);
    CHECK(s["seeds"].size() == 3);
    CHECK(s["fit"]["order"] == 3);
    CHECK(s["fit"]["coefficients"] == json::array({3, -1, -1}));
    CHECK(s["fit"]["gf_numerator"] == json::array({1, -1, -1}));
    CHECK(s["fit"]["gf_denominator"] == json::array({1, -3, 1, 1}));
    CHECK(std::abs(s["entropy"]["value"].get<double>() - std::log(1 + std::sqrt(2.0))) < 1e-12);
    CHECK(s["entropy"]["growth"] == "exponential");
    CHECK(s["entropy"]["witness"] == json::array({1, 1, -3, 1}));
    CHECK(s["polynomial_growth"].is_null());
    CHECK(j["fit"] == s["fit"]);
    CHECK(j["entropy"] == s["entropy"]);

    const auto timed = cli({"run", "--equation", "dcr", "--diagonal", "++", "--steps", "3"});
    CHECK(json::parse(timed.out)["timing_ms"].get<double>() > 0.0);
}

TEST_CASE("fit command on a geometric sequence") {
    const auto r = cli({"fit", "--sequence", "1,2,4,8,16,32,64"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["command"] == "fit");
    CHECK(j["mode"].is_null());
    CHECK(j["fit"]["order"] == 1);
    CHECK(j["fit"]["coefficients"] == json::array({2}));
    CHECK(j["fit"]["gf_denominator"] == json::array({1, -2}));
    CHECK(std::abs(j["entropy"]["value"].get<double>() - std::log(2.0)) < 1e-12);
}

TEST_CASE("integrable dcr reports polynomial growth") {
    const auto r = cli({"run", "--equation", "dcr", "--params", "integrable", "--diagonal", "--",
                        "--steps", "10", "--no-timing"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["equation"] == "dcr-integrable");
    CHECK(j["params_mode"] == "integrable");
    const auto& s = j["sequences"][0];
    CHECK(s["values"] == json::array({1, 2, 4, 7, 11, 16, 22, 29, 37, 46, 56}));
    CHECK(s["entropy"]["value"] == 0.0);
    CHECK(s["entropy"]["growth"] == "polynomial");
    CHECK(s["entropy"]["growth_degree"] == 2);
    CHECK(s["entropy"]["cyclotomic"] == json::parse(R"([{"index":1,"multiplicity":3}])"));
    CHECK(s["polynomial_growth"]["degree"] == 2);
    CHECK(s["polynomial_growth"]["coefficients"] == json::array({"1", "1/2", "1/2"}));

    const auto text = cli({"run", "--equation", "dcr", "--params", "integrable", "--diagonal", "--",
                           "--steps", "10", "--format", "text"});
    CHECK(text.code == 0);
    CHECK(text.out.find("(1 - s)^3") != std::string::npos);
    CHECK(text.out.find("1, 2, 4, 7, 11, 16, 22, 29, 37, 46, 56") != std::string::npos);
}

TEST_CASE("reports are reproducible") {
    const std::vector<std::string> args = {"run", "--equation", "q4", "--lambda", "2,1",
                                           "--steps", "3", "--seed", "17", "--no-timing"};
    const auto a = cli(args);
    const auto b = cli(args);
    auto serial = args;
    serial.push_back("--serial");
    const auto c = cli(serial);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    auto other = args;
    other[8] = "18";
    const auto d = json::parse(cli(other).out);
    CHECK(d["sequences"][0]["values"] == json::parse(a.out)["sequences"][0]["values"]);
    CHECK(d["sequences"][0]["seeds"] != json::parse(a.out)["sequences"][0]["seeds"]);
}

TEST_CASE("json round trip") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"run", "--equation", "dsg", "--lambda", "1,2", "--steps", "3"},
             {"run", "--equation", "aniso", "--diagonal", "-+", "--steps", "6"},
             {"fit", "--sequence", "1,3,7,13,21,31,43"}}) {
        const auto r = cli(args);
        const auto j = json::parse(r.out);
        CHECK(report::to_json(report::from_json(j)) == j);
    }
}

TEST_CASE("staircase borders and filter") {
    const auto both = json::parse(
        cli({"run", "--equation", "dsg", "--lambda", "1,2", "--steps", "3", "--no-timing"}).out);
    REQUIRE(both["sequences"].size() == 2);
    CHECK(both["mode"]["kind"] == "staircase");
    CHECK(both["mode"]["lambda"] == json::array({1, 2}));
    CHECK(both["sequences"][0]["border"] == 1);
    CHECK(both["sequences"][0]["values"] == json::array({1, 4, 11, 21}));
    CHECK(both["sequences"][1]["values"] == json::array({1, 3, 4, 8, 11, 16, 21}));

    const auto only2 = cli({"run", "--equation", "dsg", "--lambda", "1,2", "--steps", "3",
                            "--border", "2", "--format", "csv"});
    std::istringstream csv(only2.out);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "border,n,degree");
    int rows = 0;
    while (std::getline(csv, line)) {
        CHECK(line.rfind("2,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 7);
    CHECK(cli({"run", "--equation", "dsg", "--lambda", "-1,2", "--steps", "2"}).code != 1);
}

TEST_CASE("exit codes") {
    auto code = [](std::vector<std::string> a) { return cli(std::move(a)).code; };
    CHECK(code({"run", "--equation", "nope", "--diagonal", "++", "--steps", "3"}) == 1);
    CHECK(cli({"run", "--equation", "nope", "--diagonal", "++", "--steps", "3"}).err.find(
              "unknown builtin") != std::string::npos);
    CHECK(code({"run", "--equation", "dcr", "--steps", "3"}) == 1);
    CHECK(code({"run", "--equation", "dcr", "--diagonal", "++"}) == 1);
    CHECK(code({"run", "--equation", "dcr", "--diagonal", "+", "--steps", "3"}) == 1);
    CHECK(code({"run", "--equation", "dcr", "--diagonal", "++", "--lambda", "1,2", "--steps", "3"}) == 1);
    CHECK(code({"run", "--equation", "dcr", "--lambda", "0,2", "--steps", "3"}) == 1);
    CHECK(code({"run", "--equation", "dcr", "--diagonal", "++", "--steps", "3", "--prime", "15"}) == 1);
    CHECK(code({"run", "--equation", "dsg", "--params", "integrable", "--diagonal", "++", "--steps", "3"}) == 1);
    CHECK(code({"fit", "--sequence", "1,2,x"}) == 1);
    CHECK(code({}) == 1);

    const auto file = temp_file("one_way.eq", "relation y00*y10 + y01\n");
    CHECK(code({"run", "--equation-file", file, "--diagonal", "-+", "--steps", "3"}) == 1);
    CHECK(code({"run", "--equation-file", file, "--params", "integrable", "--diagonal", "++",
                "--steps", "3"}) == 1);

    const auto singular = temp_file("singular.eq", "relation y11*(y00 - y10) + y00 - y10\n");
    const auto s = cli({"run", "--equation-file", singular, "--diagonal", "-+", "--steps", "3"});
    CHECK(s.code == 2);
    CHECK(s.err.find("singular evolution") != std::string::npos);

    CHECK(code({"fit", "--sequence", "1,2,5,11,25,55,124"}) == 3);
    CHECK(code({"run", "--equation", "q4", "--lambda", "1,2", "--steps", "2"}) == 3);
    std::remove(file.c_str());
    std::remove(singular.c_str());
}

TEST_CASE("equation files") {
    const auto good = temp_file("good.eq", "# translation\nparams a\nrelation y11 - a*y00\n");
    const auto r = cli({"run", "--equation-file", good, "--diagonal", "-+", "--steps", "4",
                        "--no-timing"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["sequences"][0]["values"] == json::array({1, 1, 1, 1, 1}));

    const auto bad = temp_file("bad.eq", "params a\nrelation y00 +* y11\n");
    const auto e = cli({"run", "--equation-file", bad, "--diagonal", "-+", "--steps", "3"});
    CHECK(e.code == 1);
    CHECK(e.err.find(bad + ": line 2, column") != std::string::npos);
    std::remove(good.c_str());
    std::remove(bad.c_str());
}

TEST_CASE("list and output files") {
    const auto l = cli({"list"});
    CHECK(l.code == 0);
    for (const char* n : {"dcr", "dcr-integrable", "q4", "q4-constrained", "dsg", "aniso"})
        CHECK(l.out.find(n) != std::string::npos);

    const std::string path = "quadent_test_out.json";
    const auto r = cli({"fit", "--sequence", "1,1,1,1,1", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    const auto j = json::parse(in);
    CHECK(j["fit"]["order"] == 1);
    std::remove(path.c_str());
}

TEST_CASE("factored denominators") {
    using analysis::IntPoly;
    const auto P = [](std::initializer_list<long long> c) { return IntPoly::from_ints(c); };
    CHECK(report::factored_denominator({P({1}), P({1, -3, 3, -1})}) == "(1 - s)^3");
    CHECK(report::factored_denominator({P({1}), P({1, -1}) * P({1, -2, -1})}) ==
          "(1 - 2*s - s^2) (1 - s)");
    CHECK(report::factored_denominator(
              {P({1}), P({1, 1}) * P({1, 1, 1}) * P({1, -3, 3, -1})}) ==
          "(1 + s) (1 + s + s^2) (1 - s)^3");
    CHECK(report::factored_denominator({P({1}), P({1})}) == "1");
}
