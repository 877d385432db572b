#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kschem/cli.hpp"
#include "kschem/errors.hpp"
#include "kschem/report.hpp"

using namespace kschem;

namespace {
struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "kschem");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path tmp(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("kschem_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("classify") {
    const Run r = run({"classify", "--N", "1", "--alpha", "1.5"});
    CHECK(r.code == 0);
    CHECK(r.out == "kappa=-1 very_singular\n");
    CHECK(run({"classify", "--N", "3", "--alpha", "2"}).out == "kappa=0.5 regular\n");
    CHECK(run({"classify", "--N", "2", "--alpha", "1"}).code == 2);
    CHECK(run({"classify", "--N", "2", "--alpha", "1", "--kappa", "-1"}).code == 0);
}

TEST_CASE("validation and usage errors exit 2") {
    const Run r = run({"solve", "--N", "3", "--alpha", "1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("InvalidScaling") != std::string::npos);
    CHECK(run({"solve", "--N", "1", "--alpha", "2", "--chi", "0"}).code == 2);
    CHECK(run({"solve", "--bogus", "1"}).code == 2);
    CHECK(run({"critical", "--N", "1", "--alpha", "2", "--lo", "0.01", "--hi", "0.02"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("numerical failure exits 3") {
    CHECK(run({"critical", "--N", "1", "--alpha", "2", "--lo", "0.01", "--hi", "100", "--max-iter", "3"}).code == 3);
}

TEST_CASE("critical report round trip and determinism") {
    const auto path = tmp("crit.json");
    const std::vector<std::string> args = {"critical", "--N",  "1",    "--alpha", "2",     "--Du",
                                           "1",        "--Dv", "1",    "--chi",   "1",     "--lo",
                                           "0.01",     "--hi", "100",  "--out",   path.string()};
    REQUIRE(run(args).code == 0);
    const std::string first = slurp(path);
    REQUIRE(run(args).code == 0);
    CHECK(slurp(path) == first);
    const json j = json::parse(first);
    CHECK(j["lambda_star"].get<double>() == doctest::Approx(1.01438035758).epsilon(1e-4));
    CHECK_NOTHROW(validate_report(j, ReportKind::Critical));
    CHECK(run({"check", "--kind", "critical", "--in", path.string()}).code == 0);
    CHECK(run({"check", "--kind", "mass", "--in", path.string()}).code == 2);
    std::filesystem::remove(path);
}

TEST_CASE("solve csv") {
    const Run r = run({"solve", "--N", "1", "--alpha", "2", "--lambda", "0.05", "--r-max", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("r,phi,dphi,theta,g_eta\n", 0) == 0);
    CHECK(r.out == run({"solve", "--N", "1", "--alpha", "2", "--lambda", "0.05", "--r-max", "5"}).out);
}

TEST_CASE("json subcommands validate") {
    struct Case {
        std::vector<std::string> args;
        ReportKind kind;
    };
    const std::vector<Case> cases = {
        {{"mass", "--N", "1", "--alpha", "2", "--A", "0.5", "--B", "1"}, ReportKind::Mass},
        {{"residual", "--N", "1", "--alpha", "2", "--A", "0.5", "--B", "1"}, ReportKind::Residual},
        {{"variational", "--N", "1", "--alpha", "1.5", "--nodes", "1000"}, ReportKind::Variational},
        {{"solve", "--N", "1", "--alpha", "2", "--lambda", "0.05", "--format", "json"}, ReportKind::Solve},
    };
    for (const auto& c : cases) {
        const Run r = run(c.args);
        CAPTURE(c.args[0]);
        REQUIRE(r.code == 0);
        CHECK_NOTHROW(validate_report(json::parse(r.out), c.kind));
    }
}

TEST_CASE("eigen and reconstruct csv") {
    const Run e = run({"eigen", "--N", "2", "--delta", "0.25", "--R", "2,5,10"});
    REQUIRE(e.code == 0);
    CHECK(e.out.rfind("R,lambda\n", 0) == 0);
    const Run r = run({"reconstruct", "--N", "1", "--alpha", "2", "--A", "0.5", "--B", "1", "--t", "1", "--points", "3",
                       "--x-max", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,x,u,v\n", 0) == 0);
    CHECK(run({"reconstruct", "--N", "1", "--alpha", "2", "--A", "0.5", "--B", "1", "--lambda", "0.7"}).code == 2);
}

TEST_CASE("sweep rows in input order") {
    const std::vector<std::string> args = {"sweep",         "--N",     "1", "--alpha-min", "2.0", "--alpha-max",
                                           "3.0",           "--alpha-steps", "3", "--threads", "2", "--tol-rel", "1e-6"};
    const Run a = run(args);
    REQUIRE(a.code == 0);
    std::istringstream is(a.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "alpha,kappa,class,lambda_star,M_star");
    std::vector<std::string> rows;
    while (std::getline(is, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("2,", 0) == 0);
    CHECK(rows[1].rfind("2.5,", 0) == 0);
    CHECK(rows[2].rfind("3,", 0) == 0);
    CHECK(run(args).out == a.out);
}

TEST_CASE("env override of tolerances") {
    setenv("KSCHEM_R_MAX", "3", 1);
    const Run r = run({"solve", "--N", "1", "--alpha", "2", "--lambda", "0.05"});
    unsetenv("KSCHEM_R_MAX");
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string line, last;
    while (std::getline(is, line)) last = line;
    CHECK(std::stod(last.substr(0, last.find(','))) == doctest::Approx(3.0));
}

TEST_CASE("report helpers") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    json bad = json::object();
    bad["lambda_star"] = "x";
    CHECK_THROWS_AS(validate_report(bad, ReportKind::Critical), InvalidParameter);
}
