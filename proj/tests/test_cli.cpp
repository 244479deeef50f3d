#include "doctest.h"

#include "wguide/cli.hpp"
#include "wguide/specfun.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace wguide;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

std::vector<std::string> data_lines(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream is(s);
    std::string l;
    while (std::getline(is, l))
        if (!l.empty() && l[0] != '#') v.push_back(l);
    return v;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("toy prints one row with diagnostics")
{
    auto r = cli({"toy", "--n", "1", "--kappa", "0.05"});
    REQUIRE(r.code == 0);
    auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "kappa,n,lambda_exact,first_term,lambda_asymptotic,residual");
    CHECK(r.out.find("# subcommand=toy") != std::string::npos);
    CHECK(r.out.find("# kappa=0.050000000000000003") != std::string::npos);
}

TEST_CASE("numbers carry 17 significant digits")
{
    auto r = cli({"airy", "--n", "1"});
    auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 2);
    std::string zero = lines[1].substr(lines[1].find(',') + 1);
    zero = zero.substr(0, zero.find(','));
    CHECK(zero.size() == std::string("2.3381074104597670e+00").size());
    CHECK(std::stod(zero) == airy_zero(1));
}

TEST_CASE("JSON mirrors CSV")
{
    auto c = cli({"airy", "--n", "3"});
    auto j = cli({"airy", "--n", "3", "--format", "json"});
    REQUIRE(j.code == 0);
    auto doc = nlohmann::json::parse(j.out);
    auto lines = data_lines(c.out);
    REQUIRE(doc["rows"].size() == lines.size() - 1);
    CHECK(doc["columns"][1] == "zero");
    CHECK(doc["rows"][2][1].get<double>() == airy_zero(3));
    CHECK(doc["config"]["subcommand"] == "airy");
}

TEST_CASE("identical configuration gives identical bytes")
{
    std::vector<std::string> a = {"bo", "--operator", "tri", "--ladder", "0.1:0.5:3", "--n-eigs", "2"};
    auto r1 = cli(a), r2 = cli(a);
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(data_lines(r1.out).size() == 7);
}

TEST_CASE("usage errors exit 2")
{
    CHECK(cli({}).code == 2);
    CHECK(cli({"nosuch"}).code == 2);
    CHECK(cli({"toy", "--kappa", "-0.1"}).code == 2);
    CHECK(cli({"toy", "--kappa", "0.1", "--format", "xml"}).code == 2);
    CHECK(cli({"toy", "--ladder", "0.1:2:3"}).code == 2);
    CHECK(cli({"toy", "--ladder", "garbage"}).code == 2);
    CHECK(cli({"toy"}).code == 2);
    CHECK(cli({"tri", "--h", "0.1", "--element-order", "3"}).code == 2);
    CHECK(cli({"verify", "nosuch"}).code == 2);
    CHECK(cli({"bo", "--h", "0.1", "--operator", "square"}).code == 2);
}

TEST_CASE("computation failures exit 1 with a structured report")
{
    auto r = cli({"toy", "--n", "40", "--kappa", "0.5"});
    CHECK(r.code == 1);
    auto j = nlohmann::json::parse(r.err);
    CHECK(j["error"] == "NoBoundState");
    CHECK(j["subcommand"] == "toy");
}

TEST_CASE("output file embeds the configuration")
{
    std::string path = "cli_test_out.csv";
    auto r = cli({"toy-branch", "--n", "1", "--ladder", "0.2:0.5:4", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str().rfind("# subcommand=toy-branch", 0) == 0);
    CHECK(data_lines(ss.str()).size() == 5);
    std::remove(path.c_str());
}

TEST_CASE("fit from a file")
{
    std::string path = "cli_fit_in.csv";
    {
        std::ofstream f(path);
        f << "param,value,error\n";
        for (int i = 0; i < 8; ++i) {
            double h = 0.2 * std::pow(0.7, i);
            f.precision(17);
            f << h << ',' << 0.125 + 0.3 * std::pow(h, 2.0 / 3.0) << ",1e-13\n";
        }
    }
    auto r = cli({"fit", "--family", "tri", "--order", "2", "--input", path, "--format", "json"});
    std::remove(path.c_str());
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"][0][1].get<double>() == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(j["rows"][2][1].get<double>() == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("quasimode table")
{
    auto r = cli({"quasimode", "--family", "toy", "--order", "2"});
    REQUIRE(r.code == 0);
    CHECK(data_lines(r.out).size() == 4);
}

TEST_CASE("guide at a physical opening stays below the threshold")
{
    auto r = cli({"guide", "--theta", "0.5", "--n-eigs", "3", "--format", "json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["rows"].size() >= 1);
    for (auto& row : j["rows"]) CHECK(row[2].get<double>() < 1.0);
}

TEST_CASE("verify runs a canned pipeline")
{
    auto r = cli({"verify", "spectrumBOT"});
    CHECK(r.code == 0);
    CHECK(r.err.find("criterion 4 PASS") != std::string::npos);
}

}
