#include "doctest.h"

#include "wguide/asympt.hpp"
#include "wguide/model1d.hpp"
#include "wguide/specfun.hpp"

#include "json.hpp"

#include <cmath>
#include <random>

using namespace wguide;

namespace {

LadderSample synthetic(int count, double err = 1e-14)
{
    LadderSample s;
    s.params = geometric_ladder(0.2, 0.7, count);
    for (double h : s.params) {
        s.values.push_back(0.125 + 0.3 * std::pow(h, 2.0 / 3.0) + 0.05 * h);
        s.errors.push_back(err);
    }
    return s;
}

}  // namespace

TEST_SUITE("asympt") {

TEST_CASE("exact synthetic data is recovered")
{
    auto f = fit_expansion(synthetic(10), {0.0, 2.0 / 3.0, 1.0});
    CHECK(std::fabs(f.coefficient_at(0.0) - 0.125) < 1e-12);
    CHECK(std::fabs(f.coefficient_at(2.0 / 3.0) - 0.3) < 1e-12);
    CHECK(std::fabs(f.coefficient_at(1.0) - 0.05) < 1e-12);
    CHECK_FALSE(f.ill_conditioned);
}

TEST_CASE("too few samples")
{
    CHECK_THROWS_AS(fit_expansion(synthetic(2), {0.0, 1.0 / 3.0, 2.0 / 3.0}), PreconditionError);
}

TEST_CASE("ladder validation")
{
    LadderSample s = synthetic(5);
    s.params[3] *= 1.01;
    CHECK_THROWS_AS(s.validate(), PreconditionError);
    s = synthetic(5);
    s.errors[1] = 0.0;
    CHECK_THROWS_AS(s.validate(), PreconditionError);
    CHECK_THROWS_AS(geometric_ladder(0.2, 1.5, 4), PreconditionError);
}

TEST_CASE("fits scale linearly with the data")
{
    LadderSample s = synthetic(10);
    auto f = fit_expansion(s, {0.0, 2.0 / 3.0, 1.0});
    for (auto& v : s.values) v *= 3.0;
    for (auto& e : s.errors) e *= 3.0;
    auto g = fit_expansion(s, {0.0, 2.0 / 3.0, 1.0});
    for (size_t k = 0; k < 3; ++k) CHECK(g.coefficients[k] == doctest::Approx(3.0 * f.coefficients[k]).epsilon(1e-10));
}

TEST_CASE("toy ladder recovers the Airy zero")
{
    LadderSample s;
    s.params = geometric_ladder(0.2, 0.7, 10);
    for (double k : s.params) {
        s.values.push_back(toy_eigenvalue_exact(1, k));
        s.errors.push_back(1e-12);
    }
    std::vector<double> ex;
    for (int j = 0; j <= 4; ++j) ex.push_back((2.0 + j) / 3.0);
    auto f = fit_expansion(s, ex);
    CHECK(std::fabs(f.coefficient_at(2.0 / 3.0) - airy_zero(1)) < 1e-3);
}

TEST_CASE("dropping the largest parameter moves coefficients within 3 standard errors")
{
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    const std::vector<double> ex = {0.0, 2.0 / 3.0, 1.0, 4.0 / 3.0};
    // the scaled stderr has few degrees of freedom, so |shift| / stderr is Student-t like
    int checks = 0, over = 0;
    for (int trial = 0; trial < 50; ++trial) {
        LadderSample s;
        s.params = geometric_ladder(0.2, 0.7, 10);
        for (double h : s.params) {
            double e = 1e-8;
            s.values.push_back(0.125 + 0.34 * std::pow(h, 2.0 / 3.0) - 0.06 * h + 0.38 * std::pow(h, 4.0 / 3.0) + e * nd(rng));
            s.errors.push_back(e);
        }
        auto f = fit_expansion(s, ex);
        LadderSample t = s;
        t.params.erase(t.params.begin());
        t.values.erase(t.values.begin());
        t.errors.erase(t.errors.begin());
        auto g = fit_expansion(t, ex);
        for (double e : ex) {
            ++checks;
            over += std::fabs(g.coefficient_at(e) - f.coefficient_at(e)) >= 3.0 * std::max(f.stderr_at(e), g.stderr_at(e));
        }
    }
    CHECK(over <= 0.05 * checks);
}

TEST_CASE("noise screen refuses inaccurate samples")
{
    LadderSample s = synthetic(10);
    s.errors[9] = 1e-2;
    s.values[9] += 5e-3;
    auto f = fit_expansion(s, {0.0, 2.0 / 3.0, 1.0});
    REQUIRE(f.refused.size() >= 1);
    CHECK(f.refused.back() == 9);
    CHECK(std::fabs(f.coefficient_at(1.0) - 0.05) < 1e-8);
}

TEST_CASE("log-log slope of a power law")
{
    std::vector<double> h = geometric_ladder(0.2, 0.7, 8), r;
    for (double x : h) r.push_back(x * x);
    auto s = loglog_slope(h, r);
    CHECK(std::fabs(s.slope - 2.0) < 1e-12);
    r[2] = -1;
    CHECK_THROWS_AS(loglog_slope(h, r), PreconditionError);
}

TEST_CASE("JSON report records")
{
    auto f = fit_expansion(synthetic(10), {0.0, 2.0 / 3.0});
    auto j = nlohmann::json::parse(fit_to_json(f));
    REQUIRE(j.size() == 2);
    CHECK(j[0].contains("exponent"));
    CHECK(j[1]["stderr"].get<double>() >= 0);
    CHECK(j[0].contains("condition"));
}

}
