#include "doctest.h"

#include "wguide/model1d.hpp"
#include "wguide/specfun.hpp"

#include <cmath>

using namespace wguide;

namespace {
const double kAiryScale = std::pow(4.0 * M_PI * std::sqrt(2.0), -2.0 / 3.0);
}

TEST_SUITE("model1d") {

TEST_CASE("potentials")
{
    CHECK(toy_potential(-2.0) == 2.0);
    CHECK(toy_potential(0.5) == 1.0);
    CHECK(botri_potential(0.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(botri_potential(-1.0) > botri_potential(0.0));
}

TEST_CASE("toy root near the Airy first term")
{
    const double kappa = 1e-3;
    CHECK(std::fabs(toy_eigenvalue_exact(1, kappa) - std::pow(kappa, 2.0 / 3.0) * airy_zero(1)) < 2e-3);
}

TEST_CASE("toy root against finite differences")
{
    for (double kappa : {0.05, 0.2}) {
        int npts = int(std::ceil(6.0 / (0.003 * std::pow(kappa, 2.0 / 3.0))));
        auto fd = toy_solve_matrix(1, kappa, 3.0, npts, 3.0);
        CHECK(std::fabs(fd.at(0).eigenvalue - toy_eigenvalue_exact(1, kappa)) < 1e-6);
    }
}

TEST_CASE("toy absorption into the continuum")
{
    CHECK_THROWS_AS(toy_eigenvalue_exact(40, 0.5), NoBoundState);
}

TEST_CASE("toy eigenfunction is normalized and continuous")
{
    std::vector<double> grid;
    for (int i = 0; i <= 20000; ++i) grid.push_back(-6.0 + 7.0 * i / 20000);
    auto p = toy_eigenfunction_exact(1, 0.1, grid);
    double s = 0;
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        s += 0.5 * (grid[i + 1] - grid[i]) * (p.values[i] * p.values[i] + p.values[i + 1] * p.values[i + 1]);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
    size_t i0 = 6 * 20000 / 7;
    CHECK(std::fabs(p.values[i0 + 1] - p.values[i0 - 1]) < 1e-2 * std::fabs(p.values[i0]));
}

TEST_CASE("branch trace matches the exact root while bound")
{
    std::vector<double> d;
    for (int i = 0; i < 12; ++i) d.push_back(0.2 + 0.04 * i);
    auto lam = toy_branch_trace(1, d);
    for (size_t i = 0; i < d.size(); ++i) {
        double kappa = d[i] * d[i] * d[i];
        if (lam[i] < 1) CHECK(std::fabs(lam[i] - toy_eigenvalue_exact(1, kappa)) < 1e-10);
        if (i) CHECK(lam[i] > lam[i - 1]);
    }
}

TEST_CASE("branch trace from a single large delta")
{
    for (double kappa : {0.2, 0.3}) {
        auto lam = toy_branch_trace(1, {std::cbrt(kappa)});
        CHECK(std::fabs(lam[0] - toy_eigenvalue_exact(1, kappa)) < 1e-10);
    }
}

TEST_CASE("branch trace rejects a decreasing grid")
{
    CHECK_THROWS_AS(toy_branch_trace(1, {0.3, 0.2}), std::invalid_argument);
}

TEST_CASE("triangle Born-Oppenheimer two-term law")
{
    for (double h : {0.02, 0.005}) {
        auto p = bo_solve(Op1D::BOTri, h, 2);
        REQUIRE(p.size() == 2);
        CHECK(p[0].eigenvalue < p[1].eigenvalue);
        for (int n = 1; n <= 2; ++n) {
            double two = 0.125 + std::pow(h, 2.0 / 3.0) * kAiryScale * airy_zero(n);
            CHECK(std::fabs(p[n - 1].eigenvalue - two) < 3.0 * std::pow(h, 4.0 / 3.0));
        }
        CHECK(p[0].residual < 1e-8);
    }
}

TEST_CASE("guide Born-Oppenheimer ground state sits below the triangle one")
{
    const double h = 0.05;
    double gui = bo_solve(Op1D::BOGui, h, 1).at(0).eigenvalue;
    double tri = bo_solve(Op1D::BOTri, h, 1).at(0).eigenvalue;
    CHECK(gui < tri);
    CHECK(gui > 0.125);
}

TEST_CASE("unit weight gives the H1-type norm")
{
    const double h = 0.05;
    auto p = bo_solve(Op1D::BOTri, h, 1).at(0);
    double n0 = agmon_weighted_norm(p, AgmonWeight::CubicExp, 0.0, h);
    double l2 = 0;
    for (size_t i = 0; i + 1 < p.grid.size(); ++i)
        l2 += 0.5 * (p.grid[i + 1] - p.grid[i]) * (p.values[i] * p.values[i] + p.values[i + 1] * p.values[i + 1]);
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(n0 > 1.0);
    CHECK(n0 < 3.0);
}

TEST_CASE("Agmon norm of the triangle ground state stays bounded")
{
    double lo = 1e300, hi = 0;
    for (double h : {0.2, 0.05, 0.0125}) {
        double v = agmon_weighted_norm(bo_solve(Op1D::BOTri, h, 1).at(0), AgmonWeight::CubicExp, agmon_eta0() / 2, h, 1e-8);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 3.0);
}

TEST_CASE("overflowing weight is reported")
{
    auto p = bo_solve(Op1D::BOTri, 0.05, 1).at(0);
    CHECK_THROWS_AS(agmon_weighted_norm(p, AgmonWeight::CubicExp, 1e4, 0.05, 0.0), WeightOverflow);
    CHECK_THROWS_AS(agmon_weighted_norm(p, AgmonWeight::CubicExp, -1.0, 0.05), std::invalid_argument);
}

}
