#include "doctest.h"

#include "wguide/fem2d.hpp"
#include "wguide/model1d.hpp"
#include "wguide/quasimode.hpp"
#include "wguide/specfun.hpp"

#include <cmath>

using namespace wguide;

namespace {
const double kAiryScale = std::pow(4.0 * M_PI * std::sqrt(2.0), -2.0 / 3.0);
}

TEST_SUITE("quasimode") {

TEST_CASE("toy coefficients")
{
    auto a = toy_coefficients(1, 3);
    CHECK(a.coeffs[0] == doctest::Approx(airy_zero(1)).epsilon(1e-12));
    CHECK(a.coeffs[1] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::fabs(a.coeffs[2]) < 1e-12);
}

TEST_CASE("toy expansion error shrinks with the order")
{
    auto a = toy_coefficients(1, 3);
    const double k = 1e-3;
    double ex = toy_eigenvalue_exact(1, k), s = 0;
    double prev = 1e300;
    for (int J : {0, 1, 3}) {
        s = 0;
        for (int j = 0; j <= J; ++j) s += a.coeffs[j] * std::pow(k, j / 3.0);
        double err = std::fabs(ex - std::pow(k, 2.0 / 3.0) * s);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 10 * std::pow(k, 2.0));
}

TEST_CASE("triangle Born-Oppenheimer coefficients")
{
    auto a = botri_coefficients(1, 2);
    CHECK(a.coeffs[0] == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(a.coeffs[1] == doctest::Approx(kAiryScale * airy_zero(1)).epsilon(1e-12));
    CHECK(a.exponent(1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("triangle coefficients")
{
    TriDiagnostics d;
    auto [a, p] = tri_coefficients(1, 4, {}, &d);
    CHECK(a.coeffs[0] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(std::fabs(a.coeffs[1]) < 1e-12);
    CHECK(a.coeffs[2] == doctest::Approx(kAiryScale * airy_zero(1)).epsilon(1e-10));
    CHECK(std::fabs(a.coeffs[2] - 0.3433322111) < 1e-9);
    CHECK(std::fabs(a.coeffs[3]) < 1e-8);
    CHECK(std::fabs(a.coeffs[4] - 0.3772064230) < 1e-6);
    CHECK(p.complete_order() >= 2);
}

TEST_CASE("guide coefficients")
{
    auto [a, p] = gui_coefficients(1, 4);
    CHECK(a.coeffs[0] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(a.coeffs[2] == doctest::Approx(kAiryScale * airy_zero(1)).epsilon(1e-10));
    CHECK(std::fabs(a.coeffs[3] + 0.058811979708) < 1e-6);
    CHECK(std::fabs(a.coeffs[4] - 0.3772064230) < 1e-5);
}

TEST_CASE("cutoffs")
{
    CHECK(cutoff_left(0.0) == 1.0);
    CHECK(cutoff_left(-M_PI * std::sqrt(2.0)) == 0.0);
    CHECK(cutoff_right(0.5) == 1.0);
    CHECK(cutoff_right(3.0) == 0.0);
    for (double x = -4.0; x < 0; x += 0.1) CHECK((cutoff_left(x) >= 0 && cutoff_left(x) <= 1));
}

TEST_CASE("triangle quasimode follows the FEM eigenvector")
{
    const double h = 0.05;
    auto [a, p] = tri_coefficients(1, 4);
    auto sol = solve_domain(DomainSpec::scaled_triangle(h), 1);
    const auto& psi = sol.pairs[0].vector;
    const double x0 = -std::pow(h, 2.0 / 3.0);
    double ref = assemble_quasimode(p, h, x0, 0.0, 2) / fem_eval(*sol.space, psi, x0, 0.0);
    for (double x : {0.5 * x0, 2.0 * x0})
        for (double y : {0.0, 0.5 * (x + M_PI * std::sqrt(2.0))}) {
            double r = assemble_quasimode(p, h, x, y, 2) / fem_eval(*sol.space, psi, x, y);
            CHECK(r == doctest::Approx(ref).epsilon(0.1));
        }
    CHECK_THROWS_AS(assemble_quasimode(p, h, 0.5, 0.0, 2), OutsideDomain);
}

TEST_CASE("family names")
{
    CHECK(family_name(Family::Gui) != family_name(Family::Tri));
}

}
