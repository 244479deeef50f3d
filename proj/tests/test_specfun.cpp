#include "doctest.h"

#include "wguide/acceptance.hpp"
#include "wguide/specfun.hpp"

#include <cmath>

using namespace wguide;

TEST_SUITE("specfun") {

TEST_CASE("reverse Airy values at the origin")
{
    auto a = airy_rev(0.0);
    CHECK(a.value == doctest::Approx(0.3550280538878172).epsilon(1e-15));
    CHECK(a.derivative == doctest::Approx(0.2588194037928068).epsilon(1e-15));
}

TEST_CASE("first zeros against tabulated values")
{
    CHECK(std::fabs(airy_zero(1) - 2.338107410459767) < 1e-13);
    CHECK(std::fabs(airy_zero(2) - 4.087949444130971) < 1e-13);
    CHECK(std::fabs(airy_zero(3) - 5.520559828095551) < 1e-13);
    CHECK(std::fabs(airy_zero(10) - 12.82877675286576) < 1e-12);
}

TEST_CASE("zeros are Newton fixed points")
{
    for (int n : {1, 5, 20, 60, 100}) {
        double z = airy_zero(n);
        auto a = airy_rev(z);
        CHECK(std::fabs(a.value / a.derivative) < 1e-13 * z);
    }
}

TEST_CASE("rank outside 1..100 is rejected")
{
    CHECK_THROWS_AS(airy_zero(0), OutOfRange);
    CHECK_THROWS_AS(airy_zero(101), OutOfRange);
}

TEST_CASE("evaluator matches the quad precision series")
{
    for (double x = -3.0; x <= 9.0; x += 0.37) {
        auto a = airy_rev(x);
        auto o = airy_series_oracle(x);
        CHECK(std::fabs(a.value - o.value) < 1e-13);
        CHECK(std::fabs(a.derivative - o.derivative) < 1e-12);
    }
}

TEST_CASE("zeros match the bisection oracle")
{
    for (int n = 1; n <= 10; ++n) CHECK(std::fabs(airy_zero(n) - airy_zero_oracle(n)) < 1e-10);
}

TEST_CASE("normalization is the squared derivative at the zero")
{
    for (int n = 1; n <= 5; ++n) {
        double d = airy_rev(airy_zero(n)).derivative;
        CHECK(std::fabs(airy_norm_sq(n) - d * d) < 1e-10);
    }
}

TEST_CASE("eigenfunction is normalized with positive slope at 0")
{
    auto q = composite_gauss(-40.0, 0.0, 0.5, 10);
    for (int n : {1, 3}) {
        double s = 0;
        for (size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(airy_eigenfunction(n, q.nodes[i]), 2);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(airy_eigenfunction_deriv(n, 0.0) > 0);
        CHECK(std::fabs(airy_eigenfunction(n, 0.0)) < 1e-13);
    }
}

TEST_CASE("Gauss-Legendre is exact to degree 2n-1")
{
    auto q = gauss_legendre(-1.0, 2.0, 5);
    double s = 0;
    for (size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 9);
    CHECK(s == doctest::Approx((std::pow(2.0, 10) - 1.0) / 10.0).epsilon(1e-13));
}

}
