#include "doctest.h"

#include "wguide/eigensolve.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace wguide;

namespace {

SparseMat tridiag(int n)
{
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, -1.0);
            t.emplace_back(i + 1, i, -1.0);
        }
    }
    SparseMat a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseMat identity(int n)
{
    SparseMat b(n, n);
    b.setIdentity();
    return b;
}

SparseMat random_spd(int n, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> col(0, n - 1);
    std::vector<Eigen::Triplet<double>> t;
    std::vector<double> rs(n, 0.0);
    for (int i = 0; i < n; ++i) {
        int j = col(rng);
        if (j == i) continue;
        double v = u(rng);
        t.emplace_back(i, j, v);
        t.emplace_back(j, i, v);
        rs[i] += std::fabs(v);
        rs[j] += std::fabs(v);
    }
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, rs[i] + 0.5 + std::fabs(u(rng)));
    SparseMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace

TEST_SUITE("eigensolve") {

TEST_CASE("tridiagonal closed form")
{
    const int n = 1000;
    EigenOptions opt;
    opt.nev = 5;
    opt.tol = 1e-12;
    auto r = lowest_eigenpairs(tridiag(n), identity(n), opt);
    REQUIRE(r.eigenvalues.size() == 5);
    for (int k = 0; k < 5; ++k) {
        double exact = 2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1));
        CHECK(std::fabs(r.eigenvalues[k] - exact) <= 1e-10 * exact);
    }
}

TEST_CASE("sparse and dense agree on a random pencil")
{
    std::mt19937 rng(7);
    SparseMat a = random_spd(400, rng), b = random_spd(400, rng);
    EigenOptions opt;
    opt.nev = 4;
    opt.tol = 1e-11;
    auto s = lowest_eigenpairs(a, b, opt);
    auto d = dense_eigenpairs(a, b, 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::fabs(s.eigenvalues[k] - d.eigenvalues[k]) <= 1e-10 * std::fabs(d.eigenvalues[k]));
        CHECK(pair_residual(a, b, s.eigenvectors.col(k), s.eigenvalues[k]) < 1e-8);
    }
}

TEST_CASE("eigenvectors are B-orthonormal")
{
    std::mt19937 rng(3);
    SparseMat a = random_spd(300, rng), b = random_spd(300, rng);
    EigenOptions opt;
    opt.nev = 3;
    auto s = lowest_eigenpairs(a, b, opt);
    Mat g = s.eigenvectors.transpose() * (b * s.eigenvectors);
    CHECK((g - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("inertia counts eigenvalues below the shift")
{
    const int n = 50;
    ShiftInvert op(tridiag(n), identity(n), 0.1);
    int below = 0;
    for (int k = 1; k <= n; ++k) below += 2.0 - 2.0 * std::cos(k * M_PI / (n + 1)) < 0.1;
    CHECK(op.negative_pivots() == below);
}

TEST_CASE("asymmetric input is rejected")
{
    SparseMat a = tridiag(5);
    a.coeffRef(0, 1) = 3.0;
    CHECK_THROWS_AS(check_symmetric(a, "A"), std::invalid_argument);
    CHECK_THROWS_AS(lowest_eigenpairs(a, identity(5)), std::invalid_argument);
}

TEST_CASE("small problems take the dense path")
{
    EigenOptions opt;
    opt.nev = 2;
    opt.dense_below = 100;
    auto r = lowest_eigenpairs(tridiag(40), identity(40), opt);
    CHECK(r.dense);
    CHECK(r.eigenvalues[0] == doctest::Approx(2.0 - 2.0 * std::cos(M_PI / 41)).epsilon(1e-12));
}

TEST_CASE("coordinate format round trip")
{
    SparseMat a = tridiag(7);
    std::stringstream ss;
    write_coo(ss, a);
    SparseMat b = read_coo(ss);
    CHECK((SparseMat(a - b)).norm() == 0.0);
}

}
