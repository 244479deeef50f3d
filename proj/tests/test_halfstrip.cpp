#include "doctest.h"

#include "wguide/halfstrip.hpp"
#include "wguide/specfun.hpp"

#include <cmath>
#include <random>

using namespace wguide;

TEST_SUITE("halfstrip") {

TEST_CASE("transverse eigenvalues")
{
    TransverseBasis c(BasisKind::DirichletSym, 8), s(BasisKind::Dirichlet, 8);
    CHECK(c.mu(0) == doctest::Approx(0.125));
    CHECK(c.mu(1) == doctest::Approx(9.0 / 8.0));
    CHECK(c.omega(0) == 0.0);
    CHECK(c.omega(1) == doctest::Approx(1.0));
    CHECK(s.mu(0) == doctest::Approx(0.5));
    CHECK(s.omega(0) == doctest::Approx(std::sqrt(3.0 / 8.0)));
}

TEST_CASE("projection and evaluation invert each other")
{
    TransverseBasis b(BasisKind::NeumannDirichlet, 12);
    auto c = b.project([&](double t) { return 2.0 * b.eval(0, t) - 0.5 * b.eval(3, t); });
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c[3] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(std::fabs(c[1]) < 1e-12);
    CHECK(b.evaluate(c, 0.3) == doctest::Approx(2.0 * b.eval(0, 0.3) - 0.5 * b.eval(3, 0.3)).epsilon(1e-12));
}

TEST_CASE("t d/dt matrix satisfies the integration by parts identity")
{
    TransverseBasis b(BasisKind::DirichletSym, 10);
    Eigen::MatrixXd m = b.t_dt() + b.t_dt().transpose() + Eigen::MatrixXd::Identity(10, 10);
    CHECK(m.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cosine to sine projection converges like 1/K")
{
    // cosines do not vanish at t = 0, so their sine coefficients decay like 1/k
    Eigen::MatrixXd a = cross_projection(200, 3), b = cross_projection(400, 3);
    for (int l = 0; l < 3; ++l) {
        double da = 1.0 - a.col(l).squaredNorm(), db = 1.0 - b.col(l).squaredNorm();
        CHECK(db > 0);
        CHECK(db / da == doctest::Approx(0.5).epsilon(0.05));
        CHECK(db < 2e-3);
    }
}

TEST_CASE("decay field algebra")
{
    DecayField f(Side::Left, 3);
    f.add(1, 2.0, {1.0, 3.0});  // (1 + 3 s) e^{2 s}
    auto d = f.d_sigma();
    CHECK(d.value(1, -0.4) == doctest::Approx((2.0 * (1.0 - 1.2) + 3.0) * std::exp(-0.8)).epsilon(1e-13));
    CHECK(f.trace()[1] == doctest::Approx(1.0));
    CHECK(f.trace_d_sigma()[1] == doctest::Approx(5.0));
    // integral over s < 0 of (1 + 3 s) e^{2 s} = 1/2 - 3/4
    CHECK(f.moment(1, 0) == doctest::Approx(-0.25).epsilon(1e-13));
    DecayField g(Side::Left, 3);
    g.add(0, -1.0, {1.0});
    CHECK_THROWS(g.check_decay());
}

TEST_CASE("DtN is the modal decay rate")
{
    TransverseBasis b(BasisKind::DirichletSym, 6);
    Eigen::VectorXd tr = Eigen::VectorXd::Zero(6);
    tr[2] = 1.5;
    auto d = dtn_apply(b, Side::Left, tr);
    CHECK(std::fabs(d[2]) == doctest::Approx(1.5 * b.omega(2)).epsilon(1e-13));
    CHECK(std::fabs(d[1]) < 1e-15);
}

TEST_CASE("left problem: exact solve closed form and truncated reference agree")
{
    const int K = 12;
    TransverseBasis b(BasisKind::DirichletSym, K);
    DecayField f(Side::Left, K);
    f.add(0, 1.0, {1.0});
    f.add(2, 1.5, {0.5, -0.2});
    Eigen::VectorXd g = Eigen::VectorXd::Zero(K);
    g[0] = 0.3;
    g[2] = -0.1;
    auto ex = solve_N0_halfstrip(b, f, g);
    CHECK(ex.zeta == doctest::Approx(ex.zeta_formula).epsilon(1e-10));
    auto tr = solve_N0_truncated(b, f, g, 30.0, 80);
    CHECK(std::fabs(tr.zeta - ex.zeta) < 1e-8);
}

TEST_CASE("transmission recovers a manufactured solution")
{
    const int K = 24;
    InterfaceSystem sys(K);
    const auto& P = sys.projection();
    Eigen::VectorXd lt = Eigen::VectorXd::Zero(K), rt = Eigen::VectorXd::Zero(K);
    lt[0] = 0.4;
    rt[0] = -0.2;
    rt[1] = 0.1;
    DecayField fl(Side::Left, K), fr(Side::Right, K);
    for (int k = 0; k < 2; ++k) {
        double wl = sys.left().omega(k), wr = sys.right().omega(k);
        fl.add(k, 3.0, {(wl * wl - 9.0) * lt[k]});
        fr.add(k, -3.0, {(wr * wr - 9.0) * rt[k]});
    }
    const double zeta = -0.1;
    Eigen::VectorXd g0 = lt - P.transpose() * rt;
    g0[0] -= zeta;
    Eigen::VectorXd h = 3.0 * P * lt + 3.0 * rt;
    auto r = solve_transmission(sys, fl, fr, g0, h);
    CHECK(std::fabs(r.zeta - zeta) < 1e-9);
    CHECK((r.g - rt).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.residual < 1e-9);
}

TEST_CASE("interface operator is coercive on smooth traces")
{
    InterfaceSystem sys(32);
    std::mt19937 rng(1);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v(32);
        for (int k = 0; k < 32; ++k) v[k] = nd(rng) / ((k + 1.0) * (k + 1.0));
        CHECK(v.dot(sys.apply(v)) / v.squaredNorm() >= 0.6);
    }
}

TEST_CASE("Airy context ground state and bordered resolvent")
{
    auto ctx = make_airy_context(1, false);
    CHECK(ctx.level == doctest::Approx(airy_zero(1)).epsilon(1e-14));
    Eigen::VectorXd r = apply_airy_operator(ctx, ctx.ground);
    CHECK(r.segment(1, r.size() - 2).cwiseAbs().maxCoeff() < 1e-8);

    Eigen::VectorXd f(ctx.grid.size());
    for (int i = 0; i < f.size(); ++i) f[i] = std::exp(3.0 * ctx.grid.x[i]);
    auto res = solve_airy_resolvent(ctx, f, 0.2);
    CHECK(res.coeff == doctest::Approx(res.coeff_discrete).epsilon(1e-9));
    Eigen::VectorXd lhs = apply_airy_operator(ctx, res.g) - f - res.coeff_discrete * ctx.ground;
    CHECK(lhs.segment(1, lhs.size() - 2).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(res.g[f.size() - 1] == doctest::Approx(0.2));
}

}
