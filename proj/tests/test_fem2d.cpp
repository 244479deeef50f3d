#include "doctest.h"

#include "wguide/fem2d.hpp"

#include <cmath>
#include <sstream>

using namespace wguide;

namespace {

MeshControls plain(double target, int order = 2)
{
    MeshControls c;
    c.target_h = target;
    c.order = order;
    c.richardson = false;
    return c;
}

}  // namespace

TEST_SUITE("fem2d") {

TEST_CASE("square eigenvalues")
{
    auto s = solve_domain(DomainSpec::rectangle(M_PI, M_PI), 4, plain(0.2));
    REQUIRE(s.pairs.size() == 4);
    double ref[4] = {2, 5, 5, 8};
    for (int k = 0; k < 4; ++k) CHECK(std::fabs(s.pairs[k].value - ref[k]) < 1e-3 * ref[k]);
}

TEST_CASE("element count matches the area over the mesh size")
{
    Mesh m = build_mesh(DomainSpec::rectangle(M_PI, M_PI), 0.2);
    double expected = 2.0 * M_PI * M_PI / (0.2 * 0.2);
    CHECK(std::fabs(double(m.triangles.size()) - expected) < 0.1 * expected);
    CHECK(m.area() == doctest::Approx(M_PI * M_PI).epsilon(1e-12));
    CHECK(m.min_angle_deg() > 20.0);
}

TEST_CASE("P1 eigenvalue error is second order in the mesh size")
{
    auto spec = DomainSpec::rectangle(M_PI, M_PI);
    double e1 = solve_domain(spec, 1, plain(0.2, 1)).pairs[0].value - 2.0;
    double e2 = solve_domain(spec, 1, plain(0.1, 1)).pairs[0].value - 2.0;
    CHECK(e1 > 0);
    CHECK(e2 > 0);
    double rate = std::log2(e1 / e2);
    CHECK(rate == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("right isosceles triangle")
{
    auto s = solve_domain(DomainSpec::right_triangle(M_PI), 2, plain(0.1));
    CHECK(s.pairs[0].value == doctest::Approx(5.0).epsilon(1e-4));
    CHECK(s.pairs[1].value == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("half triangle has the symmetry line tagged Neumann")
{
    Mesh m = build_mesh(DomainSpec::scaled_triangle(0.1, true), 0.3);
    CHECK(m.tagged_length(EdgeTag::Neumann) == doctest::Approx(M_PI * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(m.min_angle_deg() > 0.0);
}

TEST_CASE("half and full triangle share the ground state")
{
    auto full = solve_domain(DomainSpec::scaled_triangle(0.1), 1);
    auto half = solve_domain(DomainSpec::scaled_triangle(0.1, true), 1);
    CHECK(std::fabs(full.pairs[0].value - half.pairs[0].value) < 1e-7);
}

TEST_CASE("physical and scaled triangles are unitarily equivalent")
{
    const double theta = 0.4, h = std::tan(theta);
    auto phys = solve_domain(DomainSpec::phys_triangle(theta), 1);
    auto scaled = solve_domain(DomainSpec::scaled_triangle(h), 1);
    double mapped = 2.0 * std::cos(theta) * std::cos(theta) * scaled.pairs[0].value;
    CHECK(phys.pairs[0].value == doctest::Approx(mapped).epsilon(1e-3));
}

TEST_CASE("rectangle coordinates reproduce the triangle")
{
    const double h = 0.1;
    auto tri = solve_domain(DomainSpec::scaled_triangle(h), 1);
    auto rec = solve_domain(DomainSpec::rectangle_rec(h), 1);
    CHECK(std::fabs(tri.pairs[0].value - rec.pairs[0].value) < 10 * (tri.pairs[0].error + rec.pairs[0].error) + 1e-8);
}

TEST_CASE("guide eigenvalues lie below the threshold and under the triangle")
{
    const double h = 0.1;
    MeshControls c;
    c.levels = 3;
    auto gui = solve_domain(DomainSpec::scaled_guide(h), 2, c);
    auto tri = solve_domain(DomainSpec::scaled_triangle(h, true), 2);
    REQUIRE(gui.pairs.size() >= 1);
    for (size_t k = 0; k < gui.pairs.size(); ++k) {
        CHECK(gui.pairs[k].value < gui.threshold);
        CHECK(gui.pairs[k].value <= tri.pairs[k].value + 1e-9);
    }
    CHECK(gui.threshold == doctest::Approx((1 + h * h) / 2));
}

TEST_CASE("tensor product input has no orthogonal transverse part")
{
    const double h = 0.1, a = M_PI * std::sqrt(2.0);
    auto spec = DomainSpec::scaled_triangle(h);
    auto mesh = std::make_shared<Mesh>(build_mesh(spec, 0.2));
    auto pen = assemble(spec, mesh, 2);
    const auto& sp = *pen.space;
    Eigen::VectorXd psi(sp.ndof);
    for (int d = 0; d < sp.ndof; ++d) {
        double x = sp.dof_xy[d][0], y = sp.dof_xy[d][1], r = x + a;
        psi[d] = r <= 1e-14 ? 0.0 : std::exp(-x * x) * std::sin(-x) * std::cos(M_PI * y / (2 * r));
    }
    auto res = mode_projection_residual(spec, sp, psi);
    CHECK(res.orth < 1e-4);
    CHECK(res.norm > 0);
}

TEST_CASE("mesh text round trip")
{
    Mesh m = build_mesh(DomainSpec::scaled_triangle(0.2, true), 0.4);
    std::stringstream ss;
    write_mesh(ss, m);
    Mesh r = read_mesh(ss);
    REQUIRE(r.vertices.size() == m.vertices.size());
    REQUIRE(r.triangles.size() == m.triangles.size());
    REQUIRE(r.edges.size() == m.edges.size());
    for (size_t i = 0; i < m.vertices.size(); ++i) {
        CHECK(r.vertices[i][0] == m.vertices[i][0]);
        CHECK(r.vertices[i][1] == m.vertices[i][1]);
    }
    CHECK(r.tagged_length(EdgeTag::Neumann) == doctest::Approx(m.tagged_length(EdgeTag::Neumann)));
}

TEST_CASE("inverted elements are rejected")
{
    auto spec = DomainSpec::rectangle(1.0, 1.0);
    Mesh m = build_mesh(spec, 0.25);
    std::swap(m.triangles[0][1], m.triangles[0][2]);
    CHECK_THROWS_AS(assemble(spec, std::make_shared<Mesh>(m), 2), ElementQuality);
}

TEST_CASE("opening too small or too large")
{
    CHECK_THROWS_AS(DomainSpec::phys_triangle(1e-4), DegenerateGeometry);
    CHECK_THROWS_AS(DomainSpec::phys_guide(2.0), std::invalid_argument);
}

TEST_CASE("point location and evaluation")
{
    auto spec = DomainSpec::rectangle(2.0, 1.0);
    auto mesh = std::make_shared<Mesh>(build_mesh(spec, 0.2));
    auto pen = assemble(spec, mesh, 2);
    const auto& sp = *pen.space;
    Eigen::VectorXd f(sp.ndof);
    for (int d = 0; d < sp.ndof; ++d) f[d] = sp.dof_xy[d][0] * sp.dof_xy[d][1] + sp.dof_xy[d][0] * sp.dof_xy[d][0];
    CHECK(fem_eval(sp, f, 0.73, 0.41) == doctest::Approx(0.73 * 0.41 + 0.73 * 0.73).epsilon(1e-12));
    CHECK(mesh->locate(5.0, 0.5) == -1);
}

TEST_CASE("Agmon weight one reproduces the mass norm")
{
    auto s = solve_domain(DomainSpec::scaled_triangle(0.1), 1, plain(0.3));
    const auto& psi = s.pairs[0].vector;
    double n0 = agmon_weighted_norm_2d(*s.space, psi, AgmonWeight::ExpRight, 0.0, 0.1);
    CHECK(n0 >= 1.0 - 1e-10);
    CHECK(n0 < 2.0);
}

}
