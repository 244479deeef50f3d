#include "wguide/acceptance.hpp"

#include "wguide/eigensolve.hpp"
#include "wguide/halfstrip.hpp"
#include "wguide/model1d.hpp"
#include "wguide/quasimode.hpp"
#include "wguide/specfun.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace wguide {

namespace {

using quad = __float128;

constexpr double kPi = std::numbers::pi;

quad qabs(quad x) { return x < 0 ? -x : x; }

std::string fmt(const char* f, double a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double airy_scale() { return std::pow(4.0 * kPi * std::sqrt(2.0), -2.0 / 3.0); }

}  // namespace

AiryOracle airy_series_oracle(double xd)
{
    // A(x) = Ai(0) f(-x) + Ai'(0) g(-x) with the Maclaurin series of f and g
    const quad ai0 = quad(0.3550280538878172) + quad(2.05233632436212e-17);
    const quad aip0 = quad(-0.2588194037928068) + quad(2.522243111610832e-17);
    quad z = -quad(xd), z3 = z * z * z;
    quad f = 1, g = z, tf = 1, tg = z;
    quad df = 0, dg = 1;  // derivatives in z
    for (int k = 1; k < 400; ++k) {
        quad tf_prev = tf, tg_prev = tg;
        tf = tf_prev * z3 / quad((3 * k - 1) * (3 * k));
        tg = tg_prev * z3 / quad((3 * k) * (3 * k + 1));
        f += tf;
        g += tg;
        if (z != 0) {
            df += tf * quad(3 * k) / z;
            dg += tg * quad(3 * k + 1) / z;
        }
        if (qabs(tf) + qabs(tg) < quad(1e-34) * (qabs(f) + qabs(g)) && k > 5) break;
    }
    quad val = ai0 * f + aip0 * g;
    quad der = -(ai0 * df + aip0 * dg);
    return {double(val), double(der)};
}

double airy_zero_oracle(int n)
{
    if (n < 1 || n > 10) throw std::invalid_argument("airy_zero_oracle: n in 1..10");
    // scan sign changes with step 0.05, then bisect
    int found = 0;
    double a = 0.0, fa = airy_series_oracle(0.0).value;
    for (double b = 0.05; b < 20.0; b += 0.05) {
        double fb = airy_series_oracle(b).value;
        if (fa * fb < 0 && ++found == n) {
            double lo = a, hi = b;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = airy_series_oracle(mid).value;
                if ((fm < 0) == (fa < 0))
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        a = b;
        fa = fb;
    }
    throw std::runtime_error("airy_zero_oracle: zero not bracketed");
}

std::vector<double> triangle_fit_exponents() { return {0.0, 1.0 / 3, 2.0 / 3, 1.0, 4.0 / 3, 2.0, 8.0 / 3}; }

std::vector<double> guide_fit_exponents()
{
    std::vector<double> e;
    for (int j = 0; j <= 8; ++j) e.push_back(j / 3.0);
    return e;
}

std::vector<double> guide_ladder_params() { return geometric_ladder(0.2 * std::pow(0.7, 4), 0.7, 11); }

std::string AcceptanceRunner::title(int id)
{
    static const char* names[] = {"",
                                  "Airy zeros and normalization",
                                  "toy transcendental roots vs finite differences",
                                  "toy expansion orders",
                                  "BOTri two-term residual order",
                                  "triangle FEM coefficients",
                                  "beta_4 concordance",
                                  "guide FEM coefficients and gamma_3",
                                  "essential spectrum structure",
                                  "transverse-mode residual scaling",
                                  "Agmon weighted norms bounded",
                                  "eigensolver oracle equivalence",
                                  "transmission machinery"};
    if (id < 1 || id > count) throw std::out_of_range("criterion id");
    return names[id];
}

double AcceptanceRunner::budget(int id)
{
    static const double limits[] = {0, 1, 30, 60, 60, 600, 600, 900, 300, 300, 300, 120, 60};
    if (id < 1 || id > count) throw std::out_of_range("criterion id");
    return limits[id];
}

const LadderRun& AcceptanceRunner::triangle_ladder()
{
    if (!tri_) {
        tri_ = std::make_unique<LadderRun>();
        tri_->h = geometric_ladder(0.2, 0.7, 10);
        tri_->sample.params = tri_->h;
        for (double h : tri_->h) {
            auto sol = solve_domain(DomainSpec::scaled_triangle(h), 1, MeshControls{});
            tri_->sample.values.push_back(sol.pairs.at(0).value);
            tri_->sample.errors.push_back(std::max(sol.pairs[0].error, 1e-13));
            tri_->solutions.push_back(std::move(sol));
        }
    }
    return *tri_;
}

const LadderRun& AcceptanceRunner::guide_ladder()
{
    if (!gui_) {
        gui_ = std::make_unique<LadderRun>();
        gui_->h = guide_ladder_params();
        gui_->sample.params = gui_->h;
        MeshControls c;
        c.levels = 3;
        for (double h : gui_->h) {
            auto sol = solve_domain(DomainSpec::scaled_guide(h), 1, c);
            gui_->sample.values.push_back(sol.pairs.at(0).value);
            gui_->sample.errors.push_back(std::max(sol.pairs[0].error, 1e-13));
            gui_->solutions.push_back(std::move(sol));
        }
    }
    return *gui_;
}

namespace {

// smallest significant retained term of a fit over the ladder
double smallest_term(const ExpansionFit& f, double h)
{
    double m = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < f.exponents.size(); ++k)
        if (std::fabs(f.coefficients[k]) > 2.0 * f.stderrs[k])
            m = std::min(m, std::fabs(f.coefficients[k]) * std::pow(h, f.exponents[k]));
    return m;
}

CriterionResult c1()
{
    CriterionResult r;
    r.columns = {"n", "airy_zero", "oracle", "abs_diff", "norm_identity_diff"};
    double worst_zero = 0, worst_norm = 0;
    for (int n = 1; n <= 10; ++n) {
        double z = airy_zero(n), zo = airy_zero_oracle(n);
        double dn = 0;
        if (n <= 5) {
            double d = airy_series_oracle(z).derivative;
            dn = std::fabs(airy_norm_sq(n) - d * d);
            worst_norm = std::max(worst_norm, dn);
        }
        worst_zero = std::max(worst_zero, std::fabs(z - zo));
        r.rows.push_back({double(n), z, zo, std::fabs(z - zo), dn});
    }
    r.pass = worst_zero <= 1e-10 && worst_norm <= 1e-10;
    r.detail = "max zero diff " + fmt("%.2e", worst_zero) + ", max norm diff " + fmt("%.2e", worst_norm);
    return r;
}

CriterionResult c2()
{
    CriterionResult r;
    r.columns = {"kappa", "n", "exact", "finite_difference", "abs_diff"};
    double worst = 0;
    int checked = 0;
    for (double k : {0.02, 0.05, 0.1, 0.2}) {
        std::vector<double> ex;
        for (int n = 1; n <= 3; ++n) {
            try {
                ex.push_back(toy_eigenvalue_exact(n, k));
            } catch (const NoBoundState&) {
                break;
            }
        }
        if (ex.empty()) continue;
        // spacing tied to the Airy length keeps both the discretization error and the roundoff floor small
        int npts = int(std::ceil(6.0 / (0.003 * std::pow(k, 2.0 / 3.0))));
        auto fd = toy_solve_matrix(int(ex.size()), k, 3.0, npts, 3.0);
        for (size_t n = 0; n < ex.size(); ++n) {
            double d = std::fabs(ex[n] - fd.at(n).eigenvalue);
            worst = std::max(worst, d);
            ++checked;
            r.rows.push_back({k, double(n + 1), ex[n], fd[n].eigenvalue, d});
        }
    }
    r.pass = worst <= 1e-6 && checked > 0;
    r.detail = std::to_string(checked) + " bound states, max diff " + fmt("%.2e", worst);
    return r;
}

CriterionResult c3()
{
    CriterionResult r;
    r.columns = {"J", "kappa", "exact", "asymptotic", "residual", "slope"};
    auto alpha = toy_coefficients(1, 4);
    auto ks = geometric_ladder(0.1, 0.6, 10);
    bool ok = true;
    std::ostringstream d;
    for (int J = 0; J <= 3; ++J) {
        std::vector<double> res, ex, as;
        for (double k : ks) {
            double s = 0;
            for (int j = 0; j <= J; ++j) s += alpha.coeffs[j] * std::pow(k, j / 3.0);
            double e = toy_eigenvalue_exact(1, k), a = std::pow(k, 2.0 / 3.0) * s;
            ex.push_back(e);
            as.push_back(a);
            res.push_back(std::fabs(e - a));
        }
        auto sl = loglog_slope(ks, res);
        for (size_t i = 0; i < ks.size(); ++i) r.rows.push_back({double(J), ks[i], ex[i], as[i], res[i], sl.slope});
        double target = (3.0 + J) / 3.0;
        bool pass = std::fabs(sl.slope - target) <= 0.15;
        ok = ok && pass;
        d << "J=" << J << " slope " << fmt("%.3f", sl.slope) << " (target " << fmt("%.3f", target) << (pass ? ")" : ", off)")
          << (J < 3 ? "; " : "");
    }
    r.pass = ok;
    r.detail = d.str();
    return r;
}

CriterionResult c4()
{
    CriterionResult r;
    r.columns = {"n", "h", "eigenvalue", "two_term", "residual", "slope"};
    auto hs = geometric_ladder(0.2, 0.7, 10);
    bool ok = true;
    std::ostringstream d;
    for (int n = 1; n <= 2; ++n) {
        std::vector<double> res, ev, tt;
        for (double h : hs) {
            auto e = bo_solve(Op1D::BOTri, h, n);
            double two = 0.125 + std::pow(h, 2.0 / 3.0) * airy_scale() * airy_zero(n);
            ev.push_back(e.at(n - 1).eigenvalue);
            tt.push_back(two);
            res.push_back(std::fabs(ev.back() - two));
        }
        auto sl = loglog_slope(hs, res);
        for (size_t i = 0; i < hs.size(); ++i) r.rows.push_back({double(n), hs[i], ev[i], tt[i], res[i], sl.slope});
        ok = ok && std::fabs(sl.slope - 4.0 / 3.0) <= 0.15;
        d << "n=" << n << " slope " << fmt("%.3f", sl.slope) << (n == 1 ? "; " : "");
    }
    r.pass = ok;
    r.detail = d.str();
    return r;
}

void fit_rows(CriterionResult& r, const ExpansionFit& f)
{
    r.columns = {"exponent", "coefficient", "stderr"};
    for (size_t k = 0; k < f.exponents.size(); ++k) r.rows.push_back({f.exponents[k], f.coefficients[k], f.stderrs[k]});
}

bool errors_certified(const LadderSample& s, const ExpansionFit& f, double* worst_ratio)
{
    double w = 0;
    for (size_t i = 0; i < s.params.size(); ++i) w = std::max(w, s.errors[i] / smallest_term(f, s.params[i]));
    *worst_ratio = w;
    return w < 1.0 && f.refused.empty();
}

CriterionResult c5(AcceptanceRunner& run)
{
    CriterionResult r;
    const auto& lad = run.triangle_ladder();
    auto f = fit_expansion(lad.sample, triangle_fit_exponents());
    fit_rows(r, f);
    double c0 = f.coefficient_at(0), c1 = f.coefficient_at(1.0 / 3), c2 = f.coefficient_at(2.0 / 3);
    double target = airy_scale() * airy_zero(1);
    double ratio;
    bool cert = errors_certified(lad.sample, f, &ratio);
    r.pass = std::fabs(c0 - 0.125) <= 1e-4 && std::fabs(c1) <= 1e-3 && std::fabs(c2 / target - 1) <= 0.01 && cert;
    r.detail = "c0-1/8 " + fmt("%.2e", c0 - 0.125) + ", c1 " + fmt("%.2e", c1) + ", c2 rel " +
               fmt("%.2e", c2 / target - 1) + ", error/smallest term " + fmt("%.2e", ratio);
    return r;
}

CriterionResult c6(AcceptanceRunner& run)
{
    CriterionResult r;
    auto [coef, prof] = tri_coefficients(1, 4);
    const auto& lad = run.triangle_ladder();
    auto f = fit_expansion(lad.sample, triangle_fit_exponents());
    double beta4 = coef.coeffs.at(4), fem = f.coefficient_at(4.0 / 3);
    r.columns = {"quasimode_beta4", "fem_coefficient", "fem_stderr", "relative_diff"};
    r.rows.push_back({beta4, fem, f.stderr_at(4.0 / 3), fem / beta4 - 1});
    r.pass = std::fabs(fem / beta4 - 1) <= 0.02;
    r.detail = "beta4 " + fmt("%.6f", beta4) + ", FEM " + fmt("%.6f", fem) + ", rel " + fmt("%.2e", fem / beta4 - 1);
    return r;
}

CriterionResult c7(AcceptanceRunner& run)
{
    CriterionResult r;
    const auto& lad = run.guide_ladder();
    auto f = fit_expansion(lad.sample, guide_fit_exponents());
    fit_rows(r, f);
    auto [coef, prof] = gui_coefficients(1, 4);
    double gamma3 = coef.coeffs.at(3);
    double c0 = f.coefficient_at(0), c2 = f.coefficient_at(2.0 / 3), c3 = f.coefficient_at(1.0), s3 = f.stderr_at(1.0);
    double target = airy_scale() * airy_zero(1);
    r.rows.push_back({-1.0, gamma3, coef.errors.empty() ? 0.0 : coef.errors.at(3)});
    r.pass = std::fabs(c0 - 0.125) <= 1e-4 && std::fabs(c2 / target - 1) <= 0.01 && std::fabs(c3) > 3 * s3 &&
             std::fabs(c3 / gamma3 - 1) <= 0.05;
    r.detail = "c0-1/8 " + fmt("%.2e", c0 - 0.125) + ", c2 rel " + fmt("%.2e", c2 / target - 1) + ", c3 " +
               fmt("%.5f", c3) + " +- " + fmt("%.1e", s3) + ", gamma3 " + fmt("%.5f", gamma3) + ", rel " +
               fmt("%.2e", c3 / gamma3 - 1);
    return r;
}

CriterionResult c8()
{
    CriterionResult r;
    r.columns = {"theta", "count_below_1", "mu_gui_1", "mu_tri_1", "mu_gui_2", "mu_tri_2"};
    bool ok = true;
    double prev = -1;
    std::ostringstream d;
    for (double th : {0.3, 0.5, 0.8, 1.2}) {
        MeshControls c;
        c.check_truncation = true;
        DomainSolution g;
        try {
            g = solve_domain(DomainSpec::phys_guide(th), 3, c);
        } catch (const TruncationDominant& e) {
            ok = false;
            d << "theta " << th << ": " << e.what() << "; ";
            continue;
        }
        auto t = solve_domain(DomainSpec::phys_triangle(th, true), 3, MeshControls{});
        bool below = !g.pairs.empty();
        bool mono = below && g.pairs[0].value >= prev;
        bool dom = true;
        for (size_t k = 0; k < g.pairs.size() && k < t.pairs.size(); ++k)
            dom = dom && g.pairs[k].value <= t.pairs[k].value;
        if (below) prev = g.pairs[0].value;
        ok = ok && below && mono && dom;
        auto at = [](const DomainSolution& s, size_t k) { return k < s.pairs.size() ? s.pairs[k].value : NAN; };
        r.rows.push_back({th, double(g.pairs.size()), at(g, 0), at(t, 0), at(g, 1), at(t, 1)});
        d << "theta " << th << ": " << g.pairs.size() << " below 1, mu1 " << fmt("%.6f", at(g, 0)) << "; ";
    }
    r.pass = ok;
    r.detail = d.str();
    return r;
}

CriterionResult c9(AcceptanceRunner& run)
{
    CriterionResult r;
    r.columns = {"h", "orth", "orth_dt"};
    const auto& lad = run.triangle_ladder();
    std::vector<double> o, odt;
    for (size_t i = 0; i < lad.h.size(); ++i) {
        auto& s = lad.solutions[i];
        auto m = mode_projection_residual(DomainSpec::scaled_triangle(lad.h[i]), *s.space, s.pairs[0].vector);
        o.push_back(m.orth);
        odt.push_back(m.orth_dt);
        r.rows.push_back({lad.h[i], m.orth, m.orth_dt});
    }
    auto sl = loglog_slope(lad.h, o);
    auto sd = loglog_slope(lad.h, odt);
    r.pass = std::fabs(sl.slope - 1.0 / 3.0) <= 0.15;
    r.detail = "slope " + fmt("%.3f", sl.slope) + " (derivative part " + fmt("%.3f", sd.slope) + "), target 0.333";
    return r;
}

CriterionResult c10(AcceptanceRunner& run)
{
    CriterionResult r;
    r.columns = {"estimate", "h", "weighted_norm"};
    std::ostringstream d;
    bool ok = true;
    auto spread = [&](int id, const std::vector<double>& hs, const std::vector<double>& v, const char* name) {
        for (size_t i = 0; i < hs.size(); ++i) r.rows.push_back({double(id), hs[i], v[i]});
        double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
        bool pass = lo > 0 && hi / lo < 3.0;
        ok = ok && pass;
        d << name << " ratio " << fmt("%.3g", hi / lo) << "; ";
    };
    // eigenvector values below the solver accuracy carry no decay information
    const double floor = 1e-8;
    const auto& tri = run.triangle_ladder();
    std::vector<double> a1, a2;
    for (size_t i = 0; i < tri.h.size(); ++i) {
        auto& s = tri.solutions[i];
        a1.push_back(agmon_weighted_norm_2d(*s.space, s.pairs[0].vector, AgmonWeight::CubicExp, agmon_eta0() / 2, tri.h[i], floor));
        a2.push_back(agmon_weighted_norm_2d(*s.space, s.pairs[0].vector, AgmonWeight::PowerLeft, agmon_rho0() / 2, tri.h[i], floor));
    }
    spread(1, tri.h, a1, "triangle cubic");
    spread(2, tri.h, a2, "triangle power");
    // informational: the power weight normalized to 1 at x = 0, which is what a size-1 bound would track
    std::vector<double> a2n;
    for (size_t i = 0; i < tri.h.size(); ++i)
        a2n.push_back(std::exp(std::log(a2[i]) + agmon_rho0() / 2 / tri.h[i] * std::log(M_PI * std::sqrt(2.0))));
    double lo = *std::min_element(a2n.begin(), a2n.end()), hi = *std::max_element(a2n.begin(), a2n.end());
    d << "(normalized at x = 0: " << fmt("%.3f", hi / lo) << "); ";
    auto hs = geometric_ladder(0.2, 0.7, 10);
    std::vector<double> bo;
    for (double h : hs) bo.push_back(agmon_weighted_norm(bo_solve(Op1D::BOTri, h, 1).at(0), AgmonWeight::CubicExp, agmon_eta0() / 2, h, floor));
    spread(3, hs, bo, "BOTri cubic");
    const auto& gui = run.guide_ladder();
    std::vector<double> g6;
    for (size_t i = 0; i < gui.h.size(); ++i) {
        auto& s = gui.solutions[i];
        g6.push_back(agmon_weighted_norm_2d(*s.space, s.pairs[0].vector, AgmonWeight::ExpRight, agmon_alpha0() / 2, gui.h[i], floor));
    }
    spread(4, gui.h, g6, "guide exp");
    r.pass = ok;
    r.detail = d.str();
    return r;
}

SparseMat random_spd(int n, std::mt19937& rng, double diag_shift)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> col(0, n - 1);
    std::vector<Eigen::Triplet<double>> t;
    std::vector<double> rowsum(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < 3; ++k) {
            int j = col(rng);
            if (j == i) continue;
            double v = u(rng);
            t.emplace_back(i, j, v);
            t.emplace_back(j, i, v);
            rowsum[i] += std::fabs(v);
            rowsum[j] += std::fabs(v);
        }
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, rowsum[i] + diag_shift + std::fabs(u(rng)));
    SparseMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

CriterionResult c11()
{
    CriterionResult r;
    r.columns = {"case", "dimension", "max_relative_diff"};
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> dim(200, 1500);
    double worst = 0;
    for (int c = 0; c < 20; ++c) {
        int n = dim(rng);
        SparseMat a = random_spd(n, rng, 0.01), b = random_spd(n, rng, 1.0);
        EigenOptions opt;
        opt.nev = 6;
        opt.tol = 1e-11;
        auto sp = lowest_eigenpairs(a, b, opt);
        auto de = dense_eigenpairs(a, b, 6);
        double w = 0;
        for (int k = 0; k < 6; ++k)
            w = std::max(w, std::fabs(sp.eigenvalues[k] - de.eigenvalues[k]) / std::fabs(de.eigenvalues[k]));
        worst = std::max(worst, w);
        r.rows.push_back({double(c), double(n), w});
    }
    int n = 1000;
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, -1.0);
            t.emplace_back(i + 1, i, -1.0);
        }
    }
    SparseMat lap(n, n), id(n, n);
    lap.setFromTriplets(t.begin(), t.end());
    id.setIdentity();
    EigenOptions opt;
    opt.nev = 6;
    opt.tol = 1e-12;
    auto rep = lowest_eigenpairs(lap, id, opt);
    double tri = 0;
    for (int k = 0; k < 6; ++k) tri = std::max(tri, std::fabs(rep.eigenvalues[k] - (2 - 2 * std::cos((k + 1) * kPi / (n + 1)))));
    r.rows.push_back({-1.0, double(n), tri});
    r.pass = worst <= 1e-10 && tri <= 1e-10;
    r.detail = "random pencils max rel diff " + fmt("%.2e", worst) + ", tridiagonal max diff " + fmt("%.2e", tri);
    return r;
}

CriterionResult c12()
{
    CriterionResult r;
    r.columns = {"check", "value"};
    const int K = 40;
    // left half-strip: Phi = e^sigma on the second mode
    TransverseBasis b(BasisKind::DirichletSym, K);
    double w1 = b.omega(1);
    DecayField f(Side::Left, K);
    f.add(1, 1.0, {w1 * w1 - 1.0});
    Eigen::VectorXd g = Eigen::VectorXd::Zero(K);
    g[1] = 1.0;
    auto n0 = solve_N0_halfstrip(b, f, g);
    double e_n0 = std::fabs(n0.zeta);
    for (double s : {0.0, -0.5, -1.0, -3.0, -8.0})
        for (int k = 0; k < K; ++k) e_n0 = std::max(e_n0, std::fabs(n0.field.value(k, s) - (k == 1 ? std::exp(s) : 0.0)));

    // two-sided problem with prescribed jump
    InterfaceSystem sys(K);
    const auto& P = sys.projection();
    Eigen::VectorXd lt = Eigen::VectorXd::Zero(K), rt = Eigen::VectorXd::Zero(K);
    lt[0] = 0.7;
    lt[1] = 0.3;
    rt[0] = 1.0;
    rt[1] = 0.5;
    const double zeta_star = 0.25;
    DecayField fl(Side::Left, K), fr(Side::Right, K);
    for (int k = 0; k < 2; ++k) {
        double wl = sys.left().omega(k), wr = sys.right().omega(k);
        fl.add(k, 2.0, {(wl * wl - 4.0) * lt[k]});
        fr.add(k, -2.0, {(wr * wr - 4.0) * rt[k]});
    }
    Eigen::VectorXd g0 = lt - P.transpose() * rt;
    g0[0] -= zeta_star;
    Eigen::VectorXd h = 2.0 * P * lt + 2.0 * rt;
    auto tr = solve_transmission(sys, fl, fr, g0, h);
    double e_tr = std::max(std::fabs(tr.zeta - zeta_star), (tr.g - rt).cwiseAbs().maxCoeff());
    for (double s : {0.0, 0.5, 1.0, 3.0})
        for (int k = 0; k < K; ++k) {
            e_tr = std::max(e_tr, std::fabs(tr.left.value(k, -s) - (k < 2 ? lt[k] * std::exp(-2 * s) : 0.0)));
            e_tr = std::max(e_tr, std::fabs(tr.right.value(k, s) - (k < 2 ? rt[k] * std::exp(-2 * s) : 0.0)));
        }

    std::mt19937 rng(42);
    std::normal_distribution<double> nd;
    double coer = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd v(K);
        for (int k = 0; k < K; ++k) v[k] = nd(rng) / ((k + 1.0) * (k + 1.0));
        coer = std::min(coer, v.dot(sys.apply(v)) / v.squaredNorm());
    }
    r.rows = {{0, e_n0}, {1, e_tr}, {2, coer}};
    r.pass = e_n0 <= 1e-8 && e_tr <= 1e-8 && coer >= 0.6;
    r.detail = "N0 manufactured err " + fmt("%.2e", e_n0) + ", transmission err " + fmt("%.2e", e_tr) +
               ", coercivity " + fmt("%.4f", coer);
    return r;
}

}  // namespace

CriterionResult AcceptanceRunner::run(int id)
{
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        switch (id) {
        case 1: r = c1(); break;
        case 2: r = c2(); break;
        case 3: r = c3(); break;
        case 4: r = c4(); break;
        case 5: r = c5(*this); break;
        case 6: r = c6(*this); break;
        case 7: r = c7(*this); break;
        case 8: r = c8(); break;
        case 9: r = c9(*this); break;
        case 10: r = c10(*this); break;
        case 11: r = c11(); break;
        case 12: r = c12(); break;
        default: throw std::out_of_range("criterion id");
        }
    } catch (const std::out_of_range&) {
        throw;
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.title = title(id);
    r.budget = budget(id);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget) {
        r.pass = false;
        r.detail += " (over runtime budget)";
    }
    return r;
}

std::vector<int> theorem_criteria(const std::string& id)
{
    if (id == "spectrumtoy") return {2, 3};
    if (id == "spectrumBOT") return {4};
    if (id == "spectrumtriangle") return {5, 6, 9};
    if (id == "spectrumguide") return {7};
    if (id == "essprops") return {8};
    throw std::invalid_argument("unknown theorem id: " + id);
}

}  // namespace wguide
