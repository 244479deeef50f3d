#include "wguide/quasimode.hpp"

#include "wguide/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace wguide {

namespace {

constexpr double kPi = std::numbers::pi;
const double kA = 1.0 / (kPi * std::sqrt(2.0));  // 1 / (pi sqrt2)

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

double ipow(double x, int p)
{
    double v = 1;
    for (int i = 0; i < p; ++i) v *= x;
    return v;
}

Mat times_s(const AiryContext& ctx, const Mat& m, int p)
{
    if (p == 0) return m;
    Vec w = ctx.grid.x.array().pow(p).matrix();
    return m * w.asDiagonal();
}

Mat d_s(const AiryContext& ctx, const Mat& m) { return m * ctx.grid.d1.transpose(); }

Vec dt2_diag(const TransverseBasis& b)
{
    Vec d(b.size());
    for (int k = 0; k < b.size(); ++k) d[k] = b.dt2_factor(k);
    return d;
}

double smooth_step(double x)
{
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

void check_order(int J, int lo, int hi, const char* what)
{
    if (J < lo || J > hi) throw std::out_of_range(std::string(what) + ": order outside supported range");
}

}  // namespace

std::string family_name(Family f)
{
    switch (f) {
    case Family::Toy: return "toy";
    case Family::Tri: return "tri";
    case Family::Gui: return "gui";
    case Family::BOTri: return "botri";
    }
    return "?";
}

double cutoff_left(double x) { return smooth_step((x + kPi) / (kPi - kPi / std::sqrt(2.0))); }
double cutoff_right(double sigma) { return 1.0 - smooth_step(sigma - 1.0); }

int ProfileSet::complete_order() const
{
    int j = -1;
    while (j + 1 < int(psi.size()) && amplitude_set[j + 1] && fast_set[j + 1]) ++j;
    return j;
}

// ---------------------------------------------------------------- operator families

// Slow scale u = h^(2/3) s: term of order h^(order/3) of the left operator
// -h^2 d_x^2 - d_y^2 written in (s, t); only even orders are nonzero.
Mat apply_slow_operator(int order, const TransverseBasis& b, const AiryContext& ctx, const Mat& psi)
{
    Mat out = Mat::Zero(psi.rows(), psi.cols());
    if (order % 2) return out;
    const int m = order / 2;
    const Vec d2 = dt2_diag(b);
    auto sgn = [](int p) { return (p % 2) ? -1.0 : 1.0; };
    // -r^{-2} d_t^2
    out += -kA * kA * (m + 1) * sgn(m) * ipow(kA, m) * times_s(ctx, d2.asDiagonal() * psi, m);
    if (m == 0) return out;
    if (m == 1) out += -(psi * ctx.grid.d2.transpose());
    if (m >= 2) {
        // 2 h^2 (t / r) d_u d_t
        int p = m - 2;
        out += 2 * kA * sgn(p) * ipow(kA, p) * times_s(ctx, b.t_dt() * d_s(ctx, psi), p);
    }
    if (m >= 3) {
        // -2 h^2 (t / r^2) d_t and -h^2 (t^2 / r^2) d_t^2
        int p = m - 3;
        double c = kA * kA * (p + 1) * sgn(p) * ipow(kA, p);
        out += -2 * c * times_s(ctx, b.t_dt() * psi, p);
        out += -c * times_s(ctx, b.t2_dt2() * psi, p);
    }
    return out;
}

// Fast scale u = h sigma: term of order h^(order/3); multiples of 3 only.
DecayField apply_fast_operator(int order, const TransverseBasis& b, const DecayField& phi)
{
    DecayField out(phi.side(), phi.modes());
    if (order % 3 || phi.empty()) return out;
    const int m = order / 3;
    const Vec d2 = dt2_diag(b);
    auto sgn = [](int p) { return (p % 2) ? -1.0 : 1.0; };
    out += (-kA * kA * (m + 1) * sgn(m) * ipow(kA, m)) * phi.scale_modes(d2).times_sigma(m);
    if (m == 0) out += -1.0 * phi.d_sigma().d_sigma();
    if (m >= 1) {
        int p = m - 1;
        out += (2 * kA * sgn(p) * ipow(kA, p)) * phi.d_sigma().mix(b.t_dt()).times_sigma(p);
    }
    if (m >= 2) {
        int p = m - 2;
        double c = kA * kA * (p + 1) * sgn(p) * ipow(kA, p);
        out += (-2 * c) * phi.mix(b.t_dt()).times_sigma(p);
        out += (-c) * phi.mix(b.t2_dt2()).times_sigma(p);
    }
    out.prune();
    return out;
}

// Right part of the guide, operator -h^2 (d_u - a d_tau)^2 - a^2 d_tau^2 in (sigma, tau).
DecayField apply_fast_operator_right(int order, const TransverseBasis& b, const DecayField& phi)
{
    DecayField out(phi.side(), phi.modes());
    if (phi.empty()) return out;
    const Vec d2 = dt2_diag(b);
    if (order == 0) {
        out += -1.0 * phi.d_sigma().d_sigma();
        out += (-kA * kA) * phi.scale_modes(d2);
    } else if (order == 3) {
        out += (2 * kA) * phi.d_sigma().mix(b.dt());
    } else if (order == 6) {
        out += (-kA * kA) * phi.scale_modes(d2);
    }
    out.prune();
    return out;
}

// ---------------------------------------------------------------- toy model

namespace {

std::vector<double> toy_run(int n, int J, const QuasiOptions& opt)
{
    AiryContext ctx = make_airy_context(n, false, opt.npts, opt.length, opt.sign);
    const int N = ctx.grid.size();
    std::vector<Vec> psi(J + 1);
    std::vector<std::vector<double>> poly(J + 1);  // right profiles poly(sigma) e^{-sigma}
    std::vector<double> alpha(J + 1, 0.0);
    alpha[0] = ctx.level;
    psi[0] = ctx.ground;
    for (int j = 1; j <= J; ++j) {
        // (-d^2 + 1) (P e^{-s}) = R e^{-s} <=> -P'' + 2 P' = R
        std::vector<double> r;
        for (int k = 0; k + 2 <= j; ++k) {
            const auto& pm = poly[j - 2 - k];
            if (r.size() < pm.size()) r.resize(pm.size(), 0.0);
            for (size_t i = 0; i < pm.size(); ++i) r[i] += alpha[k] * pm[i];
        }
        std::vector<double> q(r.size(), 0.0);
        for (int p = int(r.size()) - 1; p >= 0; --p) q[p] = (r[p] + (p + 1 < int(r.size()) ? (p + 1) * q[p + 1] : 0.0)) / 2;
        double dpsi = (ctx.grid.d1.row(N - 1) * psi[j - 1])(0);
        double q0 = q.empty() ? 0.0 : q[0];
        // slope condition P'(0) - P(0) = Psi'_{j-1}(0)
        double c = q0 - dpsi;
        poly[j].assign(q.size() + 1, 0.0);
        poly[j][0] = c;
        for (size_t p = 0; p < q.size(); ++p) poly[j][p + 1] = q[p] / (p + 1);

        Vec f = Vec::Zero(N);
        for (int k = 1; k < j; ++k) f += alpha[k] * psi[j - k];
        AiryResolvent res = solve_airy_resolvent(ctx, f, c);
        alpha[j] = res.coeff;
        psi[j] = res.g;
    }
    return alpha;
}

template <class Run>
void attach_errors(ExpansionCoefficients& e, const QuasiOptions& opt, Run run)
{
    if (!opt.estimate_errors) return;
    QuasiOptions fine = opt;
    fine.estimate_errors = false;
    fine.modes = 2 * opt.modes;
    fine.interface_modes = 2 * opt.interface_modes;
    AiryContext base = make_airy_context(e.n, e.family != Family::Toy, opt.npts, opt.length);
    fine.npts = 2 * base.grid.size();
    fine.length = 1.25 * (-base.grid.a);
    std::vector<double> c2 = run(fine);
    e.errors.resize(e.coeffs.size());
    for (size_t j = 0; j < e.coeffs.size(); ++j) e.errors[j] = std::fabs(c2[j] - e.coeffs[j]);
}

}  // namespace

ExpansionCoefficients toy_coefficients(int n, int J, const QuasiOptions& opt)
{
    check_order(J, 0, 8, "toy_coefficients");
    if (n < 1 || n > 10) throw std::out_of_range("toy_coefficients: n outside [1,10]");
    ExpansionCoefficients e;
    e.family = Family::Toy;
    e.n = n;
    e.order = J;
    e.coeffs = toy_run(n, J, opt);
    attach_errors(e, opt, [&](const QuasiOptions& o) { return toy_run(n, J, o); });
    return e;
}

// ---------------------------------------------------------------- BO reduction of the triangle

namespace {

std::vector<double> botri_run(int n, int J, const QuasiOptions& opt)
{
    AiryContext ctx = make_airy_context(n, true, opt.npts, opt.length, opt.sign);
    const int N = ctx.grid.size();
    // V(x) = (1/8)(1 + a x)^{-2} = sum_m V_m x^m
    auto vcoef = [](int m) { return 0.125 * (m + 1) * ipow(-kA, m); };
    std::vector<double> beta(J + 1, 0.0);
    std::vector<Vec> psi(J + 1, Vec::Zero(N));
    beta[0] = 0.125;
    if (J >= 1) beta[1] = ctx.level;
    psi[0] = ctx.ground;
    const Vec& s = ctx.grid.x;
    for (int m = 1; m + 1 <= J; ++m) {
        // (H_1 - b_1) Psi_m = sum_{k=2}^{m} (b_k - V_k s^k) Psi_{m+1-k} - V_{m+1} s^{m+1} Psi_0 + b_{m+1} Psi_0
        Vec f = Vec::Zero(N);
        for (int k = 2; k <= m; ++k)
            f += ((beta[k] - vcoef(k) * s.array().pow(k)) * psi[m + 1 - k].array()).matrix();
        f -= (vcoef(m + 1) * s.array().pow(m + 1) * psi[0].array()).matrix();
        AiryResolvent r = solve_airy_resolvent(ctx, f, 0.0);
        beta[m + 1] = r.coeff;
        psi[m] = r.g;
    }
    return beta;
}

}  // namespace

ExpansionCoefficients botri_coefficients(int n, int J, const QuasiOptions& opt)
{
    check_order(J, 0, 8, "botri_coefficients");
    ExpansionCoefficients e;
    e.family = Family::BOTri;
    e.n = n;
    e.order = J;
    e.coeffs = botri_run(n, J, opt);
    attach_errors(e, opt, [&](const QuasiOptions& o) { return botri_run(n, J, o); });
    return e;
}

// ---------------------------------------------------------------- triangle

namespace {

struct TriRun {
    std::vector<double> beta;
    ProfileSet prof;
    double neq0 = 0.0;
};

TriRun tri_run(int n, int J, const QuasiOptions& opt)
{
    TriRun run;
    auto& P = run.prof;
    P.family = Family::Tri;
    P.n = n;
    P.ctx = std::make_shared<AiryContext>(make_airy_context(n, true, opt.npts, opt.length, opt.sign));
    P.basis = std::make_shared<TransverseBasis>(BasisKind::DirichletSym, opt.modes);
    const AiryContext& ctx = *P.ctx;
    const TransverseBasis& b = *P.basis;
    const int K = b.size(), N = ctx.grid.size();

    P.psi.assign(J + 1, Mat::Zero(K, N));
    P.phi.assign(J + 1, DecayField(Side::Left, K));
    P.amplitude_set.assign(J + 1, false);
    P.fast_set.assign(J + 1, false);
    P.zeta.assign(J + 1, 0.0);
    std::vector<double>& beta = run.beta;
    beta.assign(J + 1, 0.0);
    std::vector<double> gval(J + 1, 0.0);

    beta[0] = 0.125;
    P.psi[0].row(0) = ctx.ground.transpose();
    P.amplitude_set[0] = true;
    P.fast_set[0] = true;

    for (int j = 1; j <= J; ++j) {
        if (j == 2) {
            beta[2] = ctx.level;
        } else if (j >= 3) {
            // ground-mode projection fixes g_{j-2} and beta_j
            Vec f = Vec::Zero(N);
            for (int k = 3; k <= j - 1; ++k) f += beta[k] * P.psi[j - k].row(0).transpose();
            for (int k = 2; 2 * k <= j; ++k)
                f -= apply_slow_operator(2 * k, b, ctx, P.psi[j - 2 * k]).row(0).transpose();
            AiryResolvent r = solve_airy_resolvent(ctx, f, gval[j - 2]);
            beta[j] = r.coeff;
            P.psi[j - 2].row(0) = r.g.transpose();
            P.amplitude_set[j - 2] = true;
        }
        // orthogonal part at order j
        Mat rhs = Mat::Zero(K, N);
        for (int k = 2; k <= j; ++k) rhs += beta[k] * P.psi[j - k];
        for (int k = 1; 2 * k <= j; ++k) rhs -= apply_slow_operator(2 * k, b, ctx, P.psi[j - 2 * k]);
        rhs.row(0).setZero();
        P.psi[j] = solve_L0_halfstrip(b, rhs);

        // boundary layer at order j
        DecayField F(Side::Left, K);
        for (int k = 2; k <= j; ++k)
            if (!P.phi[j - k].empty()) F += beta[k] * P.phi[j - k];
        for (int m = 1; 3 * m <= j; ++m) F += -1.0 * apply_fast_operator(3 * m, b, P.phi[j - 3 * m]);
        F.prune();
        Vec G = -P.psi[j].col(N - 1);
        G[0] = 0;
        N0Result r = solve_N0_halfstrip(b, F, G);
        P.phi[j] = r.field;
        P.zeta[j] = r.zeta;
        gval[j] = -r.zeta;
        P.fast_set[j] = true;
    }
    if (J >= 4) run.neq0 = apply_fast_operator(3, b, P.phi[4]).moment(0, 1);
    return run;
}

}  // namespace

std::pair<ExpansionCoefficients, ProfileSet> tri_coefficients(int n, int J, const QuasiOptions& opt,
                                                              TriDiagnostics* diag)
{
    check_order(J, 0, 9, "tri_coefficients");
    if (n < 1 || n > 5) throw std::out_of_range("tri_coefficients: n outside [1,5]");
    TriRun run = tri_run(n, J, opt);
    ExpansionCoefficients e;
    e.family = Family::Tri;
    e.n = n;
    e.order = J;
    e.coeffs = run.beta;
    double scale = 0;
    for (double c : e.coeffs) scale = std::max(scale, std::fabs(c));
    double odd = 0;
    for (int j = 1; j <= std::min(J, 8); j += 2) odd = std::max(odd, std::fabs(e.coeffs[j]));
    if (odd > 1e-7 * scale) throw RecursionInconsistent("tri_coefficients: odd-rank coefficient does not vanish");
    double neq0_fine = run.neq0;
    if (opt.estimate_errors || diag) {
        QuasiOptions fine = opt;
        fine.estimate_errors = false;
        fine.modes = 2 * opt.modes;
        fine.npts = 2 * run.prof.ctx->grid.size();
        fine.length = 1.25 * (-run.prof.ctx->grid.a);
        TriRun r2 = tri_run(n, J, fine);
        neq0_fine = r2.neq0;
        if (opt.estimate_errors) {
            e.errors.resize(e.coeffs.size());
            for (size_t j = 0; j < e.coeffs.size(); ++j) e.errors[j] = std::fabs(r2.beta[j] - e.coeffs[j]);
        }
    }
    if (diag) {
        diag->neq0_integral = run.neq0;
        diag->neq0_error = std::fabs(neq0_fine - run.neq0);
        diag->max_odd = odd;
    }
    return {e, std::move(run.prof)};
}

// ---------------------------------------------------------------- guide

namespace {

struct GuiRun {
    std::vector<double> gamma;
    ProfileSet prof;
};

GuiRun gui_run(int n, int J, int K, const QuasiOptions& opt)
{
    GuiRun run;
    auto& P = run.prof;
    P.family = Family::Gui;
    P.n = n;
    P.ctx = std::make_shared<AiryContext>(make_airy_context(n, true, opt.npts, opt.length, opt.sign));
    InterfaceSystem sys(K);
    P.basis = std::make_shared<TransverseBasis>(sys.left());
    P.right_basis = std::make_shared<TransverseBasis>(sys.right());
    const AiryContext& ctx = *P.ctx;
    const TransverseBasis& bl = sys.left();
    const TransverseBasis& br = sys.right();
    const int N = ctx.grid.size();

    P.psi.assign(J + 1, Mat::Zero(K, N));
    P.phi.assign(J + 1, DecayField(Side::Left, K));
    P.phi_right.assign(J + 1, DecayField(Side::Right, K));
    P.amplitude_set.assign(J + 1, false);
    P.fast_set.assign(J + 1, false);
    P.zeta.assign(J + 1, 0.0);
    auto& gamma = run.gamma;
    gamma.assign(J + 1, 0.0);
    std::vector<double> gval(J + 1, 0.0);

    gamma[0] = 0.125;
    P.psi[0].row(0) = ctx.ground.transpose();
    P.amplitude_set[0] = true;
    P.fast_set[0] = true;

    auto trace_slow = [&](const Mat& m) -> Vec { return m.col(N - 1); };
    auto transmit = [&](int m) {
        DecayField fl(Side::Left, K), fr(Side::Right, K);
        for (int k = 2; k <= m; ++k) {
            if (!P.phi[m - k].empty()) fl += gamma[k] * P.phi[m - k];
            if (!P.phi_right[m - k].empty()) fr += gamma[k] * P.phi_right[m - k];
        }
        for (int q = 1; 3 * q <= m; ++q) {
            fl += -1.0 * apply_fast_operator(3 * q, bl, P.phi[m - 3 * q]);
            fr += -1.0 * apply_fast_operator_right(3 * q, br, P.phi_right[m - 3 * q]);
        }
        fl.prune();
        fr.prune();
        Vec g0 = -trace_slow(P.psi[m]);
        g0[0] = 0;
        // jump of the slope across u = 0, cosine side first
        Vec hc = Vec::Zero(K);
        if (m >= 1) hc -= trace_slow(d_s(ctx, P.psi[m - 1]));
        Vec hs = Vec::Zero(K);
        if (m >= 3) {
            Vec lt = trace_slow(P.psi[m - 3]) + P.phi[m - 3].trace();
            hc += kA * (bl.t_dt() * lt);
            hs -= kA * (br.dt() * P.phi_right[m - 3].trace());
        }
        hs += sys.to_sine(hc);
        TransmissionResult t = solve_transmission(sys, fl, fr, g0, hs);
        P.phi[m] = t.left;
        P.phi_right[m] = t.right;
        P.zeta[m] = t.zeta;
        gval[m] = -t.zeta;
        P.fast_set[m] = true;
    };

    for (int j = 1; j <= J; ++j) {
        if (j == 2) {
            gamma[2] = ctx.level;
        } else if (j >= 3) {
            Vec f = Vec::Zero(N);
            for (int k = 3; k <= j - 1; ++k) f += gamma[k] * P.psi[j - k].row(0).transpose();
            for (int k = 2; 2 * k <= j; ++k)
                f -= apply_slow_operator(2 * k, bl, ctx, P.psi[j - 2 * k]).row(0).transpose();
            AiryResolvent r = solve_airy_resolvent(ctx, f, gval[j - 2]);
            gamma[j] = r.coeff;
            P.psi[j - 2].row(0) = r.g.transpose();
            P.amplitude_set[j - 2] = true;
        }
        // the order j-1 interface problem needs the slope of g_{j-2}
        if (j >= 2) transmit(j - 1);

        Mat rhs = Mat::Zero(K, N);
        for (int k = 2; k <= j; ++k) rhs += gamma[k] * P.psi[j - k];
        for (int k = 1; 2 * k <= j; ++k) rhs -= apply_slow_operator(2 * k, bl, ctx, P.psi[j - 2 * k]);
        rhs.row(0).setZero();
        P.psi[j] = solve_L0_halfstrip(bl, rhs);
    }
    return run;
}

}  // namespace

std::pair<ExpansionCoefficients, ProfileSet> gui_coefficients(int n, int J, const QuasiOptions& opt)
{
    check_order(J, 0, 4, "gui_coefficients");
    if (n < 1 || n > 5) throw std::out_of_range("gui_coefficients: n outside [1,5]");
    const int K = opt.interface_modes;
    GuiRun fine = gui_run(n, J, K, opt);
    ExpansionCoefficients e;
    e.family = Family::Gui;
    e.n = n;
    e.order = J;
    e.coeffs = fine.gamma;
    e.errors.assign(J + 1, 0.0);
    if (opt.extrapolate && K >= 16) {
        // interface traces carry a corner singularity; coefficients converge algebraically in K
        GuiRun r1 = gui_run(n, J, K / 4, opt), r2 = gui_run(n, J, K / 2, opt);
        for (int j = 0; j <= J; ++j) {
            double x1 = r1.gamma[j], x2 = r2.gamma[j], x3 = fine.gamma[j];
            double d1 = x2 - x1, d2 = x3 - x2;
            double v = x3;
            if (std::fabs(d1 - d2) > 0 && std::fabs(d2) < std::fabs(d1)) v = x3 - d2 * d2 / (d2 - d1);
            e.coeffs[j] = v;
            e.errors[j] = std::fabs(v - x3);
        }
    }
    return {e, std::move(fine.prof)};
}

// ---------------------------------------------------------------- assembly

namespace {

double slow_value(const ProfileSet& p, const Mat& psi, const TransverseBasis& b, double s, double t)
{
    const AiryContext& ctx = *p.ctx;
    if (s < ctx.grid.a) return 0.0;
    double v = 0;
    for (int k = 0; k < psi.rows(); ++k) {
        if (psi.row(k).cwiseAbs().maxCoeff() == 0.0) continue;
        v += ctx.grid.interp(psi.row(k).transpose(), s) * b.eval(k, t);
    }
    return v;
}

}  // namespace

double assemble_quasimode(const ProfileSet& p, double h, double x, double y, int J)
{
    if (!(h > 0)) throw std::invalid_argument("assemble_quasimode: h must be positive");
    const double pis2 = kPi * std::sqrt(2.0);
    const double tol = 1e-12;
    const int need = p.family == Family::Gui ? J + 2 : J;
    if (J < 0 || need > p.complete_order()) throw std::out_of_range("assemble_quasimode: profiles not built to this order");
    const double hs = std::pow(h, 2.0 / 3.0);
    auto hp = [&](int j) { return std::pow(h, j / 3.0); };

    if (p.family == Family::Tri) {
        if (x < -pis2 - tol || x > tol || std::fabs(y) > x + pis2 + tol) throw OutsideDomain("point outside the triangle");
        double r = x + pis2;
        if (r <= 0) return 0.0;
        double t = std::clamp(y / r, -1.0, 1.0);
        double v = 0;
        for (int j = 0; j <= J; ++j)
            v += hp(j) * (slow_value(p, p.psi[j], *p.basis, x / hs, t) + p.phi[j].value(*p.basis, x / h, t));
        return cutoff_left(x) * v;
    }
    if (p.family != Family::Gui) throw std::invalid_argument("assemble_quasimode: family has no two-dimensional profiles");
    const TransverseBasis& bl = *p.basis;
    const TransverseBasis& br = *p.right_basis;
    if (x <= 0) {
        if (x < -pis2 - tol || y < -tol || y > x + pis2 + tol) throw OutsideDomain("point outside the half-guide");
        double r = x + pis2;
        if (r <= 0) return 0.0;
        double t = std::clamp(y / r, 0.0, 1.0);
        double v = 0;
        for (int j = 0; j <= need; ++j)
            v += hp(j) * (slow_value(p, p.psi[j], bl, x / hs, t) + p.phi[j].value(bl, x / h, t));
        return cutoff_left(x) * v;
    }
    if (y < x - tol || y > x + pis2 + tol) throw OutsideDomain("point outside the half-guide");
    double tau = std::clamp((y - x) / pis2, 0.0, 1.0);
    double sigma = x / h;
    double v = 0;
    for (int j = 0; j <= need; ++j) v += hp(j) * p.phi_right[j].value(br, sigma, tau);
    // slope correction restoring the conormal condition above the retained order
    const int N = p.ctx->grid.size();
    double corr = 0;
    {
        Mat dpsi = d_s(*p.ctx, p.psi[need]);
        corr += hp(J) * bl.evaluate(dpsi.col(N - 1), tau);
    }
    for (int j = J; j <= need; ++j) {
        Vec lt = p.psi[j].col(N - 1) + p.phi[j].trace();
        double tdt = 0;
        for (int k = 0; k < lt.size(); ++k) tdt += lt[k] * tau * bl.deriv(k, tau);
        corr -= hp(j) * kA * tdt;
        Vec rt = p.phi_right[j].trace();
        double dtau = 0;
        for (int k = 0; k < rt.size(); ++k) dtau += rt[k] * br.deriv(k, tau);
        corr += hp(j) * kA * dtau;
    }
    return v + x * cutoff_right(sigma) * corr;
}

std::string coefficients_csv(const std::vector<ExpansionCoefficients>& tables, bool header)
{
    std::ostringstream os;
    os.precision(16);
    if (header) os << "family,n,j,exponent,value,error_estimate\n";
    for (const auto& t : tables)
        for (size_t j = 0; j < t.coeffs.size(); ++j) {
            os << family_name(t.family) << ',' << t.n << ',' << j << ',' << t.exponent(int(j)) << ',' << t.coeffs[j]
               << ',';
            if (j < t.errors.size())
                os << t.errors[j];
            else
                os << "nan";
            os << '\n';
        }
    return os.str();
}

}  // namespace wguide
