#include "wguide/halfstrip.hpp"

#include "wguide/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wguide {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int m)
{
    double f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

bool same_rate(double a, double b) { return std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)); }

double poly_eval(const std::vector<double>& p, double x)
{
    double v = 0;
    for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

}  // namespace

// ---------------------------------------------------------------- bases

TransverseBasis::TransverseBasis(BasisKind kind, int K) : kind_(kind), K_(K)
{
    if (K < 1) throw std::invalid_argument("TransverseBasis: K must be positive");
    // Galerkin matrices on (0, 1); the symmetric basis on (-1, 1) has the same entries
    TransverseBasis half = *this;
    if (kind_ == BasisKind::DirichletSym) half.kind_ = BasisKind::NeumannDirichlet;
    int per = 32;
    QuadRule q = composite_gauss(0.0, 1.0, 1.0 / std::max(1, (K + 7) / 8), per);
    const size_t nq = q.nodes.size();
    Eigen::MatrixXd v(nq, K), dv(nq, K), d2v(nq, K);
    for (size_t i = 0; i < nq; ++i)
        for (int k = 0; k < K; ++k) {
            double t = q.nodes[i];
            v(i, k) = half.eval(k, t);
            dv(i, k) = half.deriv(k, t);
            d2v(i, k) = half.dt2_factor(k) * v(i, k);
        }
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), nq);
    Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(q.nodes.data(), nq);
    Eigen::MatrixXd wv = w.asDiagonal() * v;
    tdt_ = wv.transpose() * (t.asDiagonal() * dv);
    t2dt2_ = wv.transpose() * (t.cwiseAbs2().asDiagonal() * d2v);
    dt_ = wv.transpose() * dv;
    if (kind_ == BasisKind::DirichletSym) dt_.setZero();  // odd integrand on (-1, 1)
}

double TransverseBasis::wavenumber(int k) const
{
    if (kind_ == BasisKind::Dirichlet) return (k + 1) * kPi;
    return (2 * k + 1) * kPi / 2;
}

double TransverseBasis::mu(int k) const
{
    double w = wavenumber(k);
    return w * w / (2 * kPi * kPi);
}

double TransverseBasis::omega(int k) const { return std::sqrt(std::max(0.0, mu(k) - 0.125)); }

double TransverseBasis::eval(int k, double t) const
{
    double w = wavenumber(k);
    switch (kind_) {
    case BasisKind::DirichletSym: return std::cos(w * t);
    case BasisKind::NeumannDirichlet: return std::sqrt(2.0) * std::cos(w * t);
    case BasisKind::Dirichlet: return std::sqrt(2.0) * std::sin(w * t);
    }
    return 0;
}

double TransverseBasis::deriv(int k, double t) const
{
    double w = wavenumber(k);
    switch (kind_) {
    case BasisKind::DirichletSym: return -w * std::sin(w * t);
    case BasisKind::NeumannDirichlet: return -std::sqrt(2.0) * w * std::sin(w * t);
    case BasisKind::Dirichlet: return std::sqrt(2.0) * w * std::cos(w * t);
    }
    return 0;
}

Eigen::VectorXd TransverseBasis::project(const std::function<double(double)>& f, int npts) const
{
    if (npts <= 0) npts = 32;
    QuadRule q = composite_gauss(lower(), upper(), (upper() - lower()) / std::max(1, (K_ + 3) / 4), npts);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(K_);
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        double fv = f(q.nodes[i]) * q.weights[i];
        for (int k = 0; k < K_; ++k) c[k] += fv * eval(k, q.nodes[i]);
    }
    return c;
}

double TransverseBasis::evaluate(const Eigen::VectorXd& c, double t) const
{
    double v = 0;
    for (int k = 0; k < std::min<int>(K_, int(c.size())); ++k) v += c[k] * eval(k, t);
    return v;
}

Eigen::MatrixXd cross_projection(int k_sin, int k_cos)
{
    Eigen::MatrixXd p(k_sin, k_cos);
    for (int k = 0; k < k_sin; ++k)
        for (int l = 0; l < k_cos; ++l) {
            double a = k + 1.0, b = l + 0.5;
            p(k, l) = 2.0 * a / kPi / (a * a - b * b);
        }
    return p;
}

double decay_rate(const TransverseBasis& b, int k, Side side)
{
    double w = b.omega(k);
    return side == Side::Left ? w : -w;
}

// ---------------------------------------------------------------- fields

void DecayField::add(int mode, double rate, const std::vector<double>& poly, double scale)
{
    if (mode < 0 || mode >= K_) throw std::out_of_range("DecayField: mode index");
    if (scale == 0.0 || poly.empty()) return;
    for (auto& t : terms_) {
        if (t.mode == mode && same_rate(t.rate, rate)) {
            if (t.poly.size() < poly.size()) t.poly.resize(poly.size(), 0.0);
            for (size_t i = 0; i < poly.size(); ++i) t.poly[i] += scale * poly[i];
            return;
        }
    }
    Term t{mode, rate, poly};
    for (auto& c : t.poly) c *= scale;
    terms_.push_back(std::move(t));
}

DecayField& DecayField::operator+=(const DecayField& o)
{
    if (o.K_ != K_ || o.side_ != side_) throw std::invalid_argument("DecayField: incompatible fields");
    for (const auto& t : o.terms_) add(t.mode, t.rate, t.poly);
    return *this;
}

DecayField& DecayField::operator*=(double a)
{
    for (auto& t : terms_)
        for (auto& c : t.poly) c *= a;
    return *this;
}

DecayField DecayField::d_sigma() const
{
    DecayField out(side_, K_);
    for (const auto& t : terms_) {
        std::vector<double> q(t.poly.size(), 0.0);
        for (size_t i = 0; i < t.poly.size(); ++i) {
            q[i] += t.rate * t.poly[i];
            if (i > 0) q[i - 1] += i * t.poly[i];
        }
        out.add(t.mode, t.rate, q);
    }
    return out;
}

DecayField DecayField::times_sigma(int power) const
{
    DecayField out(side_, K_);
    for (const auto& t : terms_) {
        std::vector<double> q(power, 0.0);
        q.insert(q.end(), t.poly.begin(), t.poly.end());
        out.add(t.mode, t.rate, q);
    }
    return out;
}

DecayField DecayField::mix(const Eigen::MatrixXd& m) const
{
    if (m.cols() != K_) throw std::invalid_argument("DecayField::mix: size mismatch");
    DecayField out(side_, int(m.rows()));
    for (const auto& t : terms_)
        for (int k = 0; k < m.rows(); ++k) {
            double c = m(k, t.mode);
            if (c != 0.0) out.add(k, t.rate, t.poly, c);
        }
    return out;
}

DecayField DecayField::scale_modes(const Eigen::VectorXd& d) const
{
    DecayField out(side_, K_);
    for (const auto& t : terms_) out.add(t.mode, t.rate, t.poly, d[t.mode]);
    return out;
}

Eigen::VectorXd DecayField::trace() const
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(K_);
    for (const auto& t : terms_) v[t.mode] += t.poly[0];
    return v;
}

Eigen::VectorXd DecayField::trace_d_sigma() const
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(K_);
    for (const auto& t : terms_) v[t.mode] += t.rate * t.poly[0] + (t.poly.size() > 1 ? t.poly[1] : 0.0);
    return v;
}

double DecayField::value(int mode, double sigma) const
{
    double v = 0;
    for (const auto& t : terms_)
        if (t.mode == mode) v += poly_eval(t.poly, sigma) * std::exp(t.rate * sigma);
    return v;
}

double DecayField::value(const TransverseBasis& b, double sigma, double tt) const
{
    double v = 0;
    for (const auto& t : terms_) v += poly_eval(t.poly, sigma) * std::exp(t.rate * sigma) * b.eval(t.mode, tt);
    return v;
}

double DecayField::moment(int mode, int p) const
{
    double acc = 0;
    for (const auto& t : terms_) {
        if (t.mode != mode) continue;
        if ((side_ == Side::Left && !(t.rate > 0)) || (side_ == Side::Right && !(t.rate < 0)))
            throw QuadratureTail("DecayField::moment: profile does not decay");
        for (size_t q = 0; q < t.poly.size(); ++q) {
            int m = p + int(q);
            // left: int_{-inf}^0 s^m e^{r s} = (-1)^m m! / r^{m+1}; right: m! / (-r)^{m+1}
            double base = factorial(m) / std::pow(std::fabs(t.rate), m + 1);
            double sign = (side_ == Side::Left && (m % 2)) ? -1.0 : 1.0;
            acc += t.poly[q] * sign * base;
        }
    }
    return acc;
}

double DecayField::max_abs() const
{
    double m = 0;
    for (const auto& t : terms_)
        for (double c : t.poly) m = std::max(m, std::fabs(c));
    return m;
}

void DecayField::prune(double tol)
{
    std::erase_if(terms_, [&](const Term& t) {
        return std::all_of(t.poly.begin(), t.poly.end(), [&](double c) { return std::fabs(c) <= tol; });
    });
}

void DecayField::check_decay(double min_rate) const
{
    for (const auto& t : terms_) {
        bool zero = std::all_of(t.poly.begin(), t.poly.end(), [](double c) { return c == 0.0; });
        if (zero) continue;
        double r = side_ == Side::Left ? t.rate : -t.rate;
        if (!(r > min_rate)) throw NonDecayingMode("DecayField: term without exponential decay");
    }
}

Eigen::MatrixXd DecayField::sample(const std::vector<double>& sigmas) const
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K_, sigmas.size());
    for (const auto& t : terms_)
        for (size_t i = 0; i < sigmas.size(); ++i)
            out(t.mode, i) += poly_eval(t.poly, sigmas[i]) * std::exp(t.rate * sigmas[i]);
    return out;
}

// ---------------------------------------------------------------- half-strip solves

HalfStripSolve solve_halfstrip_modes(const TransverseBasis& b, const DecayField& f, const Eigen::VectorXd& trace)
{
    if (f.modes() != b.size()) throw std::invalid_argument("halfstrip: basis and field sizes differ");
    f.check_decay();
    const Side side = f.side();
    HalfStripSolve out{DecayField(side, b.size()), 0.0};
    for (const auto& t : f.terms()) {
        const int k = t.mode;
        const double w = b.omega(k), r = t.rate;
        const int deg = int(t.poly.size()) - 1;
        const double d = w * w - r * r;
        std::vector<double> q;
        if (std::fabs(d) > 1e-10 * (1.0 + w * w)) {
            // -Q'' - 2 r Q' + d Q = P
            q.assign(deg + 1, 0.0);
            for (int p = deg; p >= 0; --p) {
                double v = t.poly[p];
                if (p + 1 <= deg) v += 2 * r * (p + 1) * q[p + 1];
                if (p + 2 <= deg) v += (p + 2.0) * (p + 1.0) * q[p + 2];
                q[p] = v / d;
            }
        } else {
            if (std::fabs(r) < 1e-14) throw NonDecayingMode("halfstrip: polynomial forcing of a zero-symbol mode");
            // resonant: R = Q', -R' - 2 r R = P
            std::vector<double> rr(deg + 1, 0.0);
            for (int p = deg; p >= 0; --p) rr[p] = -(t.poly[p] + (p + 1 <= deg ? (p + 1) * rr[p + 1] : 0.0)) / (2 * r);
            q.assign(deg + 2, 0.0);
            for (int p = 0; p <= deg; ++p) q[p + 1] = rr[p] / (p + 1);
        }
        out.field.add(k, r, q);
    }
    Eigen::VectorXd part = out.field.trace();
    for (int k = 0; k < b.size(); ++k) {
        double w = b.omega(k);
        if (w < 1e-14) {
            out.ground_trace = part[k];
            continue;
        }
        double data = k < trace.size() ? trace[k] : 0.0;
        double amp = data - part[k];
        if (amp != 0.0) out.field.add(k, side == Side::Left ? w : -w, {amp});
    }
    return out;
}

N0Result solve_N0_halfstrip(const TransverseBasis& b, const DecayField& f, const Eigen::VectorXd& g)
{
    if (b.kind() == BasisKind::Dirichlet || f.side() != Side::Left)
        throw std::invalid_argument("solve_N0_halfstrip: needs a left field in a cosine basis");
    HalfStripSolve s = solve_halfstrip_modes(b, f, g);
    N0Result r;
    r.field = std::move(s.field);
    double g0 = g.size() ? g[0] : 0.0;
    r.zeta = s.ground_trace - g0;
    r.zeta_formula = (f.empty() ? 0.0 : f.moment(0, 1)) - g0;
    return r;
}

N0Truncated solve_N0_truncated(const TransverseBasis& b, const DecayField& f, const Eigen::VectorXd& g,
                               double length, int npts)
{
    N0Truncated out;
    out.grid = ChebGrid(-length, 0.0, npts);
    const auto& gr = out.grid;
    const int n = gr.size();
    std::vector<double> xs(gr.x.data(), gr.x.data() + n);
    Eigen::MatrixXd fs = f.sample(xs);
    out.profiles = Eigen::MatrixXd::Zero(b.size(), n);
    for (int k = 0; k < b.size(); ++k) {
        double w = b.omega(k);
        double data = k < g.size() ? g[k] : 0.0;
        if (w > 1e-14) {
            Eigen::MatrixXd a = -gr.d2 + w * w * Eigen::MatrixXd::Identity(n, n);
            Eigen::VectorXd rhs = fs.row(k).transpose();
            a.row(0) = gr.d1.row(0);
            a(0, 0) -= w;
            rhs[0] = 0;
            a.row(n - 1).setZero();
            a(n - 1, n - 1) = 1;
            rhs[n - 1] = data;
            out.profiles.row(k) = a.partialPivLu().solve(rhs).transpose();
        } else {
            // unknowns: profile values and zeta; profile and its slope vanish at the far end
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
            a.topLeftCorner(n, n) = -gr.d2;
            rhs.head(n) = fs.row(k).transpose();
            a.row(0).setZero();
            a(0, 0) = 1;
            rhs[0] = 0;
            a.row(n - 1).setZero();
            a(n - 1, n - 1) = 1;
            a(n - 1, n) = -1;
            rhs[n - 1] = data;
            a.block(n, 0, 1, n) = gr.d1.row(0);
            rhs[n] = 0;
            Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
            out.profiles.row(k) = sol.head(n).transpose();
            out.zeta = sol[n];
        }
    }
    return out;
}

Eigen::MatrixXd solve_L0_halfstrip(const TransverseBasis& b, const Eigen::MatrixXd& f, double tol)
{
    if (f.rows() != b.size()) throw std::invalid_argument("solve_L0_halfstrip: row count must equal K");
    double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    if (f.row(0).cwiseAbs().maxCoeff() > tol * scale)
        throw CompatibilityViolation("solve_L0_halfstrip: data not orthogonal to the ground mode");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.rows(), f.cols());
    for (int k = 1; k < b.size(); ++k) out.row(k) = f.row(k) / (b.mu(k) - 0.125);
    return out;
}

Eigen::VectorXd dtn_apply(const TransverseBasis& b, Side side, const Eigen::VectorXd& trace)
{
    Eigen::VectorXd out(trace.size());
    for (int k = 0; k < trace.size(); ++k) {
        double w = b.omega(k);
        if (w < 1e-14) {
            if (side == Side::Left && std::fabs(trace[k]) > 1e-12)
                throw NonDecayingMode("dtn_apply: left trace has a ground-mode component");
            out[k] = 0;
        } else {
            out[k] = w * trace[k];
        }
    }
    return out;
}

// ---------------------------------------------------------------- Airy scale

AiryContext make_airy_context(int n, bool scaled, int npts, double length, int sign)
{
    AiryContext c;
    c.n = n;
    c.scaled = scaled;
    double z = airy_zero(n);
    c.stretch = scaled ? std::pow(4.0 * kPi * std::sqrt(2.0), -1.0 / 3.0) : 1.0;
    c.level = c.stretch * c.stretch * z;
    if (npts <= 0) npts = 140 + 10 * n;
    if (length <= 0) length = (z + 16.0) / c.stretch;
    c.grid = ChebGrid(-length, 0.0, npts);
    c.ground.resize(npts);
    double amp = std::sqrt(c.stretch) * sign;
    for (int i = 0; i < npts; ++i) c.ground[i] = amp * airy_eigenfunction(n, c.stretch * c.grid.x[i]);
    c.ground_d0 = amp * c.stretch * airy_eigenfunction_deriv(n, 0.0);
    return c;
}

Eigen::VectorXd apply_airy_operator(const AiryContext& ctx, const Eigen::VectorXd& g)
{
    const auto& gr = ctx.grid;
    Eigen::VectorXd v = -(gr.d2 * g);
    v -= ((ctx.slope() * gr.x.array() + ctx.level) * g.array()).matrix();
    return v;
}

AiryResolvent solve_airy_resolvent(const AiryContext& ctx, const Eigen::VectorXd& f, double c)
{
    const auto& gr = ctx.grid;
    const int n = gr.size();
    if (f.size() != n) throw std::invalid_argument("solve_airy_resolvent: f must be sampled on the context grid");
    double fmax = f.cwiseAbs().maxCoeff();
    if (fmax > 0 && std::fabs(f[0]) > 1e-10 * fmax)
        throw QuadratureTail("solve_airy_resolvent: data not negligible at the truncated end");

    // bordered collocation: rows = ODE at interior nodes, two boundary rows, gauge row
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    a.topLeftCorner(n, n) = -gr.d2;
    for (int i = 0; i < n; ++i) a(i, i) -= ctx.slope() * gr.x[i] + ctx.level;
    a.block(0, n, n, 1) = -ctx.ground;
    rhs.head(n) = f;
    a.row(0).setZero();
    a(0, 0) = 1;
    rhs[0] = 0;
    a.row(n - 1).setZero();
    a(n - 1, n - 1) = 1;
    rhs[n - 1] = c;
    a.block(n, 0, 1, n) = gr.w.cwiseProduct(ctx.ground).transpose();
    rhs[n] = 0;
    Eigen::VectorXd sol = a.partialPivLu().solve(rhs);

    AiryResolvent r;
    r.g = sol.head(n);
    r.coeff_discrete = sol[n];
    r.coeff = c * ctx.ground_d0 - gr.integrate(f.cwiseProduct(ctx.ground));
    return r;
}

// ---------------------------------------------------------------- interface

InterfaceSystem::InterfaceSystem(int K)
    : K_(K), left_(BasisKind::NeumannDirichlet, K), right_(BasisKind::Dirichlet, K), p_(cross_projection(K, K))
{
    Eigen::VectorXd wl(K), wr(K);
    for (int k = 0; k < K; ++k) wl[k] = left_.omega(k), wr[k] = right_.omega(k);
    a_ = wr.asDiagonal();
    a_ += p_ * wl.asDiagonal() * p_.transpose();
    lu_.compute(a_);
}

TransmissionResult solve_transmission(const InterfaceSystem& sys, const DecayField& f_left,
                                      const DecayField& f_right, const Eigen::VectorXd& g0, const Eigen::VectorXd& h, double mode_tol)
{
    const int K = sys.modes();
    if ((!f_left.empty() && f_left.side() != Side::Left) || (!f_right.empty() && f_right.side() != Side::Right))
        throw std::invalid_argument("solve_transmission: field sides");
    Eigen::VectorXd g0c = Eigen::VectorXd::Zero(K), hs = Eigen::VectorXd::Zero(K);
    g0c.head(std::min<int>(K, int(g0.size()))) = g0.head(std::min<int>(K, int(g0.size())));
    hs.head(std::min<int>(K, int(h.size()))) = h.head(std::min<int>(K, int(h.size())));

    DecayField fl = f_left.empty() ? DecayField(Side::Left, K) : f_left;
    DecayField fr = f_right.empty() ? DecayField(Side::Right, K) : f_right;
    HalfStripSolve l0 = solve_halfstrip_modes(sys.left(), fl, g0c);
    HalfStripSolve r0 = solve_halfstrip_modes(sys.right(), fr, Eigen::VectorXd::Zero(K));
    double zeta0 = l0.ground_trace - g0c[0];
    Eigen::VectorXd jump0 = sys.to_sine(l0.field.trace_d_sigma()) - r0.field.trace_d_sigma();

    TransmissionResult out;
    out.g = sys.solve(hs - jump0);
    if (mode_tol > 0 && std::fabs(out.g[K - 1]) > mode_tol)
        throw TruncationModes("solve_transmission: last interface coefficient above tolerance");
    Eigen::VectorXd gc = sys.to_cosine(out.g);
    HalfStripSolve l1 = solve_halfstrip_modes(sys.left(), DecayField(Side::Left, K), gc);
    HalfStripSolve r1 = solve_halfstrip_modes(sys.right(), DecayField(Side::Right, K), out.g);
    out.left = l0.field + l1.field;
    out.right = r0.field + r1.field;
    out.zeta = zeta0 - gc[0];
    Eigen::VectorXd jump = sys.to_sine(out.left.trace_d_sigma()) - out.right.trace_d_sigma();
    out.residual = (jump - hs).norm() / std::max(1.0, hs.norm());
    if (!(out.residual < 1e-8)) throw std::runtime_error("solve_transmission: modal system not satisfied");
    return out;
}

}  // namespace wguide
