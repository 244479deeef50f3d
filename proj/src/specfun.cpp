#include "wguide/specfun.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace wguide {

namespace {

using ld = long double;

constexpr double kSeriesLimit = 4.5;
constexpr double kAsymLimit = 9.0;
constexpr ld kAi0 = 0.355028053887817239260063186004L;
constexpr ld kAip0 = -0.258819403792806798405183560189L;

// Taylor expansion of A'' = -x A about x0, evaluated at x0 + t.
void taylor_step(ld x0, ld t, ld& val, ld& der)
{
    ld a_prev = 0.0L;      // a_{k-1}
    ld a_k = val;          // a_k
    ld a_k1 = der;         // a_{k+1}
    ld tp = 1.0L;
    ld v = a_k;
    ld d = a_k1;
    ld scale = std::fabs(val) + std::fabs(der) + 1e-300L;
    for (int k = 0; k < 400; ++k) {
        ld a_k2 = -(x0 * a_k + a_prev) / ((k + 2) * (k + 1));
        ld tk1 = tp * t;      // t^{k+1}
        v += a_k1 * tk1;
        d += (k + 2) * a_k2 * tk1;
        ld term = std::fabs(a_k1 * tk1) + std::fabs((k + 2) * a_k2 * tk1);
        a_prev = a_k;
        a_k = a_k1;
        a_k1 = a_k2;
        tp = tk1;
        if (k > 8 && term < 1e-22L * scale && std::fabs(a_k * tp) < 1e-22L * scale)
            break;
        scale = std::max(scale, std::fabs(v) + std::fabs(d));
    }
    val = v;
    der = d;
}

void maclaurin(ld x, ld& val, ld& der)
{
    val = kAi0;
    der = -kAip0;
    taylor_step(0.0L, x, val, der);
}

// Ai(y), Ai'(y) for large positive y.
void asym_decay(ld y, ld& ai, ld& aip)
{
    ld zeta = 2.0L / 3.0L * y * std::sqrt(y);
    ld su = 1.0L, sv = 1.0L, u = 1.0L;
    ld last = 1.0L;
    for (int k = 1; k < 200; ++k) {
        u *= ld(6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (ld(2 * k - 1) * 216.0L * k);
        ld v = -ld(6 * k + 1) / ld(6 * k - 1) * u;
        ld zk = std::pow(zeta, ld(-k));
        ld tu = u * zk;
        if (std::fabs(tu) > last) break;
        last = std::fabs(tu);
        ld sg = (k % 2) ? -1.0L : 1.0L;
        su += sg * tu;
        sv += sg * v * zk;
        if (last < 1e-21L) break;
    }
    ld e = std::exp(-zeta) / (2.0L * std::sqrt(std::numbers::pi_v<ld>));
    ld q = std::pow(y, 0.25L);
    ai = e / q * su;
    aip = -e * q * sv;
}

// Ai(-x), Ai'(-x) for large positive x.
void asym_osc(ld x, ld& ai, ld& aip)
{
    ld zeta = 2.0L / 3.0L * x * std::sqrt(x);
    std::array<ld, 200> u{}, v{};
    u[0] = v[0] = 1.0L;
    int kmax = 1;
    ld last = 1.0L;
    for (int k = 1; k < 200; ++k) {
        u[k] = u[k - 1] * ld(6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (ld(2 * k - 1) * 216.0L * k);
        v[k] = -ld(6 * k + 1) / ld(6 * k - 1) * u[k];
        ld t = std::fabs(u[k]) * std::pow(zeta, ld(-k));
        if (t > last) break;
        last = t;
        kmax = k + 1;
        if (t < 1e-21L) break;
    }
    ld pu = 0, qu = 0, pv = 0, qv = 0;
    for (int k = 0; k < kmax; ++k) {
        ld zk = std::pow(zeta, ld(-k));
        int m = k / 2;
        ld sg = (m % 2) ? -1.0L : 1.0L;
        if (k % 2 == 0) {
            pu += sg * u[k] * zk;
            pv += sg * v[k] * zk;
        } else {
            qu += sg * u[k] * zk;
            qv += sg * v[k] * zk;
        }
    }
    ld ph = zeta - std::numbers::pi_v<ld> / 4.0L;
    ld c = std::cos(ph), s = std::sin(ph);
    ld rp = 1.0L / std::sqrt(std::numbers::pi_v<ld>);
    ld q = std::pow(x, 0.25L);
    ai = rp / q * (c * pu + s * qu);
    aip = rp * q * (s * pv - c * qv);
}

}  // namespace

AiryEval airy_rev(double x)
{
    if (!std::isfinite(x) || std::fabs(x) > 200.0)
        throw OutOfRange("airy_rev: |x| > 200");
    ld val, der;
    if (std::fabs(x) <= kSeriesLimit) {
        maclaurin(x, val, der);
    } else if (x >= kAsymLimit) {
        ld ai, aip;
        asym_osc(x, ai, aip);
        val = ai;
        der = -aip;
    } else if (x <= -kAsymLimit) {
        ld ai, aip;
        asym_decay(-x, ai, aip);
        val = ai;
        der = -aip;
    } else {
        // intermediate band: step the ODE in the stable direction
        ld x0;
        if (x > 0) {
            x0 = kSeriesLimit;
            maclaurin(x0, val, der);
        } else {
            x0 = -kAsymLimit;
            ld ai, aip;
            asym_decay(kAsymLimit, ai, aip);
            val = ai;
            der = -aip;
        }
        ld target = x;
        while (std::fabs(target - x0) > 0) {
            ld t = target - x0;
            if (std::fabs(t) > 0.5L) t = t > 0 ? 0.5L : -0.5L;
            taylor_step(x0, t, val, der);
            x0 += t;
            if (std::fabs(target - x0) < 1e-18L) break;
        }
    }
    return {double(val), double(der)};
}

namespace {

double zero_guess(int n)
{
    double t = 3.0 * std::numbers::pi * (4.0 * n - 1.0) / 8.0;
    double t2 = 1.0 / (t * t);
    return std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 * t2 - 5.0 / 36.0 * t2 * t2);
}

double find_zero(int n)
{
    double g = zero_guess(n);
    double lo = g - 0.05, hi = g + 0.05;
    double flo = airy_rev(lo).value, fhi = airy_rev(hi).value;
    while (flo * fhi > 0) {
        lo -= 0.02;
        hi += 0.02;
        flo = airy_rev(lo).value;
        fhi = airy_rev(hi).value;
    }
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = airy_rev(mid).value;
        if (fm * flo <= 0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        AiryEval e = airy_rev(z);
        double dz = e.value / e.derivative;
        z -= dz;
        if (std::fabs(dz) < 1e-16 * z) break;
    }
    return z;
}

struct ZeroCache {
    std::array<std::once_flag, 101> flags;
    std::array<double, 101> zeros{};
    std::array<std::once_flag, 101> nflags;
    std::array<double, 101> norms{};
};

ZeroCache& cache()
{
    static ZeroCache c;
    return c;
}

void check_index(int n)
{
    if (n < 1 || n > 100) throw OutOfRange("airy zero index outside [1,100]");
}

}  // namespace

double airy_zero(int n)
{
    check_index(n);
    auto& c = cache();
    std::call_once(c.flags[n], [&] { c.zeros[n] = find_zero(n); });
    return c.zeros[n];
}

double airy_norm_sq(int n)
{
    check_index(n);
    auto& c = cache();
    std::call_once(c.nflags[n], [&] {
        double z = airy_zero(n);
        QuadRule q = composite_gauss(-(z + 30.0), 0.0, 1.0, 24);
        long double acc = 0;
        for (size_t i = 0; i < q.nodes.size(); ++i) {
            double a = airy_rev(q.nodes[i] + z).value;
            acc += (long double)q.weights[i] * a * a;
        }
        c.norms[n] = double(acc);
    });
    return c.norms[n];
}

namespace {

double eig_scale(int n)
{
    double z = airy_zero(n);
    double sg = airy_rev(z).derivative > 0 ? 1.0 : -1.0;
    return sg / std::sqrt(airy_norm_sq(n));
}

}  // namespace

double airy_eigenfunction(int n, double s)
{
    double z = airy_zero(n);
    double x = s + z;
    if (x < -200.0) return 0.0;
    return eig_scale(n) * airy_rev(x).value;
}

double airy_eigenfunction_deriv(int n, double s)
{
    double z = airy_zero(n);
    double x = s + z;
    if (x < -200.0) return 0.0;
    return eig_scale(n) * airy_rev(x).derivative;
}

QuadRule gauss_legendre(double a, double b, int npts)
{
    if (npts < 1 || npts > 512) throw OutOfRange("gauss_legendre: npts outside [1,512]");
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
    QuadRule q;
    q.nodes.resize(npts);
    q.weights.resize(npts);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    int m = (npts + 1) / 2;
    for (int i = 0; i < m; ++i) {
        long double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        long double dp = 0;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1, p1 = x;
            for (int k = 2; k <= npts; ++k) {
                long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (npts == 1) { p1 = x; p0 = 1; }
            dp = npts * (x * p1 - p0) / (x * x - 1);
            long double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-19L) break;
        }
        if (npts == 1) { x = 0; dp = 1; }
        long double w = 2.0L / ((1 - x * x) * dp * dp);
        q.nodes[i] = double(mid - half * x);
        q.nodes[npts - 1 - i] = double(mid + half * x);
        q.weights[i] = q.weights[npts - 1 - i] = double(half * w);
    }
    return q;
}

QuadRule composite_gauss(double a, double b, double panel, int npts)
{
    int np = std::max(1, int(std::ceil((b - a) / panel - 1e-12)));
    double w = (b - a) / np;
    QuadRule out;
    for (int p = 0; p < np; ++p) {
        QuadRule q = gauss_legendre(a + p * w, a + (p + 1) * w, npts);
        out.nodes.insert(out.nodes.end(), q.nodes.begin(), q.nodes.end());
        out.weights.insert(out.weights.end(), q.weights.begin(), q.weights.end());
    }
    return out;
}

}  // namespace wguide
