#include "wguide/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

namespace wguide {

void check_symmetric(const SparseMat& a, const char* what)
{
    if (a.rows() != a.cols())
        throw std::invalid_argument(std::string(what) + ": matrix not square");
    SparseMat d = SparseMat(a.transpose()) - a;
    double na = a.norm();
    if (d.norm() > 1e-13 * (na + 1e-300))
        throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
}

ShiftInvert::ShiftInvert(const SparseMat& a, const SparseMat& b, double sigma) : sigma_(sigma)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("ShiftInvert: dimension mismatch");
    SparseMat k = a - sigma * b;
    k.prune(1e-300, 1.0);
    ldlt_.compute(k);
    if (ldlt_.info() != Eigen::Success) throw SingularShift("factorization failed");
    const Vec& d = ldlt_.vectorD();
    double dmax = d.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (std::fabs(d[i]) <= 1e-14 * dmax || !std::isfinite(d[i]))
            throw SingularShift("near-zero pivot at shift");
        if (d[i] < 0) ++negatives_;
    }
    factor_nnz_ = ldlt_.matrixL().nestedExpression().nonZeros();
}

Vec ShiftInvert::solve(const Vec& rhs) const
{
    return ldlt_.solve(rhs);
}

double pair_residual(const SparseMat& a, const SparseMat& b, const Vec& x, double lambda)
{
    Vec bx = b * x;
    return (a * x - lambda * bx).norm() / bx.norm();
}

EigenSolveReport dense_eigenpairs(const SparseMat& a, const SparseMat& b, int nev)
{
    Mat ad(a), bd(b);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ad, bd);
    if (es.info() != Eigen::Success) throw NoConvergence("dense generalized eigensolver failed");
    int k = std::min<int>(nev, int(a.rows()));
    EigenSolveReport rep;
    rep.dense = true;
    rep.eigenvalues = es.eigenvalues().head(k);
    rep.eigenvectors = es.eigenvectors().leftCols(k);
    for (int i = 0; i < k; ++i)
        rep.residuals.push_back(pair_residual(a, b, rep.eigenvectors.col(i), rep.eigenvalues[i]));
    return rep;
}

namespace {

double bdot(const SparseMat& b, const Vec& x, const Vec& y)
{
    return x.dot(b * y);
}

void reorth(const SparseMat& b, const std::vector<Vec>& q, Vec& w)
{
    for (int pass = 0; pass < 2; ++pass) {
        Vec bw = b * w;
        for (const Vec& qi : q) w -= qi.dot(bw) * qi;
    }
}

}  // namespace

EigenSolveReport lowest_eigenpairs(const SparseMat& a, const SparseMat& b, const EigenOptions& opt)
{
    if (opt.nev < 1 || opt.nev > 40) throw std::invalid_argument("lowest_eigenpairs: nev outside [1,40]");
    check_symmetric(a, "A");
    check_symmetric(b, "B");
    const int n = int(a.rows());
    if (n <= opt.dense_below || n <= std::max(opt.nev + 10, 3 * opt.nev)) return dense_eigenpairs(a, b, opt.nev);

    double sigma = opt.sigma;
    std::unique_ptr<ShiftInvert> op;
    for (int attempt = 0; attempt < 5 && !op; ++attempt) {
        try {
            op = std::make_unique<ShiftInvert>(a, b, sigma);
        } catch (const SingularShift&) {
            sigma = sigma - 1e-7 * (1.0 + std::fabs(sigma)) * (attempt + 1);
        }
    }
    if (!op) throw SingularShift("could not factorize A - sigma B");
    const int below = op->negative_pivots();
    const int nev = opt.nev;

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd;
    auto random_vec = [&] {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = nd(rng);
        return v;
    };

    std::vector<Vec> q;
    std::vector<double> alpha, beta;
    Vec v = random_vec();
    v = op->solve(b * v);
    v /= std::sqrt(bdot(b, v, v));
    q.push_back(v);

    EigenSolveReport rep;
    rep.shift = sigma;
    rep.negative_pivots = below;
    rep.factor_nonzeros = op->factor_nonzeros();

    const int max_steps = std::min(opt.max_iter, n);
    for (int j = 0; j < max_steps; ++j) {
        Vec w = op->solve(b * q[j]);
        double aj = bdot(b, w, q[j]);
        w -= aj * q[j];
        if (j > 0) w -= beta[j - 1] * q[j - 1];
        reorth(b, q, w);
        double bj = std::sqrt(std::max(0.0, bdot(b, w, w)));
        alpha.push_back(aj);
        beta.push_back(bj);
        int m = j + 1;
        bool check = (m >= nev + below + 4 && m % 4 == 0) || m == max_steps || bj < 1e-14 * std::fabs(aj);
        if (check) {
            Vec diag = Eigen::Map<Vec>(alpha.data(), m);
            Vec sub = m > 1 ? Vec(Eigen::Map<Vec>(beta.data(), m - 1)) : Vec();
            Eigen::SelfAdjointEigenSolver<Mat> ts;
            ts.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            // Ritz values in the original spectrum
            std::vector<std::pair<double, int>> ritz;
            for (int i = 0; i < m; ++i) {
                double th = ts.eigenvalues()[i];
                if (std::fabs(th) < 1e-300) continue;
                double est = std::fabs(bj * ts.eigenvectors()(m - 1, i));
                if (est / (th * th) < opt.tol || bj == 0.0)
                    ritz.push_back({sigma + 1.0 / th, i});
            }
            std::sort(ritz.begin(), ritz.end());
            int nbelow = 0, nabove = 0;
            for (auto& r : ritz) (r.first < sigma ? nbelow : nabove)++;
            int need_above = std::max(0, nev - below);
            bool ok = nbelow >= below && nabove >= std::min(need_above, n - below);
            if (ok) {
                int k = std::min<int>(nev, int(ritz.size()));
                Mat qm(n, m);
                for (int i = 0; i < m; ++i) qm.col(i) = q[i];
                Vec vals(k);
                Mat vecs(n, k);
                std::vector<double> res;
                bool good = true;
                for (int i = 0; i < k; ++i) {
                    vals[i] = ritz[i].first;
                    Vec x = qm * ts.eigenvectors().col(ritz[i].second);
                    x /= std::sqrt(bdot(b, x, x));
                    vecs.col(i) = x;
                    double r = pair_residual(a, b, x, vals[i]);
                    res.push_back(r);
                    if (r > opt.tol) good = false;
                }
                if (good || m == max_steps) {
                    if (!good) throw NoConvergence("Lanczos residual above tolerance");
                    rep.eigenvalues = vals;
                    rep.eigenvectors = vecs;
                    rep.residuals = res;
                    rep.iterations = m;
                    return rep;
                }
            }
        }
        if (bj < 1e-14 * std::fabs(aj) || bj == 0.0) {
            // invariant subspace: continue with a fresh direction
            Vec r = random_vec();
            reorth(b, q, r);
            r /= std::sqrt(bdot(b, r, r));
            beta.back() = 0.0;
            q.push_back(r);
        } else {
            q.push_back(w / bj);
        }
    }
    throw NoConvergence("Lanczos: no convergence within iteration limit");
}

void write_coo(std::ostream& os, const SparseMat& m)
{
    os.precision(17);
    os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMat::InnerIterator it(m, k); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

SparseMat read_coo(std::istream& is)
{
    long rows, cols, nnz;
    if (!(is >> rows >> cols >> nnz)) throw std::runtime_error("read_coo: bad header");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(nnz);
    for (long i = 0; i < nnz; ++i) {
        long r, c;
        double v;
        if (!(is >> r >> c >> v)) throw std::runtime_error("read_coo: truncated");
        t.emplace_back(int(r), int(c), v);
    }
    SparseMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace wguide
