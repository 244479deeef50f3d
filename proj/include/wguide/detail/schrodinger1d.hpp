#pragma once

#include "wguide/eigensolve.hpp"

#include <cmath>

namespace wguide {

template <class F>
std::vector<EigenPair1D> solve_schrodinger_1d(const std::vector<double>& nodes, double kinetic, F potential,
                                              int n_eigs, double tol, double sigma)
{
    const int nn = int(nodes.size());
    const int n = nn - 2;
    if (n < 3) throw std::invalid_argument("solve_schrodinger_1d: too few nodes");
    std::vector<Eigen::Triplet<double>> ta, tb;
    ta.reserve(3 * n);
    tb.reserve(n);
    for (int i = 1; i <= n; ++i) {
        double hl = nodes[i] - nodes[i - 1], hr = nodes[i + 1] - nodes[i];
        double diag = kinetic * (1.0 / hl + 1.0 / hr);
        diag += 0.5 * hl * potential(nodes[i], -1) + 0.5 * hr * potential(nodes[i], +1);
        ta.emplace_back(i - 1, i - 1, diag);
        if (i < n) {
            ta.emplace_back(i - 1, i, -kinetic / hr);
            ta.emplace_back(i, i - 1, -kinetic / hr);
        }
        tb.emplace_back(i - 1, i - 1, 0.5 * (hl + hr));
    }
    SparseMat a(n, n), b(n, n);
    a.setFromTriplets(ta.begin(), ta.end());
    b.setFromTriplets(tb.begin(), tb.end());
    EigenOptions opt;
    opt.nev = n_eigs;
    opt.tol = tol;
    opt.sigma = sigma;
    EigenSolveReport rep = lowest_eigenpairs(a, b, opt);
    std::vector<EigenPair1D> out;
    for (int k = 0; k < int(rep.eigenvalues.size()); ++k) {
        EigenPair1D p;
        p.eigenvalue = rep.eigenvalues[k];
        p.grid = nodes;
        p.values.assign(nn, 0.0);
        // sign: positive near the maximum of |psi|
        int imax = 0;
        for (int i = 0; i < n; ++i)
            if (std::fabs(rep.eigenvectors(i, k)) > std::fabs(rep.eigenvectors(imax, k))) imax = i;
        double sg = rep.eigenvectors(imax, k) < 0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) p.values[i + 1] = sg * rep.eigenvectors(i, k);
        double nrm = 0;
        for (int i = 0; i + 1 < nn; ++i)
            nrm += 0.5 * (nodes[i + 1] - nodes[i]) * (p.values[i] * p.values[i] + p.values[i + 1] * p.values[i + 1]);
        nrm = std::sqrt(nrm);
        for (double& v : p.values) v /= nrm;
        p.residual = rep.residuals[k];
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace wguide
