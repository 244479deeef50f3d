#include "wguide/cheb.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wguide {

ChebGrid::ChebGrid(double a_, double b_, int n) : a(a_), b(b_)
{
    if (n < 3) throw std::invalid_argument("ChebGrid: need at least 3 nodes");
    const int N = n - 1;
    const double pi = std::numbers::pi;
    Eigen::VectorXd y(n);
    // ascending reference nodes y_j = -cos(pi j / N)
    for (int j = 0; j <= N; ++j) y[j] = -std::cos(pi * j / N);
    for (int j = 0; j <= N; ++j) y[j] = (std::fabs(y[j]) < 1e-16) ? 0.0 : y[j];
    Eigen::VectorXd c(n);
    for (int j = 0; j <= N; ++j) c[j] = ((j == 0 || j == N) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            if (i != j) d(i, j) = c[i] / c[j] / (y[i] - y[j]);
    // negative-sum trick for the diagonal
    for (int i = 0; i <= N; ++i) d(i, i) = -d.row(i).sum();
    double scale = 2.0 / (b - a);
    x = 0.5 * (a + b) * Eigen::VectorXd::Ones(n) + 0.5 * (b - a) * y;
    x[0] = a;
    x[N] = b;
    d1 = scale * d;
    d2 = d1 * d1;

    // Clenshaw-Curtis weights on [-1, 1] (Waldvogel form), then scaled
    Eigen::VectorXd wr = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= N; ++j) {
        double theta = pi * j / N;
        double s = 0;
        for (int k = 1; k <= N / 2; ++k) {
            double bk = (2 * k == N) ? 1.0 : 2.0;
            s += bk / (4.0 * k * k - 1.0) * std::cos(2.0 * k * theta);
        }
        double cj = (j == 0 || j == N) ? 1.0 : 2.0;
        wr[j] = cj / N * (1.0 - s);
    }
    w = 0.5 * (b - a) * wr;
}

double ChebGrid::interp(const Eigen::VectorXd& f, double t) const
{
    const int n = size();
    double num = 0, den = 0;
    for (int j = 0; j < n; ++j) {
        double diff = t - x[j];
        if (diff == 0.0) return f[j];
        double wj = ((j == 0 || j == n - 1) ? 0.5 : 1.0) * ((j % 2) ? -1.0 : 1.0);
        num += wj / diff * f[j];
        den += wj / diff;
    }
    return num / den;
}

}  // namespace wguide
