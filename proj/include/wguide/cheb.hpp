#pragma once

#include <Eigen/Dense>

namespace wguide {

// Chebyshev-Gauss-Lobatto grid on [a, b], nodes ascending.
struct ChebGrid {
    double a = -1.0, b = 1.0;
    Eigen::VectorXd x;
    Eigen::MatrixXd d1;  // first-derivative matrix
    Eigen::MatrixXd d2;
    Eigen::VectorXd w;   // Clenshaw-Curtis weights

    ChebGrid() = default;
    ChebGrid(double a, double b, int n);

    int size() const { return int(x.size()); }
    double integrate(const Eigen::VectorXd& f) const { return w.dot(f); }
    // barycentric interpolation of nodal values at an arbitrary point of [a, b]
    double interp(const Eigen::VectorXd& f, double t) const;
    Eigen::VectorXd deriv(const Eigen::VectorXd& f) const { return d1 * f; }
};

}  // namespace wguide
