#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wguide {

struct OutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct AiryEval {
    double value;
    double derivative;
};

// A(x) = Ai(-x) and its derivative.
AiryEval airy_rev(double x);

// n-th positive zero of A, n in [1, 100].
double airy_zero(int n);

// Normalized eigenfunction of -d^2/ds^2 - s on s < 0 with Dirichlet at 0,
// g(s) = A(s + z_n) / N_n, sign chosen so that g'(0) > 0.
double airy_eigenfunction(int n, double s);
double airy_eigenfunction_deriv(int n, double s);

// Squared normalization N_n^2 (computed by quadrature).
double airy_norm_sq(int n);

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadRule gauss_legendre(double a, double b, int npts);

// Composite Gauss-Legendre on [a, b] with panels of width at most `panel`.
QuadRule composite_gauss(double a, double b, double panel, int npts);

}  // namespace wguide
