#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wguide {

using SparseMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SingularShift : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument if A is not square and symmetric.
void check_symmetric(const SparseMat& a, const char* what);

class ShiftInvert {
public:
    ShiftInvert(const SparseMat& a, const SparseMat& b, double sigma);

    Vec solve(const Vec& rhs) const;
    double shift() const { return sigma_; }
    // Number of eigenvalues of (A, B) strictly below the shift (Sylvester inertia).
    int negative_pivots() const { return negatives_; }
    long factor_nonzeros() const { return factor_nnz_; }

private:
    Eigen::SimplicialLDLT<SparseMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
    double sigma_;
    int negatives_ = 0;
    long factor_nnz_ = 0;
};

struct EigenOptions {
    int nev = 6;
    double tol = 1e-9;
    double sigma = 0.0;
    unsigned seed = 42;
    int max_iter = 500;
    int dense_below = 0;  // use the dense solver when dim <= dense_below
};

struct EigenSolveReport {
    Vec eigenvalues;
    Mat eigenvectors;
    std::vector<double> residuals;
    int iterations = 0;
    long factor_nonzeros = 0;
    int negative_pivots = 0;
    double shift = 0.0;
    bool dense = false;
};

EigenSolveReport lowest_eigenpairs(const SparseMat& a, const SparseMat& b, const EigenOptions& opt = {});
EigenSolveReport dense_eigenpairs(const SparseMat& a, const SparseMat& b, int nev);

double pair_residual(const SparseMat& a, const SparseMat& b, const Vec& x, double lambda);

void write_coo(std::ostream& os, const SparseMat& m);
SparseMat read_coo(std::istream& is);

}  // namespace wguide
