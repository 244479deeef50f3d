#pragma once

#include <stdexcept>
#include <vector>

namespace wguide {

struct NoBoundState : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContinuationStall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationDominant : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WeightOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Op1D { Toy, BOTri, BOGui, VApp };

double toy_potential(double z);
double botri_potential(double x);
double bogui_potential(double x);
double vapp_potential(double x);

// Maps of the linearized guide potential onto the toy model: x = 3 pi z / sqrt 2.
double vapp_kappa(double h);
double vapp_x_from_z(double z);

struct EigenPair1D {
    double eigenvalue = 0.0;
    std::vector<double> grid;    // includes Dirichlet end nodes
    std::vector<double> values;  // L2-normalized (trapezoid on grid)
    double residual = 0.0;
};

double toy_eigenvalue_exact(int n, double kappa);
EigenPair1D toy_eigenfunction_exact(int n, double kappa, const std::vector<double>& grid);
std::vector<double> toy_branch_trace(int n, const std::vector<double>& deltas);

std::vector<EigenPair1D> toy_solve_matrix(int n_eigs, double kappa, double truncation = 30.0, int npts = 4000,
                                          double right = 5.0);

struct Disc1D {
    int npts = 4000;
    double xmax = 6.0;            // BOGui Dirichlet truncation
    double left_z = -30.0;        // VApp left end, in toy variable
    double right_z = 5.0;         // VApp right end, in toy variable
    bool check_truncation = false;
    double tol = 1e-10;
};

std::vector<EigenPair1D> bo_solve(Op1D kind, double h, int n_eigs, const Disc1D& disc = {});

enum class AgmonWeight { CubicExp, PowerLeft, ExpRight };

// Natural decay rates of the model potentials near their minimum / singular end.
double agmon_eta0();
double agmon_rho0();
double agmon_alpha0();

// samples with sqrt(psi^2 + scaled psi'^2) below noise_floor * max|psi| count as zero
double agmon_weighted_norm(const EigenPair1D& pair, AgmonWeight kind, double rate, double h,
                           double noise_floor = 1e-15);

// Generic symmetric P1-stiffness / lumped-mass 1D eigen solve on given nodes with
// homogeneous Dirichlet ends. The potential callback receives (x, side) with side = -1
// for the limit from the left and +1 from the right, for jump handling.
template <class F>
std::vector<EigenPair1D> solve_schrodinger_1d(const std::vector<double>& nodes, double kinetic, F potential,
                                              int n_eigs, double tol = 1e-10, double sigma = 0.0);

}  // namespace wguide

#include "wguide/detail/schrodinger1d.hpp"
