#pragma once

#include "wguide/cheb.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace wguide {

struct NonDecayingMode : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureTail : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CompatibilityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationModes : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Transverse eigenmodes of -(1/(2 pi^2)) d^2/dt^2.
//   DirichletSym      even modes cos((2k-1) pi t / 2) on (-1, 1)
//   NeumannDirichlet  sqrt2 cos((2k-1) pi t / 2) on (0, 1)
//   Dirichlet         sqrt2 sin(k pi t) on (0, 1)
// The first two have identical coefficient algebra; only pointwise values differ.
enum class BasisKind { DirichletSym, NeumannDirichlet, Dirichlet };

class TransverseBasis {
public:
    TransverseBasis(BasisKind kind, int K);

    BasisKind kind() const { return kind_; }
    int size() const { return K_; }
    double lower() const { return kind_ == BasisKind::DirichletSym ? -1.0 : 0.0; }
    double upper() const { return 1.0; }

    // modes are numbered 0..K-1 here; mode 0 is the ground mode
    double mu(int k) const;
    double omega(int k) const;  // sqrt(mu - 1/8), 0 for the ground NeumannDirichlet/DirichletSym mode
    double wavenumber(int k) const;
    double eval(int k, double t) const;
    double deriv(int k, double t) const;
    double dt2_factor(int k) const { return -wavenumber(k) * wavenumber(k); }

    // Galerkin matrices M(k, l) = <op phi_l, phi_k>
    const Eigen::MatrixXd& t_dt() const { return tdt_; }
    const Eigen::MatrixXd& t2_dt2() const { return t2dt2_; }
    const Eigen::MatrixXd& dt() const { return dt_; }

    Eigen::VectorXd project(const std::function<double(double)>& f, int npts = 0) const;
    double evaluate(const Eigen::VectorXd& coeffs, double t) const;

private:
    BasisKind kind_;
    int K_;
    Eigen::MatrixXd tdt_, t2dt2_, dt_;
};

// P(k, l) = <sqrt2 cos((2l-1) pi t / 2), sqrt2 sin(k pi t)> on (0, 1): cosine -> sine coefficients.
Eigen::MatrixXd cross_projection(int k_sin, int k_cos);

enum class Side { Left, Right };

// Transverse-modal field on a half-strip whose profiles are finite sums
// poly(sigma) * exp(rate * sigma). Left fields live on sigma <= 0 and need rate > 0,
// right fields on sigma >= 0 with rate < 0.
class DecayField {
public:
    struct Term {
        int mode;
        double rate;
        std::vector<double> poly;  // ascending powers of sigma
    };

    DecayField() = default;
    DecayField(Side side, int K) : side_(side), K_(K) {}

    Side side() const { return side_; }
    int modes() const { return K_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add(int mode, double rate, const std::vector<double>& poly, double scale = 1.0);
    DecayField& operator+=(const DecayField& o);
    DecayField& operator*=(double a);
    friend DecayField operator+(DecayField a, const DecayField& b) { return a += b; }
    friend DecayField operator*(double s, DecayField a) { return a *= s; }

    DecayField d_sigma() const;
    DecayField times_sigma(int power = 1) const;
    // new mode k = sum_l M(k, l) old mode l
    DecayField mix(const Eigen::MatrixXd& m) const;
    DecayField scale_modes(const Eigen::VectorXd& d) const;

    Eigen::VectorXd trace() const;        // profiles at sigma = 0
    Eigen::VectorXd trace_d_sigma() const;
    double value(int mode, double sigma) const;
    double value(const TransverseBasis& b, double sigma, double t) const;
    // integral over the half line of sigma^p times the mode profile
    double moment(int mode, int p) const;
    double max_abs() const;
    void prune(double tol = 0.0);
    void check_decay(double min_rate = 1e-12) const;

    Eigen::MatrixXd sample(const std::vector<double>& sigmas) const;

private:
    Side side_ = Side::Left;
    int K_ = 0;
    std::vector<Term> terms_;
};

// Per-mode decay rates of a side; rate carries the sign of decay toward infinity.
double decay_rate(const TransverseBasis& b, int k, Side side);

// Solves (-d_sigma^2 - (1/(2 pi^2)) d_t^2 - 1/8) Phi = F on the half strip with trace
// boundary values; mode-wise exact. The ground mode (zero symbol) takes no boundary
// data; its trace is returned in ground_trace.
struct HalfStripSolve {
    DecayField field;
    double ground_trace = 0.0;
};
HalfStripSolve solve_halfstrip_modes(const TransverseBasis& b, const DecayField& f, const Eigen::VectorXd& trace);

struct N0Result {
    DecayField field;
    double zeta = 0.0;
    double zeta_formula = 0.0;  // closed-form value, integral of F sigma c0 minus <G, c0>
};
N0Result solve_N0_halfstrip(const TransverseBasis& b, const DecayField& f, const Eigen::VectorXd& g);

// Reference version of the left solve on a truncated interval [-length, 0]:
// Chebyshev collocation per mode with Robin closure profile' = omega profile at the far end.
struct N0Truncated {
    ChebGrid grid;
    Eigen::MatrixXd profiles;  // K x npts
    double zeta = 0.0;
};
N0Truncated solve_N0_truncated(const TransverseBasis& b, const DecayField& f, const Eigen::VectorXd& g,
                               double length = 30.0, int npts = 80);

// F is K x N: row k holds mode k sampled on an s grid. Returns the orthogonal part of the
// solution of (L0 - 1/8) Psi = F with a zero ground row.
Eigen::MatrixXd solve_L0_halfstrip(const TransverseBasis& b, const Eigen::MatrixXd& f, double tol = 1e-10);

Eigen::VectorXd dtn_apply(const TransverseBasis& b, Side side, const Eigen::VectorXd& trace);

// Airy-scale one-dimensional problems.
// unscaled: (-d^2 - s - z_n) g = f + coeff g_n;
// scaled:   (-d^2 - s / (4 pi sqrt2) - (4 pi sqrt2)^(-2/3) z_n) g = f + coeff g_n.
struct AiryContext {
    int n = 1;
    bool scaled = false;
    double stretch = 1.0;  // argument scale of the Airy function
    double level = 0.0;    // eigenvalue of the 1D operator
    ChebGrid grid;         // on [-length, 0]
    Eigen::VectorXd ground;
    double ground_d0 = 0.0;  // derivative at s = 0, positive by convention
    double slope() const { return stretch * stretch * stretch; }
};
AiryContext make_airy_context(int n, bool scaled, int npts = 0, double length = 0.0, int sign = 1);

struct AiryResolvent {
    Eigen::VectorXd g;
    double coeff = 0.0;
    double coeff_discrete = 0.0;  // from the bordered solve, for cross-checking
};
AiryResolvent solve_airy_resolvent(const AiryContext& ctx, const Eigen::VectorXd& f, double c);
Eigen::VectorXd apply_airy_operator(const AiryContext& ctx, const Eigen::VectorXd& g);

// Guide interface problem. Left basis NeumannDirichlet, right basis Dirichlet, with the same K.
class InterfaceSystem {
public:
    explicit InterfaceSystem(int K);
    int modes() const { return K_; }
    const TransverseBasis& left() const { return left_; }
    const TransverseBasis& right() const { return right_; }
    const Eigen::MatrixXd& projection() const { return p_; }
    const Eigen::MatrixXd& matrix() const { return a_; }  // T^rig + T^lef Pi_1 in the sine basis

    Eigen::VectorXd apply(const Eigen::VectorXd& g) const { return a_ * g; }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }
    Eigen::VectorXd to_sine(const Eigen::VectorXd& cos_coeffs) const { return p_ * cos_coeffs; }
    Eigen::VectorXd to_cosine(const Eigen::VectorXd& sin_coeffs) const { return p_.transpose() * sin_coeffs; }

private:
    int K_;
    TransverseBasis left_, right_;
    Eigen::MatrixXd p_, a_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct TransmissionResult {
    DecayField left, right;
    double zeta = 0.0;
    Eigen::VectorXd g;  // sine coefficients of the right trace
    double residual = 0.0;
};
// Left trace = G + G0 + zeta c0, right trace = G, d_sigma(left) - d_sigma(right) = H on the interface.
// g0 in cosine coefficients, h in sine coefficients. A positive mode_tol raises TruncationModes when
// the last retained coefficient of G exceeds it.
TransmissionResult solve_transmission(const InterfaceSystem& sys, const DecayField& f_left, const DecayField& f_right,
                                      const Eigen::VectorXd& g0, const Eigen::VectorXd& h, double mode_tol = -1.0);

}  // namespace wguide
