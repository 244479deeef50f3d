#pragma once

#include "wguide/halfstrip.hpp"

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wguide {

struct OutsideDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RecursionInconsistent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Family { Toy, Tri, Gui, BOTri };
std::string family_name(Family f);

struct ExpansionCoefficients {
    Family family = Family::Toy;
    int n = 1;
    int order = 0;
    std::vector<double> coeffs;  // index j: power j/3 (2j/3 for BOTri)
    std::vector<double> errors;  // resolution-change estimates, empty if not computed
    double exponent(int j) const { return family == Family::BOTri ? 2.0 * j / 3.0 : j / 3.0; }
};

struct QuasiOptions {
    int modes = 40;        // transverse modes
    int npts = 0;          // Airy-scale grid size (0: default)
    double length = 0.0;   // Airy-scale truncation (0: default)
    int sign = 1;          // sign convention of the ground profile
    bool estimate_errors = false;
    // guide only: interface modes for the finest level; levels modes/4, modes/2, modes are extrapolated
    int interface_modes = 640;
    bool extrapolate = true;
};

// Airy-scale profile Psi (K x N on ctx.grid, row 0 is the ground-mode amplitude g) plus
// fast-scale fields. Guide fields carry a right part as well.
struct ProfileSet {
    Family family = Family::Tri;
    int n = 1;
    std::shared_ptr<AiryContext> ctx;
    std::shared_ptr<TransverseBasis> basis;        // left transverse basis
    std::shared_ptr<TransverseBasis> right_basis;  // guide only
    std::vector<Eigen::MatrixXd> psi;
    std::vector<DecayField> phi, phi_right;
    std::vector<bool> amplitude_set;  // g_j fixed
    std::vector<bool> fast_set;       // Phi_j fixed
    std::vector<double> zeta;
    int complete_order() const;       // largest J with all profiles 0..J fixed
};

ExpansionCoefficients toy_coefficients(int n, int J, const QuasiOptions& opt = {});
ExpansionCoefficients botri_coefficients(int n, int J, const QuasiOptions& opt = {});

struct TriDiagnostics {
    double neq0_integral = 0.0;        // integral of (N3 Phi_4) sigma c0
    double neq0_error = 0.0;
    double max_odd = 0.0;              // largest odd-rank |beta| below 9
};
std::pair<ExpansionCoefficients, ProfileSet> tri_coefficients(int n, int J, const QuasiOptions& opt = {},
                                                              TriDiagnostics* diag = nullptr);
std::pair<ExpansionCoefficients, ProfileSet> gui_coefficients(int n, int J, const QuasiOptions& opt = {});

// Truncated multi-scale sum at a point (x, y) of the scaled triangle or half-guide.
double assemble_quasimode(const ProfileSet& p, double h, double x, double y, int J);

// Operator families in the slow (s) and fast (sigma) variables, generated from the series of
// the exact operator in (u, t) coordinates; order is the power of h^(1/3).
Eigen::MatrixXd apply_slow_operator(int order, const TransverseBasis& b, const AiryContext& ctx,
                                    const Eigen::MatrixXd& psi);
DecayField apply_fast_operator(int order, const TransverseBasis& b, const DecayField& phi);
DecayField apply_fast_operator_right(int order, const TransverseBasis& b, const DecayField& phi);

double cutoff_left(double x);
double cutoff_right(double sigma);

std::string coefficients_csv(const std::vector<ExpansionCoefficients>& tables, bool header = true);

}  // namespace wguide
