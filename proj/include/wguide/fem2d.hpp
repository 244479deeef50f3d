#pragma once

#include "wguide/eigensolve.hpp"
#include "wguide/model1d.hpp"

#include <array>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wguide {

struct DegenerateGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ElementQuality : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResamplingOutOfDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DomainKind { PhysTriangle, ScaledTriangle, PhysGuideHalf, ScaledGuideHalf, Rectangle, RightTriangle, RectangleRec };

struct DomainSpec {
    DomainKind kind = DomainKind::Rectangle;
    double theta = 0.0;  // physical opening
    double h = 0.0;      // semiclassical parameter of scaled domains (tan theta)
    double extent = 0.0; // truncation: x_max (physical guide) or u_max (scaled guide); 0 = default
    double a = 0.0, b = 0.0;
    bool half = false;   // triangles: keep y > 0 with Neumann on y = 0

    static DomainSpec phys_triangle(double theta, bool half = false);
    static DomainSpec scaled_triangle(double h, bool half = false);
    static DomainSpec phys_guide(double theta, double x_max = 0.0);
    static DomainSpec scaled_guide(double h, double u_max = 0.0);
    static DomainSpec rectangle(double a, double b);
    static DomainSpec right_triangle(double leg);
    static DomainSpec rectangle_rec(double h);  // (u, t) realization of the scaled triangle

    double semiclassical() const;   // h used for grading
    double default_extent() const;
    double threshold() const;       // bottom of the continuous spectrum, +inf for bounded domains
    bool is_guide() const { return kind == DomainKind::PhysGuideHalf || kind == DomainKind::ScaledGuideHalf; }
};

struct Grading {
    bool graded = true;
    double ratio = 0.8;       // size ratio between neighbouring elements away from the wall
    double wall = 0.05;       // element size at x = 0, in units of h
    double plateau = 0.5;     // size in the Airy zone, in units of h^(2/3)
    double zone = 45.0;       // Airy zone width, in units of h^(2/3)
    double right = 0.4;       // size on the straight part, in units of h
    int transverse = 12;      // intervals per unit of the transverse variable
    int corner_layers = -1;   // geometric layers toward the Neumann/Dirichlet corner (-1: 8 for guides)
    int bisect = 0;           // uniform refinements of the node lists
};

enum class EdgeTag { Dirichlet, Neumann };

// Tensor block in mapped coordinates (u, v); each quad is split along its (i,j)-(i+1,j+1) diagonal.
struct MeshBlock {
    // Identity (u, v); TriangleLeft (u, v (u + param)); GuideRight (u, u + param v);
    // RightTriangle keeps the nodes with i + j <= n and splits along anti-diagonals
    enum class Map { Identity, TriangleLeft, GuideRight, RightTriangle } map = Map::Identity;
    double param = 0.0;
    std::vector<double> u, v;
    std::vector<int> vertex;       // (nu) x (nv), row-major in u, -1 if absent
    std::vector<int> tri_lower, tri_upper;  // per quad, -1 if degenerate
    int vid(int i, int j) const { return vertex[size_t(i) * v.size() + j]; }
};

struct Mesh {
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> edges;  // boundary edges
    std::vector<EdgeTag> tags;
    std::vector<MeshBlock> blocks;
    double scale_x = 1.0, scale_y = 1.0;   // physical = mapped-block coordinates times scale
    std::string grading_note;

    double min_angle_deg() const;
    double min_edge_near(double x0, double radius) const;
    double area() const;
    double tagged_length(EdgeTag tag) const;
    // triangle containing a point given in block coordinates (x, y) before scaling, or -1
    int locate(double x, double y) const;
};

Mesh build_mesh(const DomainSpec& spec, double target_h, const Grading& grading = {});
void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);

struct FemSpace {
    std::shared_ptr<const Mesh> mesh;
    int order = 2;
    int ndof = 0;
    std::vector<std::array<int, 6>> elem_dofs;
    std::vector<std::array<double, 2>> dof_xy;  // physical coordinates
    std::vector<int> free_index;                // -1 on Dirichlet dofs
    int nfree = 0;

    Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
    // value and gradient (physical coordinates) at a point of element e given barycentrics
    double eval(const Eigen::VectorXd& full, int e, const std::array<double, 3>& bary, double* gx = nullptr,
                double* gy = nullptr) const;
};

struct SparseSymmetricPencil {
    SparseMat stiffness, mass;
    std::shared_ptr<FemSpace> space;
};

SparseSymmetricPencil assemble(const DomainSpec& spec, std::shared_ptr<const Mesh> mesh, int element_order = 2);

struct MeshControls {
    double target_h = 0.3;
    Grading grading;
    int order = 2;
    bool richardson = true;
    int levels = 2;  // 2: fixed-rate extrapolation; 3: rate observed from three nested meshes
    bool check_truncation = false;
    double tol = 1e-9;
};

struct DomainEigenpair {
    double value = 0.0;   // extrapolated
    double fine = 0.0, coarse = 0.0;
    double rate = 0.0;    // convergence rate in the mesh size used for extrapolation
    double error = 0.0;   // refinement estimate of the extrapolated value
    double residual = 0.0;
    Eigen::VectorXd vector;  // full dof vector on the fine space, M-normalized
};

struct DomainSolution {
    std::vector<DomainEigenpair> pairs;
    std::shared_ptr<FemSpace> space;
    double threshold = 0.0;
    int dofs = 0;
};

DomainSolution solve_domain(const DomainSpec& spec, int n_eigs, const MeshControls& controls = {});

struct ModeResidual {
    double orth = 0.0;        // ||(I - Pi0) psi|| / ||psi||
    double orth_dt = 0.0;     // ||d_t (I - Pi0) psi|| / ||psi||
    double norm = 0.0;
};
ModeResidual mode_projection_residual(const DomainSpec& spec, const FemSpace& space, const Eigen::VectorXd& psi);
// ground-mode amplitude <psi(u, .), c0> on the vertical line x = u
double transverse_amplitude(const DomainSpec& spec, const FemSpace& space, const Eigen::VectorXd& psi, double u);

// samples with sqrt(psi^2 + scaled gradient^2) below noise_floor * max|psi| count as zero
double agmon_weighted_norm_2d(const FemSpace& space, const Eigen::VectorXd& psi, AgmonWeight kind, double rate,
                              double h, double noise_floor = 1e-15);

// value of a finite element function at a point of the (unscaled) block coordinates
double fem_eval(const FemSpace& space, const Eigen::VectorXd& full, double x, double y);

void write_eigenvector_csv(std::ostream& os, const FemSpace& space, const Eigen::VectorXd& full);

}  // namespace wguide
