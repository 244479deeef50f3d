#include "wguide/fem2d.hpp"

#include "wguide/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace wguide {

namespace {

constexpr double kPi = std::numbers::pi;
const double kApex = kPi * std::sqrt(2.0);

bool physical_kind(DomainKind k)
{
    return k == DomainKind::PhysTriangle || k == DomainKind::PhysGuideHalf;
}

// Dunavant degree-6 rule, weights relative to the area.
struct TriRule {
    std::vector<std::array<double, 3>> bary;
    std::vector<double> w;
};

const TriRule& rule6()
{
    static const TriRule r = [] {
        TriRule q;
        auto orbit3 = [&](double a, double b, double w) {
            q.bary.push_back({a, b, b});
            q.bary.push_back({b, a, b});
            q.bary.push_back({b, b, a});
            for (int i = 0; i < 3; ++i) q.w.push_back(w);
        };
        orbit3(0.501426509658179, 0.249286745170910, 0.116786275726379);
        orbit3(0.873821971016996, 0.063089014491502, 0.050844906370207);
        double a = 0.053145049844817, b = 0.310352451033784, c = 0.636502499121399;
        for (auto p : {std::array<double, 3>{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}) {
            q.bary.push_back(p);
            q.w.push_back(0.082851075618374);
        }
        return q;
    }();
    return r;
}

// Interval lengths marching away from a wall: first size, geometric growth, capped by cap(rho).
std::vector<double> march(double len, double first, double growth, const std::function<double(double)>& cap)
{
    std::vector<double> nodes{0.0};
    double rho = 0.0, d = std::min(first, cap(0.0)), prev = d;
    while (rho + d < len) {
        rho += d;
        nodes.push_back(rho);
        prev = d;
        d = std::min(d * growth, cap(rho));
    }
    if (len - rho < 0.3 * prev && nodes.size() > 1) nodes.pop_back();
    nodes.push_back(len);
    return nodes;
}

std::vector<double> bisect_nodes(const std::vector<double>& v, int times)
{
    std::vector<double> out = v;
    for (int k = 0; k < times; ++k) {
        std::vector<double> next;
        for (size_t i = 0; i + 1 < out.size(); ++i) {
            next.push_back(out[i]);
            next.push_back(0.5 * (out[i] + out[i + 1]));
        }
        next.push_back(out.back());
        out = std::move(next);
    }
    return out;
}

std::vector<double> uniform_nodes(double a, double b, int n)
{
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = a + (b - a) * i / n;
    v[n] = b;
    return v;
}

// Nodes on [0, 1] with `layers` geometric refinements of the first interval.
std::vector<double> transverse_nodes(int n, int layers)
{
    std::vector<double> v{0.0};
    double first = 1.0 / n;
    for (int k = layers; k >= 1; --k) v.push_back(first * std::ldexp(1.0, -k));
    for (int i = 1; i <= n; ++i) v.push_back(double(i) / n);
    v.back() = 1.0;
    return v;
}

std::array<double, 2> block_point(const MeshBlock& b, double u, double v)
{
    switch (b.map) {
    case MeshBlock::Map::TriangleLeft:
        return {u, v * (u + b.param)};
    case MeshBlock::Map::GuideRight:
        return {u, u + b.param * v};
    default:
        return {u, v};
    }
}

// Left nodes on [-pi sqrt2, 0], graded toward x = 0.
std::vector<double> left_nodes(double hg, double target, const Grading& g, double first_scale)
{
    if (!g.graded) {
        int n = std::max(2, int(std::ceil(kApex / target)));
        return uniform_nodes(-kApex, 0.0, n);
    }
    double h23 = std::pow(hg, 2.0 / 3.0);
    double plateau = g.plateau * h23, zone = g.zone * h23;
    auto cap = [&](double rho) { return std::min(target, rho < zone ? plateau : target); };
    auto d = march(kApex, g.wall * hg * first_scale, 1.0 / g.ratio, cap);
    std::vector<double> u(d.size());
    for (size_t i = 0; i < d.size(); ++i) u[d.size() - 1 - i] = -d[i];
    u.front() = -kApex;
    u.back() = 0.0;
    return u;
}

std::vector<double> right_nodes(double hg, double len, double target, const Grading& g, double first_scale)
{
    if (!g.graded) {
        int n = std::max(2, int(std::ceil(len / target)));
        return uniform_nodes(0.0, len, n);
    }
    double cap_size = std::min(target, g.right * hg);
    return march(len, std::min(g.wall * hg * first_scale, cap_size), 1.0 / g.ratio,
                 [&](double) { return cap_size; });
}

long long edge_key(int a, int b)
{
    if (a > b) std::swap(a, b);
    return (long long)a << 32 | (unsigned)b;
}

void finish_boundary(Mesh& m, const DomainSpec& spec)
{
    std::unordered_map<long long, int> count;
    std::unordered_map<long long, std::array<int, 2>> ends;
    for (auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            auto key = edge_key(a, b);
            ++count[key];
            ends[key] = {a, b};
        }
    bool neumann_axis = spec.half || spec.is_guide();
    const double tol = 1e-12;
    std::vector<std::pair<long long, std::array<int, 2>>> bnd;
    for (auto& [key, c] : count)
        if (c == 1) bnd.push_back({key, ends[key]});
    std::sort(bnd.begin(), bnd.end(), [](auto& p, auto& q) { return p.first < q.first; });
    for (auto& [key, e] : bnd) {
        auto pa = m.vertices[e[0]], pb = m.vertices[e[1]];
        bool neu = neumann_axis && std::fabs(pa[1]) < tol && std::fabs(pb[1]) < tol && pa[0] < tol && pb[0] < tol;
        m.edges.push_back(e);
        m.tags.push_back(neu ? EdgeTag::Neumann : EdgeTag::Dirichlet);
    }
}

// Adds a tensor block; shared vertices are reused through `reuse(i, j)` returning an index or -1.
void add_block(Mesh& m, MeshBlock b, bool collapse_first, const std::function<int(int, int)>& reuse)
{
    int nu = int(b.u.size()), nv = int(b.v.size());
    b.vertex.assign(size_t(nu) * nv, -1);
    int apex = -1;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            if (b.map == MeshBlock::Map::RightTriangle && i + j > nu - 1) continue;
            int id = reuse ? reuse(i, j) : -1;
            if (id < 0 && collapse_first && i == 0 && apex >= 0) id = apex;
            if (id < 0) {
                id = int(m.vertices.size());
                m.vertices.push_back(block_point(b, b.u[i], b.v[j]));
            }
            if (collapse_first && i == 0) apex = id;
            b.vertex[size_t(i) * nv + j] = id;
        }
    b.tri_lower.assign(size_t(nu - 1) * (nv - 1), -1);
    b.tri_upper.assign(size_t(nu - 1) * (nv - 1), -1);
    auto push = [&](int a, int c, int d) -> int {
        if (a < 0 || c < 0 || d < 0 || a == c || c == d || a == d) return -1;
        m.triangles.push_back({a, c, d});
        return int(m.triangles.size()) - 1;
    };
    for (int i = 0; i + 1 < nu; ++i)
        for (int j = 0; j + 1 < nv; ++j) {
            size_t q = size_t(i) * (nv - 1) + j;
            int v00 = b.vid(i, j), v10 = b.vid(i + 1, j), v11 = b.vid(i + 1, j + 1), v01 = b.vid(i, j + 1);
            if (b.map == MeshBlock::Map::RightTriangle) {
                b.tri_lower[q] = push(v00, v10, v01);
                b.tri_upper[q] = push(v10, v11, v01);
            } else {
                b.tri_lower[q] = push(v00, v10, v11);
                b.tri_upper[q] = push(v00, v11, v01);
            }
        }
    m.blocks.push_back(std::move(b));
}

std::array<double, 3> barycentric(const std::array<double, 2>& a, const std::array<double, 2>& b,
                                  const std::array<double, 2>& c, double x, double y)
{
    double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    double l1 = ((x - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y - a[1])) / det;
    double l2 = ((b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1])) / det;
    return {1.0 - l1 - l2, l1, l2};
}

}  // namespace

DomainSpec DomainSpec::phys_triangle(double theta, bool half)
{
    if (!(theta >= 1e-3)) throw DegenerateGeometry("opening below 1e-3");
    if (!(theta < kPi / 2)) throw std::invalid_argument("opening must be below pi/2");
    DomainSpec s;
    s.kind = DomainKind::PhysTriangle;
    s.theta = theta;
    s.h = std::tan(theta);
    s.half = half;
    return s;
}

DomainSpec DomainSpec::scaled_triangle(double h, bool half)
{
    if (!(h > 0)) throw std::invalid_argument("h must be positive");
    if (h < std::tan(1e-3)) throw DegenerateGeometry("opening below 1e-3");
    DomainSpec s;
    s.kind = DomainKind::ScaledTriangle;
    s.h = h;
    s.theta = std::atan(h);
    s.half = half;
    return s;
}

DomainSpec DomainSpec::phys_guide(double theta, double x_max)
{
    if (!(theta >= 1e-3)) throw DegenerateGeometry("opening below 1e-3");
    if (!(theta < kPi / 2)) throw std::invalid_argument("opening must be below pi/2");
    DomainSpec s;
    s.kind = DomainKind::PhysGuideHalf;
    s.theta = theta;
    s.h = std::tan(theta);
    s.extent = x_max;
    return s;
}

DomainSpec DomainSpec::scaled_guide(double h, double u_max)
{
    if (!(h > 0)) throw std::invalid_argument("h must be positive");
    if (h < std::tan(1e-3)) throw DegenerateGeometry("opening below 1e-3");
    DomainSpec s;
    s.kind = DomainKind::ScaledGuideHalf;
    s.h = h;
    s.theta = std::atan(h);
    s.extent = u_max;
    return s;
}

DomainSpec DomainSpec::rectangle(double a, double b)
{
    if (!(a > 0 && b > 0)) throw DegenerateGeometry("rectangle sides must be positive");
    DomainSpec s;
    s.kind = DomainKind::Rectangle;
    s.a = a;
    s.b = b;
    return s;
}

DomainSpec DomainSpec::right_triangle(double leg)
{
    if (!(leg > 0)) throw DegenerateGeometry("leg must be positive");
    DomainSpec s;
    s.kind = DomainKind::RightTriangle;
    s.a = s.b = leg;
    return s;
}

DomainSpec DomainSpec::rectangle_rec(double h)
{
    if (!(h > 0)) throw std::invalid_argument("h must be positive");
    DomainSpec s;
    s.kind = DomainKind::RectangleRec;
    s.h = h;
    s.theta = std::atan(h);
    return s;
}

double DomainSpec::semiclassical() const
{
    if (kind == DomainKind::Rectangle || kind == DomainKind::RightTriangle) return 1.0;
    return h;
}

double DomainSpec::default_extent() const
{
    double u_max = std::max(1.0, 20.0 * h);
    if (kind == DomainKind::ScaledGuideHalf) return u_max;
    if (kind == DomainKind::PhysGuideHalf) return u_max / (std::sqrt(2.0) * std::sin(theta));
    return 0.0;
}

double DomainSpec::threshold() const
{
    if (kind == DomainKind::ScaledGuideHalf) return 0.5 * (1.0 + h * h);
    if (kind == DomainKind::PhysGuideHalf) return 1.0;
    return std::numeric_limits<double>::infinity();
}

Mesh build_mesh(const DomainSpec& spec, double target_h, const Grading& grading)
{
    if (!(target_h > 0)) throw std::invalid_argument("target size must be positive");
    Mesh m;
    int layers = grading.corner_layers >= 0 ? grading.corner_layers : (spec.is_guide() ? 8 : 0);
    double corner_shrink = std::ldexp(1.0, -layers);
    int nt = std::max(2, grading.transverse);
    if (!grading.graded) nt = std::max(2, int(std::ceil(kApex / target_h)));

    switch (spec.kind) {
    case DomainKind::Rectangle: {
        MeshBlock b;
        b.u = bisect_nodes(uniform_nodes(0.0, spec.a, std::max(1, int(std::ceil(spec.a / target_h)))), grading.bisect);
        b.v = bisect_nodes(uniform_nodes(0.0, spec.b, std::max(1, int(std::ceil(spec.b / target_h)))), grading.bisect);
        add_block(m, std::move(b), false, nullptr);
        break;
    }
    case DomainKind::RightTriangle: {
        int n = std::max(1, int(std::ceil(spec.a / target_h))) << grading.bisect;
        MeshBlock b;
        b.map = MeshBlock::Map::RightTriangle;
        b.u = uniform_nodes(0.0, spec.a, n);
        b.v = uniform_nodes(0.0, spec.a, n);
        add_block(m, std::move(b), false, nullptr);
        break;
    }
    case DomainKind::ScaledTriangle:
    case DomainKind::PhysTriangle:
    case DomainKind::RectangleRec: {
        double hg = std::min(spec.h, 1.0);
        MeshBlock b;
        b.map = spec.kind == DomainKind::RectangleRec ? MeshBlock::Map::Identity : MeshBlock::Map::TriangleLeft;
        b.param = kApex;
        b.u = bisect_nodes(left_nodes(hg, target_h, grading, 1.0), grading.bisect);
        std::vector<double> half = transverse_nodes(nt, 0);
        if (spec.half) {
            b.v = half;
        } else {
            for (size_t j = half.size() - 1; j > 0; --j) b.v.push_back(-half[j]);
            b.v.insert(b.v.end(), half.begin(), half.end());
        }
        b.v = bisect_nodes(b.v, grading.bisect);
        add_block(m, std::move(b), spec.kind != DomainKind::RectangleRec, nullptr);
        break;
    }
    case DomainKind::ScaledGuideHalf:
    case DomainKind::PhysGuideHalf: {
        double hg = std::min(spec.h, 1.0);
        double ext = spec.extent > 0 ? spec.extent : spec.default_extent();
        double u_max = spec.kind == DomainKind::PhysGuideHalf ? ext * std::sqrt(2.0) * std::sin(spec.theta) : ext;
        std::vector<double> v = bisect_nodes(transverse_nodes(nt, layers), grading.bisect);
        MeshBlock left;
        left.map = MeshBlock::Map::TriangleLeft;
        left.param = kApex;
        left.u = bisect_nodes(left_nodes(hg, target_h, grading, corner_shrink), grading.bisect);
        left.v = v;
        add_block(m, std::move(left), true, nullptr);
        const MeshBlock& lb = m.blocks.back();
        int last = int(lb.u.size()) - 1;
        std::vector<int> shared(v.size());
        for (size_t j = 0; j < v.size(); ++j) shared[j] = lb.vid(last, int(j));
        MeshBlock right;
        right.map = MeshBlock::Map::GuideRight;
        right.param = kApex;
        right.u = bisect_nodes(right_nodes(hg, u_max, target_h, grading, corner_shrink), grading.bisect);
        right.v = v;
        add_block(m, std::move(right), false, [&](int i, int j) { return i == 0 ? shared[j] : -1; });
        break;
    }
    }

    finish_boundary(m, spec);
    if (physical_kind(spec.kind)) {
        m.scale_x = 1.0 / (std::sqrt(2.0) * std::sin(spec.theta));
        m.scale_y = 1.0 / (std::sqrt(2.0) * std::cos(spec.theta));
        for (auto& p : m.vertices) {
            p[0] *= m.scale_x;
            p[1] *= m.scale_y;
        }
    }
    std::ostringstream note;
    note << (grading.graded ? "graded" : "uniform") << " target=" << target_h << " transverse=" << nt
         << " corner_layers=" << layers << " bisect=" << grading.bisect;
    m.grading_note = note.str();
    return m;
}

double Mesh::min_angle_deg() const
{
    double best = 180.0;
    for (auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            auto a = vertices[t[k]], b = vertices[t[(k + 1) % 3]], c = vertices[t[(k + 2) % 3]];
            double ux = b[0] - a[0], uy = b[1] - a[1], vx = c[0] - a[0], vy = c[1] - a[1];
            double cosang = (ux * vx + uy * vy) / std::sqrt((ux * ux + uy * uy) * (vx * vx + vy * vy));
            best = std::min(best, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / kPi);
        }
    }
    return best;
}

double Mesh::min_edge_near(double x0, double radius) const
{
    double best = std::numeric_limits<double>::infinity();
    for (auto& t : triangles)
        for (int k = 0; k < 3; ++k) {
            auto a = vertices[t[k]], b = vertices[t[(k + 1) % 3]];
            double xm = 0.5 * (a[0] + b[0]) / scale_x;
            if (std::fabs(xm - x0) > radius) continue;
            best = std::min(best, std::hypot(b[0] - a[0], b[1] - a[1]));
        }
    return best;
}

double Mesh::area() const
{
    double s = 0;
    for (auto& t : triangles) {
        auto a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
        s += 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    }
    return s;
}

double Mesh::tagged_length(EdgeTag tag) const
{
    double s = 0;
    for (size_t i = 0; i < edges.size(); ++i)
        if (tags[i] == tag) {
            auto a = vertices[edges[i][0]], b = vertices[edges[i][1]];
            s += std::hypot(b[0] - a[0], b[1] - a[1]);
        }
    return s;
}

int Mesh::locate(double x, double y) const
{
    const double tol = 1e-10;
    double px = x * scale_x, py = y * scale_y;
    auto inside = [&](int tri) {
        if (tri < 0) return false;
        auto& t = triangles[tri];
        auto l = barycentric(vertices[t[0]], vertices[t[1]], vertices[t[2]], px, py);
        return l[0] >= -tol && l[1] >= -tol && l[2] >= -tol;
    };
    bool structured = !blocks.empty();
    for (auto& b : blocks)
        if (b.map == MeshBlock::Map::RightTriangle) structured = false;
    if (structured) {
        for (auto& b : blocks) {
            double u = x, v = y;
            if (b.map == MeshBlock::Map::TriangleLeft) {
                double r = x + b.param;
                if (r <= 0) continue;
                v = y / r;
            } else if (b.map == MeshBlock::Map::GuideRight) {
                v = (y - x) / b.param;
            }
            if (u < b.u.front() - tol || u > b.u.back() + tol || v < b.v.front() - tol || v > b.v.back() + tol)
                continue;
            int nu = int(b.u.size()), nv = int(b.v.size());
            int i = int(std::upper_bound(b.u.begin(), b.u.end(), u) - b.u.begin()) - 1;
            int j = int(std::upper_bound(b.v.begin(), b.v.end(), v) - b.v.begin()) - 1;
            i = std::clamp(i, 0, nu - 2);
            j = std::clamp(j, 0, nv - 2);
            for (int di = 0; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    int ii = i + (di == 0 ? 0 : (u - b.u[i] < 0.5 * (b.u[i + 1] - b.u[i]) ? -1 : 1));
                    int jj = j + dj;
                    if (ii < 0 || ii > nu - 2 || jj < 0 || jj > nv - 2) continue;
                    size_t q = size_t(ii) * (nv - 1) + jj;
                    if (inside(b.tri_lower[q])) return b.tri_lower[q];
                    if (inside(b.tri_upper[q])) return b.tri_upper[q];
                }
        }
        return -1;
    }
    for (size_t t = 0; t < triangles.size(); ++t)
        if (inside(int(t))) return int(t);
    return -1;
}

void write_mesh(std::ostream& os, const Mesh& m)
{
    os.precision(17);
    os << "wguide-mesh 1\n";
    os << "scale " << m.scale_x << ' ' << m.scale_y << '\n';
    os << "vertices " << m.vertices.size() << '\n';
    for (auto& p : m.vertices) os << p[0] << ' ' << p[1] << '\n';
    os << "triangles " << m.triangles.size() << '\n';
    for (auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "boundary " << m.edges.size() << '\n';
    for (size_t i = 0; i < m.edges.size(); ++i)
        os << m.edges[i][0] << ' ' << m.edges[i][1] << ' ' << (m.tags[i] == EdgeTag::Neumann ? 'N' : 'D') << '\n';
}

Mesh read_mesh(std::istream& is)
{
    Mesh m;
    std::string word;
    int version = 0;
    if (!(is >> word >> version) || word != "wguide-mesh" || version != 1)
        throw std::runtime_error("read_mesh: bad header");
    size_t n = 0;
    if (!(is >> word >> m.scale_x >> m.scale_y) || word != "scale") throw std::runtime_error("read_mesh: scale");
    if (!(is >> word >> n) || word != "vertices") throw std::runtime_error("read_mesh: vertices");
    m.vertices.resize(n);
    for (auto& p : m.vertices)
        if (!(is >> p[0] >> p[1])) throw std::runtime_error("read_mesh: truncated vertices");
    if (!(is >> word >> n) || word != "triangles") throw std::runtime_error("read_mesh: triangles");
    m.triangles.resize(n);
    for (auto& t : m.triangles) {
        if (!(is >> t[0] >> t[1] >> t[2])) throw std::runtime_error("read_mesh: truncated triangles");
        for (int k : t)
            if (k < 0 || size_t(k) >= m.vertices.size()) throw std::runtime_error("read_mesh: vertex index");
    }
    if (!(is >> word >> n) || word != "boundary") throw std::runtime_error("read_mesh: boundary");
    m.edges.resize(n);
    m.tags.resize(n);
    for (size_t i = 0; i < n; ++i) {
        char tag;
        if (!(is >> m.edges[i][0] >> m.edges[i][1] >> tag)) throw std::runtime_error("read_mesh: truncated boundary");
        if (tag != 'N' && tag != 'D') throw std::runtime_error("read_mesh: edge tag");
        m.tags[i] = tag == 'N' ? EdgeTag::Neumann : EdgeTag::Dirichlet;
    }
    return m;
}

Eigen::VectorXd FemSpace::expand(const Eigen::VectorXd& free) const
{
    Eigen::VectorXd full = Eigen::VectorXd::Zero(ndof);
    for (int d = 0; d < ndof; ++d)
        if (free_index[d] >= 0) full[d] = free[free_index[d]];
    return full;
}

namespace {

struct ElementGeom {
    std::array<std::array<double, 2>, 3> p;
    std::array<std::array<double, 2>, 3> grad;  // gradients of barycentrics
    double area = 0.0;
};

ElementGeom element_geom(const Mesh& m, int e)
{
    ElementGeom g;
    for (int k = 0; k < 3; ++k) g.p[k] = m.vertices[m.triangles[e][k]];
    double det = (g.p[1][0] - g.p[0][0]) * (g.p[2][1] - g.p[0][1]) - (g.p[2][0] - g.p[0][0]) * (g.p[1][1] - g.p[0][1]);
    g.area = 0.5 * det;
    for (int k = 0; k < 3; ++k) {
        auto& b = g.p[(k + 1) % 3];
        auto& c = g.p[(k + 2) % 3];
        g.grad[k] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det};
    }
    return g;
}

// P2 (or P1) shape values and gradients at barycentrics l.
int shapes(int order, const ElementGeom& g, const std::array<double, 3>& l, double* val, double (*grad)[2])
{
    if (order == 1) {
        for (int k = 0; k < 3; ++k) {
            val[k] = l[k];
            grad[k][0] = g.grad[k][0];
            grad[k][1] = g.grad[k][1];
        }
        return 3;
    }
    for (int k = 0; k < 3; ++k) {
        val[k] = l[k] * (2 * l[k] - 1);
        grad[k][0] = (4 * l[k] - 1) * g.grad[k][0];
        grad[k][1] = (4 * l[k] - 1) * g.grad[k][1];
    }
    for (int k = 0; k < 3; ++k) {
        int a = k, b = (k + 1) % 3;
        val[3 + k] = 4 * l[a] * l[b];
        for (int c = 0; c < 2; ++c) grad[3 + k][c] = 4 * (l[a] * g.grad[b][c] + l[b] * g.grad[a][c]);
    }
    return 6;
}

}  // namespace

double FemSpace::eval(const Eigen::VectorXd& full, int e, const std::array<double, 3>& bary, double* gx,
                      double* gy) const
{
    auto g = element_geom(*mesh, e);
    double val[6], grad[6][2];
    int nloc = shapes(order, g, bary, val, grad);
    double s = 0, sx = 0, sy = 0;
    for (int k = 0; k < nloc; ++k) {
        double c = full[elem_dofs[e][k]];
        s += c * val[k];
        sx += c * grad[k][0];
        sy += c * grad[k][1];
    }
    if (gx) *gx = sx;
    if (gy) *gy = sy;
    return s;
}

SparseSymmetricPencil assemble(const DomainSpec& spec, std::shared_ptr<const Mesh> mesh, int element_order)
{
    if (element_order != 1 && element_order != 2) throw std::invalid_argument("element order must be 1 or 2");
    const Mesh& m = *mesh;
    auto space = std::make_shared<FemSpace>();
    space->mesh = mesh;
    space->order = element_order;
    int nv = int(m.vertices.size());
    space->dof_xy = m.vertices;
    space->elem_dofs.resize(m.triangles.size());
    std::unordered_map<long long, int> edge_dof;
    for (size_t e = 0; e < m.triangles.size(); ++e) {
        auto& t = m.triangles[e];
        auto& d = space->elem_dofs[e];
        d.fill(-1);
        for (int k = 0; k < 3; ++k) d[k] = t[k];
        if (element_order == 2)
            for (int k = 0; k < 3; ++k) {
                int a = t[k], b = t[(k + 1) % 3];
                auto [it, fresh] = edge_dof.try_emplace(edge_key(a, b), nv + int(edge_dof.size()));
                if (fresh) {
                    auto pa = m.vertices[a], pb = m.vertices[b];
                    space->dof_xy.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
                }
                d[3 + k] = it->second;
            }
    }
    space->ndof = int(space->dof_xy.size());
    std::vector<char> dirichlet(space->ndof, 0);
    for (size_t i = 0; i < m.edges.size(); ++i) {
        if (m.tags[i] != EdgeTag::Dirichlet) continue;
        dirichlet[m.edges[i][0]] = dirichlet[m.edges[i][1]] = 1;
        if (element_order == 2) {
            auto it = edge_dof.find(edge_key(m.edges[i][0], m.edges[i][1]));
            if (it != edge_dof.end()) dirichlet[it->second] = 1;
        }
    }
    space->free_index.assign(space->ndof, -1);
    for (int d = 0; d < space->ndof; ++d)
        if (!dirichlet[d]) space->free_index[d] = space->nfree++;

    const double h2 = spec.h * spec.h;
    const auto& q = rule6();
    std::vector<Eigen::Triplet<double>> ka, mb;
    ka.reserve(m.triangles.size() * 36);
    mb.reserve(m.triangles.size() * 36);
    double val[6], grad[6][2];
    for (size_t e = 0; e < m.triangles.size(); ++e) {
        auto g = element_geom(m, int(e));
        if (!(g.area > 0)) throw ElementQuality("non-positive element area at element " + std::to_string(e));
        double kl[6][6] = {}, ml[6][6] = {};
        int nloc = 0;
        for (size_t p = 0; p < q.w.size(); ++p) {
            auto& l = q.bary[p];
            double x = l[0] * g.p[0][0] + l[1] * g.p[1][0] + l[2] * g.p[2][0];
            double y = l[0] * g.p[0][1] + l[1] * g.p[1][1] + l[2] * g.p[2][1];
            double a11 = 1, a12 = 0, a22 = 1, w = 1;
            if (spec.kind == DomainKind::ScaledTriangle || spec.kind == DomainKind::ScaledGuideHalf) {
                a11 = h2;
            } else if (spec.kind == DomainKind::RectangleRec) {
                // (u, t) coordinates, r = u + pi sqrt2
                double r = x + kApex, tr = y / r;
                a11 = r * h2;
                a12 = -r * h2 * tr;
                a22 = r * (h2 * tr * tr + 1.0 / (r * r));
                w = r;
            }
            nloc = shapes(element_order, g, l, val, grad);
            double wq = q.w[p] * g.area;
            for (int i = 0; i < nloc; ++i)
                for (int j = 0; j < nloc; ++j) {
                    kl[i][j] += wq * (a11 * grad[i][0] * grad[j][0] + a12 * (grad[i][0] * grad[j][1] + grad[i][1] * grad[j][0]) +
                                      a22 * grad[i][1] * grad[j][1]);
                    ml[i][j] += wq * w * val[i] * val[j];
                }
        }
        auto& d = space->elem_dofs[e];
        for (int i = 0; i < nloc; ++i) {
            int fi = space->free_index[d[i]];
            if (fi < 0) continue;
            for (int j = 0; j < nloc; ++j) {
                int fj = space->free_index[d[j]];
                if (fj < 0) continue;
                ka.emplace_back(fi, fj, kl[i][j]);
                mb.emplace_back(fi, fj, ml[i][j]);
            }
        }
    }
    SparseSymmetricPencil out;
    out.stiffness.resize(space->nfree, space->nfree);
    out.mass.resize(space->nfree, space->nfree);
    out.stiffness.setFromTriplets(ka.begin(), ka.end());
    out.mass.setFromTriplets(mb.begin(), mb.end());
    out.space = space;
    return out;
}

namespace {

struct LevelSolve {
    std::vector<double> values;
    std::vector<Eigen::VectorXd> vectors;  // full dof vectors
    std::vector<double> residuals;
    std::shared_ptr<FemSpace> space;
};

LevelSolve solve_level(const DomainSpec& spec, int n_eigs, const MeshControls& c, int bisect)
{
    Grading g = c.grading;
    g.bisect += bisect;
    auto mesh = std::make_shared<Mesh>(build_mesh(spec, c.target_h, g));
    auto pencil = assemble(spec, mesh, c.order);
    EigenOptions opt;
    opt.nev = std::min(n_eigs, pencil.space->nfree);
    opt.tol = c.tol;
    opt.sigma = 0.0;
    opt.dense_below = 300;
    auto rep = lowest_eigenpairs(pencil.stiffness, pencil.mass, opt);
    LevelSolve out;
    out.space = pencil.space;
    for (int k = 0; k < rep.eigenvalues.size(); ++k) {
        Eigen::VectorXd v = rep.eigenvectors.col(k);
        double nrm = std::sqrt(v.dot(pencil.mass * v));
        v /= nrm;
        if (v.sum() < 0) v = -v;
        out.values.push_back(rep.eigenvalues[k]);
        out.residuals.push_back(pair_residual(pencil.stiffness, pencil.mass, v, rep.eigenvalues[k]));
        out.vectors.push_back(pencil.space->expand(v));
    }
    return out;
}

}  // namespace

DomainSolution solve_domain(const DomainSpec& spec, int n_eigs, const MeshControls& controls)
{
    if (n_eigs < 1 || n_eigs > 20) throw std::invalid_argument("n_eigs must be in 1..20");
    if (controls.levels != 2 && controls.levels != 3) throw std::invalid_argument("levels must be 2 or 3");
    DomainSolution sol;
    sol.threshold = spec.threshold();
    int nlev = controls.richardson ? controls.levels : 1;
    std::vector<LevelSolve> lev;
    for (int k = 0; k < nlev; ++k) lev.push_back(solve_level(spec, n_eigs, controls, k));
    const LevelSolve& fine = lev.back();
    double nominal = 2.0 * controls.order;
    for (size_t k = 0; k < fine.values.size(); ++k) {
        DomainEigenpair p;
        p.fine = fine.values[k];
        p.coarse = p.fine;
        p.value = p.fine;
        p.rate = nominal;
        bool have = true;
        for (auto& l : lev) have = have && k < l.values.size();
        if (nlev >= 2 && have) {
            p.coarse = lev[nlev - 2].values[k];
            double d2 = p.coarse - p.fine;
            if (nlev == 3) {
                double d1 = lev[0].values[k] - p.coarse;
                if (d1 * d2 > 0 && std::fabs(d2) > 0) p.rate = std::clamp(std::log2(d1 / d2), 0.5, nominal);
            }
            p.value = p.fine - d2 / (std::pow(2.0, p.rate) - 1.0);
            p.error = std::fabs(p.value - p.fine);
        }
        p.residual = fine.residuals[k];
        p.vector = fine.vectors[k];
        if (spec.is_guide() && !(p.fine < sol.threshold)) continue;
        sol.pairs.push_back(std::move(p));
    }
    if (controls.check_truncation && spec.is_guide()) {
        DomainSpec longer = spec;
        longer.extent = 2.0 * (spec.extent > 0 ? spec.extent : spec.default_extent());
        auto lf = solve_level(longer, n_eigs, controls, nlev - 1);
        int below = 0;
        for (double v : lf.values) below += v < sol.threshold;
        if (below != int(sol.pairs.size()))
            throw TruncationDominant("eigenvalue count below threshold changes when the truncation doubles");
        for (size_t k = 0; k < sol.pairs.size(); ++k) {
            double shift = std::fabs(lf.values[k] - sol.pairs[k].fine);
            if (shift > std::max(10.0 * sol.pairs[k].error, 1e-9))
                throw TruncationDominant("truncation shift " + std::to_string(shift) + " exceeds discretization error");
        }
    }
    sol.space = fine.space;
    sol.dofs = fine.space->nfree;
    return sol;
}

double fem_eval(const FemSpace& space, const Eigen::VectorXd& full, double x, double y)
{
    int e = space.mesh->locate(x, y);
    if (e < 0) throw ResamplingOutOfDomain("point outside the mesh");
    const Mesh& m = *space.mesh;
    auto& t = m.triangles[e];
    auto l = barycentric(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]], x * m.scale_x, y * m.scale_y);
    return space.eval(full, e, l);
}

namespace {

double ground_mode(const DomainSpec& spec, double t)
{
    return spec.half ? std::sqrt(2.0) * std::cos(kPi * t / 2) : std::cos(kPi * t / 2);
}

double ground_mode_dt(const DomainSpec& spec, double t)
{
    return (spec.half ? std::sqrt(2.0) : 1.0) * (-kPi / 2) * std::sin(kPi * t / 2);
}

const MeshBlock& left_block(const DomainSpec& spec, const FemSpace& space)
{
    if (!(spec.kind == DomainKind::ScaledTriangle || spec.kind == DomainKind::ScaledGuideHalf))
        throw std::invalid_argument("mode projection needs a scaled triangle or guide");
    const Mesh& m = *space.mesh;
    if (m.blocks.empty() || m.blocks[0].map != MeshBlock::Map::TriangleLeft)
        throw std::invalid_argument("mode projection needs a structured mesh");
    return m.blocks[0];
}

}  // namespace

double transverse_amplitude(const DomainSpec& spec, const FemSpace& space, const Eigen::VectorXd& psi, double u)
{
    const MeshBlock& b = left_block(spec, space);
    const Mesh& m = *space.mesh;
    double r = u + b.param;
    if (!(r > 0) || u > 0) throw ResamplingOutOfDomain("amplitude abscissa outside the left part");
    int nu = int(b.u.size()), nv = int(b.v.size());
    int i = std::clamp(int(std::upper_bound(b.u.begin(), b.u.end(), u) - b.u.begin()) - 1, 0, nu - 2);
    double lam = (u - b.u[i]) / (b.u[i + 1] - b.u[i]);
    static const auto gl = gauss_legendre(-1.0, 1.0, 4);
    double s = 0;
    auto segment = [&](int tri, double y0, double y1) {
        if (tri < 0 || y1 <= y0) return;
        auto& t = m.triangles[tri];
        for (size_t k = 0; k < gl.nodes.size(); ++k) {
            double y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * gl.nodes[k];
            auto l = barycentric(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]], u * m.scale_x, y * m.scale_y);
            s += 0.5 * (y1 - y0) * gl.weights[k] * space.eval(psi, tri, l) * ground_mode(spec, y / r);
        }
    };
    for (int j = 0; j + 1 < nv; ++j) {
        auto yat = [&](int jj, int di) { return b.v[jj] * (b.u[i + di] + b.param); };
        double ybot = (1 - lam) * yat(j, 0) + lam * yat(j, 1);
        double ytop = (1 - lam) * yat(j + 1, 0) + lam * yat(j + 1, 1);
        double ydiag = (1 - lam) * yat(j, 0) + lam * yat(j + 1, 1);
        size_t q = size_t(i) * (nv - 1) + j;
        segment(b.tri_lower[q], ybot, ydiag);
        segment(b.tri_upper[q], ydiag, ytop);
    }
    return s / r;
}

ModeResidual mode_projection_residual(const DomainSpec& spec, const FemSpace& space, const Eigen::VectorXd& psi)
{
    const MeshBlock& b = left_block(spec, space);
    const Mesh& m = *space.mesh;
    const auto& q = rule6();
    std::map<long long, double> cache;
    double norm2 = 0, orth2 = 0, dt2 = 0;
    auto handle = [&](int tri) {
        if (tri < 0) return;
        auto g = element_geom(m, tri);
        for (size_t p = 0; p < q.w.size(); ++p) {
            auto& l = q.bary[p];
            double x = l[0] * g.p[0][0] + l[1] * g.p[1][0] + l[2] * g.p[2][0];
            double y = l[0] * g.p[0][1] + l[1] * g.p[1][1] + l[2] * g.p[2][1];
            double gx, gy;
            double v = space.eval(psi, tri, l, &gx, &gy);
            double r = x + b.param, t = y / r;
            long long key = std::llround(x * 1e12);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, transverse_amplitude(spec, space, psi, x)).first;
            double amp = it->second;
            double wq = q.w[p] * g.area;
            double d = v - amp * ground_mode(spec, t);
            double ddt = r * gy - amp * ground_mode_dt(spec, t);
            norm2 += wq * v * v;
            orth2 += wq * d * d;
            dt2 += wq * ddt * ddt;
        }
    };
    for (size_t k = 0; k < b.tri_lower.size(); ++k) {
        handle(b.tri_lower[k]);
        handle(b.tri_upper[k]);
    }
    ModeResidual out;
    out.norm = std::sqrt(norm2);
    out.orth = std::sqrt(orth2 / norm2);
    out.orth_dt = std::sqrt(dt2 / norm2);
    return out;
}

double agmon_weighted_norm_2d(const FemSpace& space, const Eigen::VectorXd& psi, AgmonWeight kind, double rate, double h,
                              double noise_floor)
{
    if (!(rate >= 0) || !(h > 0) || !(noise_floor >= 0)) throw std::invalid_argument("agmon: bad weight parameters");
    const double floor = noise_floor * psi.cwiseAbs().maxCoeff();
    const Mesh& m = *space.mesh;
    const auto& q = rule6();
    double dscale = kind == AgmonWeight::CubicExp ? std::pow(h, 2.0 / 3.0) : h;
    double s = 0;
    for (size_t e = 0; e < m.triangles.size(); ++e) {
        auto g = element_geom(m, int(e));
        for (size_t p = 0; p < q.w.size(); ++p) {
            auto& l = q.bary[p];
            double x = (l[0] * g.p[0][0] + l[1] * g.p[1][0] + l[2] * g.p[2][0]) / m.scale_x;
            double gx;
            double v = space.eval(psi, int(e), l, &gx);
            gx *= m.scale_x;
            double logw = 0;
            if (kind == AgmonWeight::CubicExp) {
                logw = rate / h * std::pow(std::fabs(std::min(x, 0.0)), 1.5);
            } else if (kind == AgmonWeight::PowerLeft) {
                double r = x + kApex;
                if (r <= 0 || x > 0) continue;
                logw = -rate / h * std::log(r);
            } else {
                logw = rate / h * std::max(x, 0.0);
            }
            double mag = v * v + dscale * dscale * gx * gx;
            if (std::sqrt(mag) <= floor) continue;
            if (logw > std::log(1e300)) throw WeightOverflow("agmon weight overflow");
            s += q.w[p] * g.area * std::exp(logw + std::log(mag));
        }
    }
    return s;
}

void write_eigenvector_csv(std::ostream& os, const FemSpace& space, const Eigen::VectorXd& full)
{
    os.precision(12);
    os << "x,y,value\n";
    for (int d = 0; d < space.ndof; ++d) os << space.dof_xy[d][0] << ',' << space.dof_xy[d][1] << ',' << full[d] << '\n';
}

}  // namespace wguide
