#include "wguide/asympt.hpp"
#include "wguide/cli.hpp"
#include "wguide/fem2d.hpp"
#include "wguide/model1d.hpp"
#include "wguide/quasimode.hpp"
#include "wguide/specfun.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace wguide;

namespace {

py::dict domain_result(const DomainSolution& s)
{
    std::vector<double> v, e;
    for (auto& p : s.pairs) {
        v.push_back(p.value);
        e.push_back(p.error);
    }
    py::dict d;
    d["values"] = v;
    d["errors"] = e;
    d["threshold"] = s.threshold;
    d["dofs"] = s.dofs;
    return d;
}

Op1D op_of(const std::string& s)
{
    if (s == "tri") return Op1D::BOTri;
    if (s == "gui") return Op1D::BOGui;
    if (s == "vapp") return Op1D::VApp;
    throw std::invalid_argument("operator must be tri, gui or vapp");
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    py::register_exception<NoBoundState>(m, "NoBoundState", PyExc_RuntimeError);
    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", PyExc_RuntimeError);
    py::register_exception<TruncationDominant>(m, "TruncationDominant", PyExc_RuntimeError);
    py::register_exception<OutOfRange>(m, "OutOfRange", PyExc_ValueError);

    m.def("airy_rev", [](double x) {
        auto a = airy_rev(x);
        return py::make_tuple(a.value, a.derivative);
    }, "A(x) = Ai(-x) and its derivative");
    m.def("airy_zero", &airy_zero, py::arg("n"));
    m.def("airy_norm_sq", &airy_norm_sq, py::arg("n"));

    m.def("toy_eigenvalue_exact", &toy_eigenvalue_exact, py::arg("n"), py::arg("kappa"));
    m.def("toy_branch_trace", &toy_branch_trace, py::arg("n"), py::arg("deltas"));
    m.def("bo_eigenvalues", [](const std::string& op, double h, int n_eigs) {
        std::vector<double> out;
        for (auto& p : bo_solve(op_of(op), h, n_eigs)) out.push_back(p.eigenvalue);
        return out;
    }, py::arg("operator"), py::arg("h"), py::arg("n_eigs") = 1);

    m.def("triangle_eigenvalues", [](double h, int n_eigs, double mesh_size) {
        MeshControls c;
        c.target_h = mesh_size;
        return domain_result(solve_domain(DomainSpec::scaled_triangle(h), n_eigs, c));
    }, py::arg("h"), py::arg("n_eigs") = 1, py::arg("mesh_size") = 0.3);
    m.def("guide_eigenvalues", [](double theta, int n_eigs, double mesh_size) {
        MeshControls c;
        c.target_h = mesh_size;
        c.levels = 3;
        return domain_result(solve_domain(DomainSpec::phys_guide(theta), n_eigs, c));
    }, py::arg("theta"), py::arg("n_eigs") = 1, py::arg("mesh_size") = 0.3);

    m.def("quasimode_coefficients", [](const std::string& family, int n, int order) {
        if (family == "toy") return toy_coefficients(n, order).coeffs;
        if (family == "botri") return botri_coefficients(n, order).coeffs;
        if (family == "tri") return tri_coefficients(n, order).first.coeffs;
        if (family == "gui") return gui_coefficients(n, order).first.coeffs;
        throw std::invalid_argument("family must be toy, botri, tri or gui");
    }, py::arg("family"), py::arg("n") = 1, py::arg("order") = 3);

    m.def("fit_expansion", [](const std::vector<double>& params, const std::vector<double>& values,
                              const std::vector<double>& errors, const std::vector<double>& exponents) {
        LadderSample s{params, values, errors};
        auto f = fit_expansion(s, exponents);
        py::dict d;
        d["coefficients"] = f.coefficients;
        d["stderrs"] = f.stderrs;
        d["condition"] = f.condition;
        d["refused"] = f.refused;
        return d;
    }, py::arg("params"), py::arg("values"), py::arg("errors"), py::arg("exponents"));
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "returns (exit code, stdout text, stderr text)");
}
