#include "wguide/cli.hpp"

#include "wguide/acceptance.hpp"
#include "wguide/asympt.hpp"
#include "wguide/fem2d.hpp"
#include "wguide/model1d.hpp"
#include "wguide/quasimode.hpp"
#include "wguide/specfun.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace wguide {

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string plain(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const double kAiryScale = std::pow(4.0 * M_PI * std::sqrt(2.0), -2.0 / 3.0);

struct Ladder {
    double start, ratio;
    int count;
};

Ladder parse_ladder(const std::string& s)
{
    Ladder l{};
    char tail;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &l.start, &l.ratio, &l.count, &tail) != 3)
        throw UsageError("--ladder expects start:ratio:count");
    if (!(l.start > 0) || !(l.ratio > 0 && l.ratio < 1) || l.count < 1)
        throw UsageError("--ladder needs start > 0, 0 < ratio < 1, count >= 1");
    return l;
}

// parameter values from --ladder, else the single value, else the default ladder
std::vector<double> params(const RunConfig& c, double single, const char* name)
{
    if (!c.ladder.empty()) {
        Ladder l = parse_ladder(c.ladder);
        return geometric_ladder(l.start, l.ratio, l.count);
    }
    if (single > 0) return {single};
    throw UsageError(std::string("give --") + name + " or --ladder");
}

std::string error_kind(const std::exception& e)
{
#define WG_KIND(T) \
    if (dynamic_cast<const T*>(&e)) return #T;
    WG_KIND(NoBoundState)
    WG_KIND(ContinuationStall)
    WG_KIND(TruncationDominant)
    WG_KIND(WeightOverflow)
    WG_KIND(DegenerateGeometry)
    WG_KIND(ElementQuality)
    WG_KIND(ResamplingOutOfDomain)
    WG_KIND(PreconditionError)
    WG_KIND(OutOfRange)
    WG_KIND(OutsideDomain)
    WG_KIND(RecursionInconsistent)
    WG_KIND(NonDecayingMode)
    WG_KIND(CompatibilityViolation)
    WG_KIND(TruncationModes)
#undef WG_KIND
    return "Error";
}

void validate(const RunConfig& c)
{
    const std::string& s = c.subcommand;
    if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");
    if (c.h < 0 || c.kappa < 0 || c.theta < 0 || c.xmax < 0) throw UsageError("parameters must be positive");
    if (c.kappa > 1) throw UsageError("--kappa must be <= 1");
    if (c.theta >= M_PI / 2) throw UsageError("--theta must be below pi/2");
    if (c.n < 1) throw UsageError("--n must be >= 1");
    if (c.n_eigs < 1 || c.n_eigs > 20) throw UsageError("--n-eigs must be in 1..20");
    if (c.order < 0 || c.order > 8) throw UsageError("--order must be in 0..8");
    if (c.element_order != 1 && c.element_order != 2) throw UsageError("--element-order must be 1 or 2");
    if (!(c.mesh_size > 0)) throw UsageError("--mesh-size must be positive");
    if (c.modes < 4) throw UsageError("--modes must be >= 4");
    if (!c.ladder.empty()) parse_ladder(c.ladder);
    if (s == "airy" && c.n > 100) throw UsageError("airy: --n must be <= 100");
    if (s == "bo" && c.op != "tri" && c.op != "gui" && c.op != "vapp") throw UsageError("--operator must be tri, gui or vapp");
    if ((s == "quasimode" || s == "fit") && c.family != "toy" && c.family != "botri" && c.family != "tri" &&
        c.family != "gui")
        throw UsageError("--family must be toy, botri, tri or gui");
    if (s == "fit" && c.input.empty() && c.ladder.empty()) throw UsageError("fit: give --input or --ladder");
    if ((s == "tri" || s == "guide") && c.theta > 0 && c.h > 0) throw UsageError("give either --theta or --h");
    if (s == "toy" || s == "toy-branch") params(c, c.kappa, "kappa");
    if (s == "bo") params(c, c.h, "h");
    if ((s == "tri" || s == "guide") && c.theta == 0) params(c, c.h, "h");
    if (s == "verify" && theorem_criteria(c.theorem).empty()) throw UsageError("verify: unknown theorem id " + c.theorem);
}

Table cmd_airy(const RunConfig& c)
{
    Table t;
    t.columns = {"n", "zero", "derivative_at_zero", "norm_sq"};
    for (int k = 1; k <= c.n; ++k) {
        double z = airy_zero(k);
        t.rows.push_back({double(k), z, airy_rev(z).derivative, airy_norm_sq(k)});
    }
    return t;
}

Table cmd_toy(const RunConfig& c)
{
    Table t;
    t.columns = {"kappa", "n", "lambda_exact", "first_term", "lambda_asymptotic", "residual"};
    auto ks = params(c, c.kappa, "kappa");
    toy_eigenvalue_exact(c.n, ks.front());  // absorption is reported before the expansion is attempted
    const auto a = toy_coefficients(c.n, c.order);
    for (double k : ks) {
        double ex = toy_eigenvalue_exact(c.n, k);
        double s = 0;
        for (int j = 0; j <= c.order; ++j) s += a.coeffs[j] * std::pow(k, j / 3.0);
        double asym = std::pow(k, 2.0 / 3.0) * s;
        t.rows.push_back({k, double(c.n), ex, std::pow(k, 2.0 / 3.0) * airy_zero(c.n), asym, std::fabs(ex - asym)});
    }
    if (ks.size() >= 2) {
        std::vector<double> res;
        for (auto& r : t.rows) res.push_back(std::max(r[5], 1e-300));
        auto sl = loglog_slope(ks, res);
        t.summary.push_back({"slope", plain(sl.slope)});
        t.summary.push_back({"slope_stderr", plain(sl.stderr)});
    }
    return t;
}

Table cmd_toy_branch(const RunConfig& c)
{
    Table t;
    t.columns = {"delta", "kappa", "lambda", "below_threshold"};
    std::vector<double> ds;
    for (double k : params(c, c.kappa, "kappa")) ds.push_back(std::cbrt(k));
    std::sort(ds.begin(), ds.end());
    auto lam = toy_branch_trace(c.n, ds);
    for (size_t i = 0; i < ds.size(); ++i)
        t.rows.push_back({ds[i], ds[i] * ds[i] * ds[i], lam[i], lam[i] < 1 ? 1.0 : 0.0});
    return t;
}

Table cmd_bo(const RunConfig& c)
{
    Table t;
    t.columns = {"h", "n", "eigenvalue", "two_term", "residual"};
    Op1D kind = c.op == "tri" ? Op1D::BOTri : c.op == "gui" ? Op1D::BOGui : Op1D::VApp;
    Disc1D disc;
    if (c.xmax > 0) disc.xmax = c.xmax;
    for (double h : params(c, c.h, "h")) {
        auto pairs = bo_solve(kind, h, c.n_eigs, disc);
        for (size_t k = 0; k < pairs.size(); ++k) {
            double two = 0.125 + std::pow(h, 2.0 / 3.0) * kAiryScale * airy_zero(int(k) + 1);
            t.rows.push_back({h, double(k + 1), pairs[k].eigenvalue, two, pairs[k].residual});
        }
    }
    return t;
}

MeshControls controls(const RunConfig& c)
{
    MeshControls m;
    m.target_h = c.mesh_size;
    m.order = c.element_order;
    return m;
}

Table cmd_domain(const RunConfig& c, bool guide)
{
    Table t;
    t.columns = {"parameter", "index", "value", "error", "fine", "dofs", "threshold"};
    MeshControls mc = controls(c);
    std::vector<DomainSpec> specs;
    std::vector<double> ps;
    if (c.theta > 0) {
        ps = {c.theta};
        specs.push_back(guide ? DomainSpec::phys_guide(c.theta, c.xmax) : DomainSpec::phys_triangle(c.theta));
        t.summary.push_back({"parameter", "theta"});
    } else {
        ps = params(c, c.h, "h");
        for (double h : ps) specs.push_back(guide ? DomainSpec::scaled_guide(h, c.xmax) : DomainSpec::scaled_triangle(h));
        t.summary.push_back({"parameter", "h"});
    }
    if (guide) {
        mc.levels = 3;
        mc.check_truncation = true;
    }
    for (size_t i = 0; i < specs.size(); ++i) {
        auto sol = solve_domain(specs[i], c.n_eigs, mc);
        for (size_t k = 0; k < sol.pairs.size(); ++k) {
            auto& p = sol.pairs[k];
            t.rows.push_back({ps[i], double(k + 1), p.value, p.error, p.fine, double(sol.dofs), sol.threshold});
        }
    }
    return t;
}

Family family_of(const std::string& s)
{
    if (s == "toy") return Family::Toy;
    if (s == "botri") return Family::BOTri;
    if (s == "gui") return Family::Gui;
    return Family::Tri;
}

ExpansionCoefficients coefficients(const RunConfig& c)
{
    QuasiOptions q;
    q.modes = c.modes;
    switch (family_of(c.family)) {
    case Family::Toy: return toy_coefficients(c.n, c.order, q);
    case Family::BOTri: return botri_coefficients(c.n, c.order, q);
    case Family::Gui: return gui_coefficients(c.n, c.order, q).first;
    default: return tri_coefficients(c.n, c.order, q).first;
    }
}

Table cmd_quasimode(const RunConfig& c)
{
    Table t;
    t.columns = {"j", "exponent", "coefficient"};
    auto a = coefficients(c);
    for (int j = 0; j <= a.order && j < int(a.coeffs.size()); ++j) {
        double e = a.exponent(j) + (a.family == Family::Toy ? 2.0 / 3.0 : 0.0);
        t.rows.push_back({double(j), e, a.coeffs[j]});
    }
    t.summary.push_back({"family", family_name(a.family)});
    return t;
}

LadderSample read_sample(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw PreconditionError("fit: cannot read " + path);
    LadderSample s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        double p, v, e;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p, &v, &e) != 3) continue;  // header
        s.params.push_back(p);
        s.values.push_back(v);
        s.errors.push_back(e);
    }
    return s;
}

LadderSample compute_sample(const RunConfig& c)
{
    LadderSample s;
    s.params = params(c, 0.0, "h");
    for (double p : s.params) {
        double v, e;
        switch (family_of(c.family)) {
        case Family::Toy:
            v = toy_eigenvalue_exact(c.n, p);
            e = 1e-12;
            break;
        case Family::BOTri: {
            auto pr = bo_solve(Op1D::BOTri, p, c.n).at(c.n - 1);
            v = pr.eigenvalue;
            e = std::max(pr.residual, 1e-10);
            break;
        }
        default: {
            MeshControls mc = controls(c);
            bool gui = family_of(c.family) == Family::Gui;
            if (gui) mc.levels = 3;
            auto sol = solve_domain(gui ? DomainSpec::scaled_guide(p) : DomainSpec::scaled_triangle(p), c.n, mc);
            if (int(sol.pairs.size()) < c.n) throw NoBoundState("fit: fewer eigenvalues than requested");
            v = sol.pairs[c.n - 1].value;
            e = std::max(sol.pairs[c.n - 1].error, 1e-14);
        }
        }
        s.values.push_back(v);
        s.errors.push_back(e);
    }
    return s;
}

Table cmd_fit(const RunConfig& c)
{
    LadderSample s = c.input.empty() ? compute_sample(c) : read_sample(c.input);
    std::vector<double> ex;
    for (int j = 0; j <= c.order; ++j) {
        switch (family_of(c.family)) {
        case Family::Toy: ex.push_back((2.0 + j) / 3.0); break;
        case Family::BOTri: ex.push_back(2.0 * j / 3.0); break;
        default: ex.push_back(j / 3.0);
        }
    }
    auto f = fit_expansion(s, ex);
    Table t;
    t.columns = {"exponent", "coefficient", "stderr"};
    for (size_t k = 0; k < ex.size(); ++k) t.rows.push_back({ex[k], f.coefficients[k], f.stderrs[k]});
    t.summary.push_back({"condition", plain(f.condition)});
    t.summary.push_back({"residual_norm", plain(f.residual_norm)});
    t.summary.push_back({"refused", std::to_string(f.refused.size())});
    if (f.ill_conditioned) t.summary.push_back({"warning", "IllConditioned"});
    return t;
}

Table cmd_verify(const RunConfig& c, bool& all_pass, std::ostream& err)
{
    Table t;
    t.columns = {"criterion", "pass", "seconds", "budget"};
    AcceptanceRunner run;
    all_pass = true;
    for (int id : theorem_criteria(c.theorem)) {
        auto r = run.run(id);
        all_pass = all_pass && r.pass;
        t.rows.push_back({double(id), r.pass ? 1.0 : 0.0, r.seconds, r.budget});
        t.summary.push_back({"criterion_" + std::to_string(id), r.detail});
        for (auto& row : r.rows) {
            std::string line;
            for (double v : row) line += (line.empty() ? "" : ",") + plain(v);
            t.summary.push_back({"criterion_" + std::to_string(id) + "_row", line});
        }
        err << "criterion " << id << ' ' << (r.pass ? "PASS" : "FAIL") << ": " << r.detail << '\n';
    }
    return t;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const
{
    return {{"subcommand", subcommand}, {"theorem", theorem},   {"family", family},
            {"operator", op},           {"theta", plain(theta)}, {"h", plain(h)},
            {"kappa", plain(kappa)},    {"n", std::to_string(n)}, {"n_eigs", std::to_string(n_eigs)},
            {"order", std::to_string(order)}, {"mesh_size", plain(mesh_size)},
            {"element_order", std::to_string(element_order)}, {"modes", std::to_string(modes)},
            {"xmax", plain(xmax)},      {"ladder", ladder},     {"input", input},
            {"format", format},         {"seed", std::to_string(seed)}};
}

std::string format_csv(const RunConfig& cfg, const Table& t)
{
    std::ostringstream os;
    for (auto& [k, v] : cfg.entries()) os << "# " << k << '=' << v << '\n';
    for (auto& [k, v] : t.summary) os << "# " << k << '=' << v << '\n';
    for (size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
    os << '\n';
    for (auto& r : t.rows) {
        for (size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << num(r[j]);
        os << '\n';
    }
    return os.str();
}

std::string format_json(const RunConfig& cfg, const Table& t)
{
    nlohmann::ordered_json j;
    for (auto& [k, v] : cfg.entries()) j["config"][k] = v;
    j["summary"] = nlohmann::ordered_json::object();
    for (auto& [k, v] : t.summary) j["summary"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (auto& r : t.rows) j["rows"].push_back(r);
    return j.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    CLI::App app{"Eigenvalue asymptotics of thin broken waveguides", "wguide"};
    app.set_help_flag("--help", "print help");  // -h would collide with --h
    app.require_subcommand(1);
    auto common = [&](CLI::App* s) {
        s->add_option("--out", c.out, "output path (default stdout)");
        s->add_option("--format", c.format, "csv or json");
        s->add_option("--seed", c.seed, "random seed");
    };
    auto* airy = app.add_subcommand("airy", "zeros of A(x) = Ai(-x)");
    airy->add_option("--n", c.n, "largest rank");
    auto* toy = app.add_subcommand("toy", "toy model eigenvalue against its expansion");
    auto* branch = app.add_subcommand("toy-branch", "analytic continuation of a toy branch");
    for (auto* s : {toy, branch}) {
        s->add_option("--kappa", c.kappa);
        s->add_option("--n", c.n);
        s->add_option("--ladder", c.ladder, "start:ratio:count");
    }
    toy->add_option("--order", c.order, "expansion order J");
    auto* bo = app.add_subcommand("bo", "Born-Oppenheimer operators");
    bo->add_option("--operator", c.op, "tri, gui or vapp");
    bo->add_option("--h", c.h);
    bo->add_option("--ladder", c.ladder);
    bo->add_option("--n-eigs", c.n_eigs);
    bo->add_option("--xmax", c.xmax);
    auto* tri = app.add_subcommand("tri", "triangle eigenvalues by finite elements");
    auto* guide = app.add_subcommand("guide", "broken guide eigenvalues below the threshold");
    for (auto* s : {tri, guide}) {
        s->add_option("--theta", c.theta, "physical half-opening");
        s->add_option("--h", c.h, "semiclassical parameter of the scaled domain");
        s->add_option("--ladder", c.ladder);
        s->add_option("--n-eigs", c.n_eigs);
        s->add_option("--mesh-size", c.mesh_size);
        s->add_option("--element-order", c.element_order);
    }
    guide->add_option("--xmax", c.xmax, "truncation length");
    auto* quasi = app.add_subcommand("quasimode", "expansion coefficients from the quasimode recursion");
    auto* fit = app.add_subcommand("fit", "fit a ladder to an expansion in powers of h^(1/3)");
    for (auto* s : {quasi, fit}) {
        s->add_option("--family", c.family, "toy, botri, tri or gui");
        s->add_option("--n", c.n);
        s->add_option("--order", c.order);
    }
    quasi->add_option("--modes", c.modes, "transverse modes K");
    fit->add_option("--ladder", c.ladder);
    fit->add_option("--input", c.input, "CSV with param,value,error");
    fit->add_option("--mesh-size", c.mesh_size);
    fit->add_option("--element-order", c.element_order);
    auto* verify = app.add_subcommand("verify", "run the acceptance checks of one result");
    verify->add_option("theorem", c.theorem, "spectrumtoy, spectrumBOT, spectrumtriangle, spectrumguide, essprops")
        ->required();
    for (auto* s : app.get_subcommands({})) common(s);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return 2;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    try {
        validate(c);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    Table t;
    bool pass = true;
    try {
        const std::string& s = c.subcommand;
        if (s == "airy") t = cmd_airy(c);
        else if (s == "toy") t = cmd_toy(c);
        else if (s == "toy-branch") t = cmd_toy_branch(c);
        else if (s == "bo") t = cmd_bo(c);
        else if (s == "tri") t = cmd_domain(c, false);
        else if (s == "guide") t = cmd_domain(c, true);
        else if (s == "quasimode") t = cmd_quasimode(c);
        else if (s == "fit") t = cmd_fit(c);
        else t = cmd_verify(c, pass, err);
    } catch (const std::exception& e) {
        nlohmann::ordered_json j;
        j["error"] = error_kind(e);
        j["message"] = e.what();
        j["subcommand"] = c.subcommand;
        err << j.dump() << '\n';
        return 1;
    }

    std::string text = c.format == "json" ? format_json(c, t) : format_csv(c, t);
    if (c.out.empty()) {
        out << text;
    } else {
        std::ofstream f(c.out);
        if (!f) {
            err << "cannot write " << c.out << '\n';
            return 1;
        }
        f << text;
    }
    return pass ? 0 : 1;
}

}  // namespace wguide
