#include "wguide/asympt.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace wguide {

void LadderSample::validate() const
{
    size_t n = params.size();
    if (values.size() != n || errors.size() != n) throw PreconditionError("ladder: size mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0)) throw PreconditionError("ladder: error estimates must be positive");
        if (!(params[i] > 0)) throw PreconditionError("ladder: parameters must be positive");
    }
    if (n < 2) return;
    double r0 = params[1] / params[0];
    if (!(r0 < 1)) throw PreconditionError("ladder: parameters must decrease");
    for (size_t i = 2; i < n; ++i)
        if (std::fabs(params[i] / params[i - 1] - r0) > 1e-9 * r0) throw PreconditionError("ladder: not geometric");
}

std::vector<double> geometric_ladder(double start, double ratio, int count)
{
    if (count < 1 || !(start > 0) || !(ratio > 0 && ratio < 1)) throw PreconditionError("bad ladder specification");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = start * std::pow(ratio, i);
    return out;
}

double ExpansionFit::coefficient_at(double e) const
{
    for (size_t j = 0; j < exponents.size(); ++j)
        if (std::fabs(exponents[j] - e) < 1e-9) return coefficients[j];
    throw std::out_of_range("exponent not in fit");
}

double ExpansionFit::stderr_at(double e) const
{
    for (size_t j = 0; j < exponents.size(); ++j)
        if (std::fabs(exponents[j] - e) < 1e-9) return stderrs[j];
    throw std::out_of_range("exponent not in fit");
}

double ExpansionFit::evaluate(double h) const
{
    double v = 0;
    for (size_t j = 0; j < exponents.size(); ++j) v += coefficients[j] * std::pow(h, exponents[j]);
    return v;
}

namespace {

ExpansionFit solve_wls(const LadderSample& s, const std::vector<double>& ex, const std::vector<int>& keep)
{
    const int n = int(keep.size()), p = int(ex.size());
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        int k = keep[i];
        double w = 1.0 / s.errors[k];
        for (int j = 0; j < p; ++j) x(i, j) = w * std::pow(s.params[k], ex[j]);
        y[i] = w * s.values[k];
    }
    // column equilibration keeps the reported condition about the basis, not the units
    Eigen::VectorXd cs = x.colwise().norm().transpose();
    Eigen::MatrixXd xs = x * cs.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    Eigen::VectorXd cz = svd.solve(y);
    Eigen::VectorXd c = cz.cwiseQuotient(cs);

    ExpansionFit f;
    f.exponents = ex;
    f.coefficients.assign(c.data(), c.data() + p);
    f.condition = sv[0] / sv[p - 1];
    f.ill_conditioned = f.condition > 1e10;
    Eigen::VectorXd r = x * c - y;
    f.residual_norm = r.norm();
    double chi2 = n > p ? r.squaredNorm() / (n - p) : 0.0;
    Eigen::MatrixXd vinv = svd.matrixV() * sv.cwiseInverse().cwiseAbs2().asDiagonal() * svd.matrixV().transpose();
    double scale = std::max(1.0, chi2);
    f.stderrs.resize(p);
    for (int j = 0; j < p; ++j) f.stderrs[j] = std::sqrt(vinv(j, j) * scale) / cs[j];
    return f;
}

}  // namespace

ExpansionFit fit_expansion(const LadderSample& s, const std::vector<double>& ex, const FitOptions& opt)
{
    s.validate();
    if (ex.empty()) throw PreconditionError("fit: no exponents");
    if (s.params.size() < ex.size() + 2) throw PreconditionError("fit: need at least #exponents + 2 samples");
    std::vector<int> keep(s.params.size());
    for (size_t i = 0; i < keep.size(); ++i) keep[i] = int(i);
    ExpansionFit f = solve_wls(s, ex, keep);
    if (!opt.screen_noise) return f;

    for (int round = 0; round < 3; ++round) {
        std::vector<int> next, refused;
        for (size_t i = 0; i < s.params.size(); ++i) {
            double smallest = INFINITY;
            for (size_t j = 0; j < ex.size(); ++j) {
                if (std::fabs(f.coefficients[j]) <= 2.0 * f.stderrs[j]) continue;
                smallest = std::min(smallest, std::fabs(f.coefficients[j]) * std::pow(s.params[i], ex[j]));
            }
            if (s.errors[i] > opt.noise_fraction * smallest)
                refused.push_back(int(i));
            else
                next.push_back(int(i));
        }
        if (next == keep) break;
        if (next.size() < ex.size() + 2) throw PreconditionError("fit: too few samples survive the noise screen");
        keep = next;
        f = solve_wls(s, ex, keep);
        f.refused = refused;
    }
    return f;
}

SlopeResult loglog_slope(const std::vector<double>& params, const std::vector<double>& res)
{
    size_t n = params.size();
    if (res.size() != n || n < 2) throw PreconditionError("slope: need matching arrays with >= 2 points");
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(res[i] > 0) || !(params[i] > 0)) throw PreconditionError("slope: residuals must be positive");
        lx[i] = std::log(params[i]);
        ly[i] = std::log(res[i]);
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
    double b = sxy / sxx, a = my - b * mx;
    double ss = 0;
    for (size_t i = 0; i < n; ++i) ss += std::pow(ly[i] - a - b * lx[i], 2);
    double se = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    return {b, se, a};
}

std::string fit_to_json(const ExpansionFit& f)
{
    nlohmann::json j = nlohmann::json::array();
    for (size_t k = 0; k < f.exponents.size(); ++k)
        j.push_back({{"exponent", f.exponents[k]},
                     {"coefficient", f.coefficients[k]},
                     {"stderr", f.stderrs[k]},
                     {"condition", f.condition}});
    return j.dump(2);
}

}  // namespace wguide
