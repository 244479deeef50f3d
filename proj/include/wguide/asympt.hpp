#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wguide {

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LadderSample {
    std::vector<double> params;  // strictly decreasing, constant ratio
    std::vector<double> values;
    std::vector<double> errors;  // positive

    void validate() const;
};

// Geometric ladder start * ratio^i, i = 0..count-1.
std::vector<double> geometric_ladder(double start, double ratio, int count);

struct ExpansionFit {
    std::vector<double> exponents;
    std::vector<double> coefficients;
    std::vector<double> stderrs;
    double condition = 0.0;
    double residual_norm = 0.0;  // weighted
    bool ill_conditioned = false;
    std::vector<int> refused;  // sample indices dropped by the noise screen

    double coefficient_at(double exponent) const;
    double stderr_at(double exponent) const;
    double evaluate(double h) const;
};

struct FitOptions {
    bool screen_noise = true;
    double noise_fraction = 0.1;
};

ExpansionFit fit_expansion(const LadderSample& s, const std::vector<double>& exponents, const FitOptions& opt = {});

struct SlopeResult {
    double slope;
    double stderr;
    double intercept;
};

SlopeResult loglog_slope(const std::vector<double>& params, const std::vector<double>& residuals);

std::string fit_to_json(const ExpansionFit& f);

}  // namespace wguide
