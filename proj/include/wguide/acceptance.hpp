#pragma once

#include "wguide/asympt.hpp"
#include "wguide/fem2d.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace wguide {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;  // runtime limit in seconds
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Quad precision Maclaurin series for A(x) = Ai(-x), independent of the production evaluator.
struct AiryOracle {
    double value, derivative;
};
AiryOracle airy_series_oracle(double x);
double airy_zero_oracle(int n);

struct LadderRun {
    std::vector<double> h;
    std::vector<DomainSolution> solutions;
    LadderSample sample;  // ground eigenvalue with refinement errors
};

// Lazily computed ladders shared between criteria.
class AcceptanceRunner {
public:
    static constexpr int count = 12;
    CriterionResult run(int id);
    static std::string title(int id);
    static double budget(int id);

    const LadderRun& triangle_ladder();
    const LadderRun& guide_ladder();

private:
    std::unique_ptr<LadderRun> tri_, gui_;
};

// Criteria executed by `verify <theorem-id>`.
std::vector<int> theorem_criteria(const std::string& id);

std::vector<double> triangle_fit_exponents();
std::vector<double> guide_fit_exponents();
std::vector<double> guide_ladder_params();

}  // namespace wguide
