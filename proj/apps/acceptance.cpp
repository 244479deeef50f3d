#include "wguide/acceptance.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

using nlohmann::json;

namespace {

void print_line(int id, bool ok, const std::string& title, const std::string& detail, double seconds, double budget)
{
    std::printf("criterion %2d %-4s %s: %s [%.1fs of %.0fs%s]\n", id, ok ? "PASS" : "FAIL", title.c_str(),
                detail.c_str(), seconds, budget, seconds <= budget ? "" : ", over budget");
    std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria, one line per criterion", "acceptance"};
    std::vector<int> only;
    std::string report;
    int check = 0;
    bool verbose = false;
    const int count = wguide::AcceptanceRunner::count;
    app.add_option("--only", only, "criterion ids to run (default all)")->check(CLI::Range(1, count));
    app.add_option("--report", report, "write results as JSON to this path");
    app.add_option("--check", check, "read --report and exit with the status of one criterion")->check(CLI::Range(1, count));
    app.add_flag("--verbose", verbose, "print the data rows of each criterion");
    CLI11_PARSE(app, argc, argv);

    if (check) {
        std::ifstream in(report);
        if (!in) {
            std::fprintf(stderr, "no report at %s\n", report.c_str());
            return 1;
        }
        json j = json::parse(in);
        for (auto& r : j)
            if (r["id"] == check) {
                bool ok = r["pass"].get<bool>() && r["seconds"].get<double>() <= r["budget"].get<double>();
                print_line(check, ok, r["title"], r["detail"], r["seconds"], r["budget"]);
                return ok ? 0 : 1;
            }
        std::fprintf(stderr, "criterion %d not in report\n", check);
        return 1;
    }

    if (only.empty())
        for (int i = 1; i <= count; ++i) only.push_back(i);
    wguide::AcceptanceRunner run;
    json out = json::array();
    int failed = 0;
    for (int id : only) {
        auto r = run.run(id);
        bool ok = r.pass && r.seconds <= r.budget;
        failed += !ok;
        print_line(id, ok, r.title, r.detail, r.seconds, r.budget);
        if (verbose) {
            for (size_t j = 0; j < r.columns.size(); ++j) std::printf("%s%s", j ? "," : "    ", r.columns[j].c_str());
            std::printf("\n");
            for (auto& row : r.rows) {
                for (size_t j = 0; j < row.size(); ++j) std::printf("%s%.10g", j ? "," : "    ", row[j]);
                std::printf("\n");
            }
        }
        out.push_back({{"id", id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail},
                       {"seconds", r.seconds}, {"budget", r.budget}, {"columns", r.columns}, {"rows", r.rows}});
    }
    if (!report.empty()) std::ofstream(report) << out.dump(1) << '\n';
    // with a report the run only produces data; the per-criterion checks carry the verdicts
    return report.empty() && failed ? 1 : 0;
}
