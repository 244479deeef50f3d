#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace wguide {

struct RunConfig {
    std::string subcommand;
    std::string theorem;        // verify
    std::string family = "tri"; // quasimode, fit
    std::string op = "tri";     // bo: tri | gui | vapp
    double theta = 0.0, h = 0.0, kappa = 0.0;  // 0 = not given
    int n = 1;
    int n_eigs = 1;
    int order = 3;
    double mesh_size = 0.3;
    int element_order = 2;
    int modes = 40;
    double xmax = 0.0;
    std::string ladder;  // start:ratio:count
    std::string input;   // fit: CSV with param,value,error
    std::string out;
    std::string format = "csv";
    unsigned seed = 42;

    std::vector<std::pair<std::string, std::string>> entries() const;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> summary;
};

std::string format_csv(const RunConfig& cfg, const Table& t);
std::string format_json(const RunConfig& cfg, const Table& t);

// exit codes: 0 success, 1 computation or tolerance failure, 2 usage error
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wguide
