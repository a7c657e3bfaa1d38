#pragma once

#include "coral/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coral {

// Exit-code contract shared by the CLI commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitAssertion = 5;

/// Single JSON config document per run; flags only pick the command and
/// override seed/output.
struct RunConfig {
    // instance
    std::string instance_name;       // builtin builder name
    std::string model_file;          // or an explicit model file
    std::size_t instance_n = 1024;   // builder parameter N
    double alpha = 0.0;
    double gamma = 0.9;
    // algorithm + solver
    std::string algorithm = "alm_mab";
    std::string solver_mode = "finite";  // finite | gda
    int gda_steps = 20000;
    double gda_step_w = 0.05;
    double gda_step_v = 0.05;
    double gda_tol = 1e-3;
    int gda_probe_levels = 5;
    // dataset sizes
    std::size_t n = 1024;
    std::size_t n0 = 1024;
    std::size_t nm = 1024;
    // experiment block (cmd_exp)
    std::string experiment;          // prop1|prop2|prop3_small|prop3_large|figure1|rate
    std::vector<std::size_t> n_grid;
    int trials = 50;
    // misc
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string dataset_file;        // cmd_solve input / cmd_gen output stem
    std::string solution_file;       // cmd_eval input
};

/// Parses and validates; throws ConfigError naming the offending field path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_echo_json(const RunConfig& cfg);

int cmd_gen(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);
int cmd_exp(const RunConfig& cfg, std::ostream& out);
int cmd_selftest(std::ostream& out);

/// Maps an in-flight exception to the exit-code contract and prints a
/// single-line machine-parsable error.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out);

}  // namespace coral
