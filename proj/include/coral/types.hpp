#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace coral {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error categories map onto the CLI exit-code contract:
// 0 success, 2 config, 3 data, 4 solver, 5 assertion.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr double kProbTol = 1e-12;   // simplex validation slack
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace coral
