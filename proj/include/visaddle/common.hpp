#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace visaddle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Malformed problem/solver configuration (bad set bounds, negative gamma,
// indefinite preconditioner, ...). Raised before any iteration runs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or a failed numerical subroutine during evaluation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace visaddle
