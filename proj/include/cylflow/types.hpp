#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace cylflow {

using Real = double;
using Vector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Thrown for malformed configs / invalid user input (CLI exit code 64).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a solve breaks down at runtime: NaN/Inf state, Newton stall,
// linear solver failure, ghost closure failure (CLI exit code 1).
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cylflow
