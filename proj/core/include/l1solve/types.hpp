#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace l1solve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Counts applications of K and Kᵀ. One forward or adjoint application
/// costs exactly one unit; this is the machine-independent cost measure
/// used everywhere budgets or solver comparisons appear.
struct MatvecCounter {
  std::int64_t count = 0;
};

}  // namespace l1solve
