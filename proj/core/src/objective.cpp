#include "l1solve/solver.hpp"

#include <stdexcept>

namespace l1solve {

Objective::Objective(const LinearOperator& op, Vector y) : op_(&op), y_(std::move(y)) {
  if (y_.size() != op_->rows())
    throw std::invalid_argument("Objective: data vector length does not match operator rows");
}

double Objective::value(const Vector& x, MatvecCounter& mv) const {
  return (op_->apply(x, mv) - y_).squaredNorm();
}

Vector Objective::residual(const Vector& x, MatvecCounter& mv) const {
  const Vector misfit = y_ - op_->apply(x, mv);
  return op_->apply_adjoint(misfit, mv);
}

Vector Objective::gradient(const Vector& x, MatvecCounter& mv) const {
  return -2.0 * residual(x, mv);
}

double Objective::value_and_gradient(const Vector& x, Vector& grad, MatvecCounter& mv) const {
  const Vector misfit = op_->apply(x, mv) - y_;
  grad = 2.0 * op_->apply_adjoint(misfit, mv);
  return misfit.squaredNorm();
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Stationary: return "stationary";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::MaxMatvecs: return "max_matvecs";
    case StopReason::MaxSeconds: return "max_seconds";
    case StopReason::ObjectiveTol: return "objective_tol";
  }
  return "unknown";
}

void StopRule::validate() const {
  if (max_iterations <= 0 && max_matvecs <= 0 && max_seconds <= 0.0)
    throw std::invalid_argument(
        "StopRule: at least one of max_iterations, max_matvecs, max_seconds must be finite");
  if (stationarity_tol < 0.0 || objective_tol < 0.0)
    throw std::invalid_argument("StopRule: tolerances must be >= 0");
}

}  // namespace l1solve
