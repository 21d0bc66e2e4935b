#pragma once

#include "l1solve/linear_operator.hpp"
#include "l1solve/types.hpp"

namespace l1solve {

/// Feasible region Ω = { x : ‖x‖₁ ≤ ρ }, ρ ≥ 0.
class L1Ball {
 public:
  explicit L1Ball(double rho);
  double radius() const { return rho_; }
  bool contains(const Vector& x, double tol = 1e-12) const;

 private:
  double rho_;
};

/// ℓ1 penalty weight λ ≥ 0 of the penalized formulation.
class PenaltyWeight {
 public:
  explicit PenaltyWeight(double lambda);
  double value() const { return lambda_; }

 private:
  double lambda_;
};

/// Componentwise soft-thresholding S_t: x_i ↦ x_i − t·sgn(x_i) if |x_i| > t,
/// else 0. Throws for t < 0.
Vector soft_threshold(const Vector& x, double t);
inline Vector soft_threshold(const Vector& x, const PenaltyWeight& lambda) {
  return soft_threshold(x, lambda.value());
}

struct L1Projection {
  Vector point;
  double threshold;  // θ ≥ 0 with point = S_θ[x]; 0 when x was already feasible
};

/// Euclidean projection onto the ℓ1 ball: argmin_{‖u‖₁ ≤ ρ} ‖u − x‖.
/// Already-feasible points are returned unchanged; otherwise the result is
/// S_θ[x] for the θ solving ‖S_θ[x]‖₁ = ρ, found by the sort-based exact
/// method (O(p log p)). The returned point satisfies ‖u‖₁ ≤ ρ in floating
/// point, so projecting twice is exactly idempotent.
L1Projection project_l1_ball_with_threshold(const Vector& x, const L1Ball& ball);
Vector project_l1_ball(const Vector& x, const L1Ball& ball);

/// λ_max = max_i |(Kᵀy)_i|, the smallest penalty for which the penalized
/// minimizer is the zero vector.
double lambda_max(const LinearOperator& op, const Vector& y, MatvecCounter& mv);
double lambda_max(const LinearOperator& op, const Vector& y);

/// Penalty weight corresponding to a constrained (near-)minimizer x_rho:
/// λ = max_i |(Kᵀ(y − K x_rho))_i|. Accuracy of x_rho is the caller's
/// responsibility; x_rho = 0 recovers lambda_max.
double lambda_from_rho(const LinearOperator& op, const Vector& y, const Vector& x_rho,
                       MatvecCounter& mv);
double lambda_from_rho(const LinearOperator& op, const Vector& y, const Vector& x_rho);

/// Ball radius corresponding to a penalized minimizer: ρ = ‖x_lambda‖₁.
double rho_from_lambda(const Vector& x_lambda);

}  // namespace l1solve
