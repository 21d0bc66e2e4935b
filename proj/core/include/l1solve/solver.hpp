#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "l1solve/linear_operator.hpp"
#include "l1solve/prox.hpp"
#include "l1solve/types.hpp"

namespace l1solve {

/// Least-squares misfit f(x) = ‖Kx − y‖² with gradient ∇f(x) = 2Kᵀ(Kx − y)
/// and residual r(x) = Kᵀ(y − Kx) = −∇f(x)/2. All evaluations count their
/// operator applications through the caller's counter.
class Objective {
 public:
  Objective(const LinearOperator& op, Vector y);

  const LinearOperator& op() const { return *op_; }
  const Vector& y() const { return y_; }
  Index dim() const { return op_->cols(); }

  double value(const Vector& x, MatvecCounter& mv) const;            // 1 matvec
  Vector residual(const Vector& x, MatvecCounter& mv) const;         // 2 matvecs
  Vector gradient(const Vector& x, MatvecCounter& mv) const;         // 2 matvecs
  double value_and_gradient(const Vector& x, Vector& grad, MatvecCounter& mv) const;

 private:
  const LinearOperator* op_;
  Vector y_;
};

enum class StopReason {
  Stationary,     // fixed-point step below stationarity_tol
  MaxIterations,
  MaxMatvecs,
  MaxSeconds,
  ObjectiveTol,   // relative objective change below objective_tol
};
std::string to_string(StopReason r);

/// Stopping rule shared by all solvers. Budgets with value 0 are unlimited;
/// at least one of the three budgets must be finite. stationarity_tol acts on
/// the solver's fixed-point step in the ∞-norm (for the gradient-projection
/// solver this is ‖h − x‖∞; for the thresholding/projected solvers the
/// analogous prox or projection step at the point where it was evaluated).
struct StopRule {
  long max_iterations = 100000;
  std::int64_t max_matvecs = 0;
  double max_seconds = 0.0;
  double stationarity_tol = 1e-9;
  double objective_tol = 0.0;  // |f_k − f_{k-1}| ≤ tol·max(1, |f_k|); 0 disables

  void validate() const;
};

/// Per-iteration telemetry. `f` is the objective at the point where the
/// solver evaluated its gradient this iteration (for the gradient-projection
/// solver, the accepted post-step value, exact from the line search);
/// `stationarity` is the fixed-point step ∞-norm. The BB fields are fed only
/// by the gradient-projection solver and hold the raw (unclamped) steplength
/// candidates plus the alternation-threshold trajectory.
struct IterationRecord {
  long k = 0;
  double f = std::numeric_limits<double>::quiet_NaN();
  double stationarity = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();  // steplength (PSD: β_k)
  double step = std::numeric_limits<double>::quiet_NaN();   // line-search λ_k
  std::int64_t matvecs = 0;
  double elapsed_seconds = 0.0;

  bool bb_active = false;  // sᵀz > 0 this iteration
  double bb1_raw = std::numeric_limits<double>::quiet_NaN();
  double bb2_raw = std::numeric_limits<double>::quiet_NaN();
  double tau_before = std::numeric_limits<double>::quiet_NaN();
  double tau_after = std::numeric_limits<double>::quiet_NaN();
  double f_max = std::numeric_limits<double>::quiet_NaN();          // nonmonotone reference
  double dir_derivative = std::numeric_limits<double>::quiet_NaN(); // ∇fᵀd
};

/// Called once per completed iteration with the record and the new iterate.
/// The vector reference is only valid during the call.
using IterationCallback = std::function<void(const IterationRecord&, const Vector& x)>;

/// Final state of a solver run.
struct SolverState {
  Vector x;
  long iterations = 0;
  MatvecCounter matvecs;
  std::deque<double> f_history;  // most recent objective values, newest last
  double objective = std::numeric_limits<double>::quiet_NaN();
  double stationarity = std::numeric_limits<double>::infinity();
  double elapsed_seconds = 0.0;
  StopReason reason = StopReason::MaxIterations;
};

/// Iterative soft-thresholding for the penalized problem
/// min ‖Kx − y‖² + 2λ‖x‖₁, iterating x⁺ = S_λ[x + Kᵀ(y − Kx)] from x⁰ = 0.
/// The scheme requires ‖K‖ < 1, so internally the iteration runs on
/// (cK, cy, c²λ) with c = 0.999; that rescaled problem has the identical
/// minimizer and satisfies the strict norm bound when ‖K‖ ≤ 1.
/// 2 matvecs per iteration.
SolverState ista_solve(const Objective& prob, const PenaltyWeight& lambda,
                       const StopRule& stop, const IterationCallback& cb = {});

/// Accelerated variant: x⁺ = T(x + ((t − 1)/t⁺)(x − x_prev)) with
/// T(v) = S_λ[v + Kᵀ(y − Kv)], t⁰ = 1, t⁺ = (1 + √(1 + 4t²))/2, x⁰ = 0.
/// Same internal rescaling and per-iteration cost as ista_solve.
SolverState fista_solve(const Objective& prob, const PenaltyWeight& lambda,
                        const StopRule& stop, const IterationCallback& cb = {});

/// Momentum coefficient recurrence used by fista_solve.
inline double fista_t_next(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

/// Projected steepest descent for the constrained problem
/// min ‖Kx − y‖² over ‖x‖₁ ≤ ρ: x⁺ = P_Ω[x + β r] with the exact
/// line-search step β = ‖r‖²/‖Kr‖², r = Kᵀ(y − Kx). Returns immediately if
/// r = 0. Every iterate is feasible. 3 matvecs per iteration.
SolverState psd_solve(const Objective& prob, const L1Ball& ball, const StopRule& stop,
                      const IterationCallback& cb = {});

/// Scale applied inside ista_solve/fista_solve to enforce ‖cK‖ < 1.
inline constexpr double kShrinkageOperatorScale = 0.999;

}  // namespace l1solve
