#include <chrono>

#include "l1solve/solver.hpp"

namespace l1solve {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Budget bookkeeping shared by the iterative solvers. Stationarity is
// checked by the solver itself; budgets are checked after each iteration.
bool budget_reached(const StopRule& stop, long k, std::int64_t matvecs, double elapsed,
                    StopReason& reason) {
  if (stop.max_iterations > 0 && k >= stop.max_iterations) {
    reason = StopReason::MaxIterations;
    return true;
  }
  if (stop.max_matvecs > 0 && matvecs >= stop.max_matvecs) {
    reason = StopReason::MaxMatvecs;
    return true;
  }
  if (stop.max_seconds > 0.0 && elapsed >= stop.max_seconds) {
    reason = StopReason::MaxSeconds;
    return true;
  }
  return false;
}

void push_history(std::deque<double>& hist, double f, std::size_t cap = 10) {
  hist.push_back(f);
  while (hist.size() > cap) hist.pop_front();
}

// Shared body of the two thresholding solvers; `accelerated` switches the
// momentum extrapolation on.
SolverState shrinkage_solve(const Objective& prob, const PenaltyWeight& lambda,
                            const StopRule& stop, const IterationCallback& cb,
                            bool accelerated) {
  stop.validate();
  const auto start = Clock::now();
  const double c = kShrinkageOperatorScale;
  const double c2 = c * c;
  const double lam_eff = lambda.value() * c2;

  SolverState state;
  state.x = Vector::Zero(prob.dim());
  Vector x_prev = state.x;
  double t = 1.0;
  double f_prev = std::numeric_limits<double>::infinity();
  state.reason = StopReason::MaxIterations;

  for (long k = 0;; ++k) {
    if (budget_reached(stop, k, state.matvecs.count, seconds_since(start), state.reason)) break;

    Vector point = state.x;  // gradient-evaluation point (extrapolated when accelerated)
    double t_next = t;
    if (accelerated) {
      t_next = fista_t_next(t);
      point += ((t - 1.0) / t_next) * (state.x - x_prev);
    }
    const Vector misfit = prob.op().apply(point, state.matvecs) - prob.y();
    const double f = misfit.squaredNorm();
    const Vector r = prob.op().apply_adjoint(misfit, state.matvecs);  // Kᵀ(Kv − y) = −r(v)
    Vector x_new = soft_threshold(point - c2 * r, lam_eff);
    const double stat = (x_new - point).lpNorm<Eigen::Infinity>();

    x_prev = state.x;
    state.x = std::move(x_new);
    t = t_next;
    state.iterations = k + 1;
    state.objective = f;
    state.stationarity = stat;
    state.elapsed_seconds = seconds_since(start);
    push_history(state.f_history, f);

    if (cb) {
      IterationRecord rec;
      rec.k = k;
      rec.f = f;
      rec.stationarity = stat;
      rec.alpha = 1.0;
      rec.step = 1.0;
      rec.matvecs = state.matvecs.count;
      rec.elapsed_seconds = state.elapsed_seconds;
      cb(rec, state.x);
    }

    if (stop.stationarity_tol > 0.0 && stat <= stop.stationarity_tol) {
      state.reason = StopReason::Stationary;
      break;
    }
    if (stop.objective_tol > 0.0 &&
        std::abs(f_prev - f) <= stop.objective_tol * std::max(1.0, std::abs(f))) {
      state.reason = StopReason::ObjectiveTol;
      break;
    }
    f_prev = f;
  }
  state.elapsed_seconds = seconds_since(start);
  return state;
}

}  // namespace

SolverState ista_solve(const Objective& prob, const PenaltyWeight& lambda, const StopRule& stop,
                       const IterationCallback& cb) {
  return shrinkage_solve(prob, lambda, stop, cb, false);
}

SolverState fista_solve(const Objective& prob, const PenaltyWeight& lambda, const StopRule& stop,
                        const IterationCallback& cb) {
  return shrinkage_solve(prob, lambda, stop, cb, true);
}

}  // namespace l1solve
