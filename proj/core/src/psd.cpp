#include <chrono>

#include "l1solve/solver.hpp"

namespace l1solve {

namespace {
using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}
}  // namespace

SolverState psd_solve(const Objective& prob, const L1Ball& ball, const StopRule& stop,
                      const IterationCallback& cb) {
  stop.validate();
  const auto start = Clock::now();

  SolverState state;
  state.x = Vector::Zero(prob.dim());
  state.reason = StopReason::MaxIterations;
  double f_prev = std::numeric_limits<double>::infinity();

  for (long k = 0;; ++k) {
    if (stop.max_iterations > 0 && k >= stop.max_iterations) {
      state.reason = StopReason::MaxIterations;
      break;
    }
    if (stop.max_matvecs > 0 && state.matvecs.count >= stop.max_matvecs) {
      state.reason = StopReason::MaxMatvecs;
      break;
    }
    if (stop.max_seconds > 0.0 && seconds_since(start) >= stop.max_seconds) {
      state.reason = StopReason::MaxSeconds;
      break;
    }

    const Vector misfit = prob.y() - prob.op().apply(state.x, state.matvecs);
    const double f = misfit.squaredNorm();
    const Vector r = prob.op().apply_adjoint(misfit, state.matvecs);
    if (r.lpNorm<Eigen::Infinity>() == 0.0) {
      // unconstrained least-squares point: already stationary
      state.objective = f;
      state.stationarity = 0.0;
      state.reason = StopReason::Stationary;
      break;
    }
    const Vector kr = prob.op().apply(r, state.matvecs);
    const double denom = kr.squaredNorm();
    if (denom == 0.0) {  // possible only through rounding; treat as stationary
      state.objective = f;
      state.stationarity = 0.0;
      state.reason = StopReason::Stationary;
      break;
    }
    const double beta = r.squaredNorm() / denom;  // exact line-search step
    Vector x_new = project_l1_ball(state.x + beta * r, ball);
    const double stat = (x_new - state.x).lpNorm<Eigen::Infinity>();

    state.x = std::move(x_new);
    state.iterations = k + 1;
    state.objective = f;
    state.stationarity = stat;
    state.elapsed_seconds = seconds_since(start);
    state.f_history.push_back(f);
    while (state.f_history.size() > 10) state.f_history.pop_front();

    if (cb) {
      IterationRecord rec;
      rec.k = k;
      rec.f = f;
      rec.stationarity = stat;
      rec.alpha = beta;
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

}  // namespace l1solve
