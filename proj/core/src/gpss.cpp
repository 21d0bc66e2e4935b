#include "l1solve/gpss.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace l1solve {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double clamp_step(double a, const GpConfig& cfg) {
  return std::max(cfg.alpha_min, std::min(a, cfg.alpha_max));
}

// Accept the first λ ∈ {1, θ, θ², ...} with f(λ) ≤ f_max + β λ gd, where gd
// is the caller's ∇f(x)ᵀd and the restriction of f to the ray is the exact
// quadratic f(λ) = f0 + 2aλ + bλ² (a = (Kx − y)ᵀKd, b = ‖Kd‖²).
BacktrackResult backtrack_quadratic(double f0, double a, double b, double f_max, double gd,
                                    const GpConfig& cfg) {
  constexpr int kMaxShrinks = 60;
  double lam = 1.0;
  for (int halvings = 0; halvings <= kMaxShrinks; ++halvings) {
    const double f_trial = f0 + 2.0 * a * lam + b * lam * lam;
    if (f_trial <= f_max + cfg.beta * lam * gd) return {lam, f_trial, halvings};
    lam *= cfg.theta;
  }
  throw std::runtime_error(
      "backtracking_search: no acceptable step after 60 shrink steps; "
      "the gradient or the search direction is inconsistent");
}

}  // namespace

void GpConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("GpConfig: beta must be in (0,1)");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("GpConfig: theta must be in (0,1)");
  if (memory < 1) throw std::invalid_argument("GpConfig: memory (M) must be >= 1");
  if (!(alpha_min > 0.0 && alpha_min < alpha_max))
    throw std::invalid_argument("GpConfig: need 0 < alpha_min < alpha_max");
  if (!(tau1 > 0.0 && tau1 < 1.0)) throw std::invalid_argument("GpConfig: tau1 must be in (0,1)");
  if (alpha2_memory < 0) throw std::invalid_argument("GpConfig: alpha2_memory must be >= 0");
}

SteplengthState steplength_init(const GpConfig& cfg) {
  cfg.validate();
  SteplengthState st;
  st.tau = cfg.tau1;
  return st;
}

SteplengthChoice steplength_select(SteplengthState& st, const Vector& s, const Vector& z,
                                   const GpConfig& cfg, long k) {
  if (k < 1) throw std::invalid_argument("steplength_select: defined for k >= 1");
  SteplengthChoice choice;
  choice.tau_before = st.tau;
  choice.tau_after = st.tau;

  const double sz = s.dot(z);
  if (sz <= 0.0) {  // also covers zero s or z (stagnation)
    choice.alpha = cfg.alpha_max;
    return choice;
  }

  choice.bb_active = true;
  choice.bb1_raw = s.dot(s) / sz;
  choice.bb2_raw = sz / z.dot(z);
  const double a1 = clamp_step(choice.bb1_raw, cfg);
  const double a2 = clamp_step(choice.bb2_raw, cfg);

  st.alpha2_history.push_back(a2);
  while (st.alpha2_history.size() > static_cast<std::size_t>(cfg.alpha2_memory) + 1)
    st.alpha2_history.pop_front();

  if (a2 / a1 <= st.tau) {
    choice.alpha = *std::min_element(st.alpha2_history.begin(), st.alpha2_history.end());
    st.tau *= 0.9;
  } else {
    choice.alpha = a1;
    st.tau *= 1.1;
  }
  choice.tau_after = st.tau;
  return choice;
}

double alpha0_from_gradient(const L1Ball& ball, const Vector& x0, const Vector& grad,
                            const GpConfig& cfg) {
  const double norm = project_l1_ball(x0 - grad, ball).lpNorm<Eigen::Infinity>();
  if (norm == 0.0) return cfg.alpha_max;
  return clamp_step(1.0 / norm, cfg);
}

double alpha0_init(const Objective& prob, const L1Ball& ball, const Vector& x0,
                   const GpConfig& cfg, MatvecCounter& mv) {
  cfg.validate();
  return alpha0_from_gradient(ball, x0, prob.gradient(x0, mv), cfg);
}

BacktrackResult backtracking_search(const Objective& prob, const Vector& x, const Vector& d,
                                    double f_max, double dir_derivative, const GpConfig& cfg,
                                    MatvecCounter& mv) {
  if (!(dir_derivative < 0.0))
    throw std::invalid_argument("backtracking_search: d must be a descent direction");
  const Vector misfit = prob.op().apply(x, mv) - prob.y();
  const Vector kd = prob.op().apply(d, mv);
  return backtrack_quadratic(misfit.squaredNorm(), misfit.dot(kd), kd.squaredNorm(), f_max,
                             dir_derivative, cfg);
}

GpIterationState gp_init(const Objective& prob, const L1Ball& ball, Vector x0,
                         const GpConfig& cfg, MatvecCounter& mv) {
  cfg.validate();
  if (x0.size() == 0) x0 = Vector::Zero(prob.dim());
  if (x0.size() != prob.dim())
    throw std::invalid_argument("gp_init: starting point has wrong dimension");
  if (!ball.contains(x0, 1e-12))
    throw std::invalid_argument("gp_init: starting point is infeasible");

  GpIterationState state;
  state.x = std::move(x0);
  state.kx_minus_y = prob.op().apply(state.x, mv) - prob.y();
  state.f = state.kx_minus_y.squaredNorm();
  state.grad = 2.0 * prob.op().apply_adjoint(state.kx_minus_y, mv);
  state.alpha0 = alpha0_from_gradient(ball, state.x, state.grad, cfg);
  state.f_history.assign(1, state.f);
  return state;
}

GpStepInfo gp_iterate(const Objective& prob, const L1Ball& ball, const GpConfig& cfg,
                      GpIterationState& state, SteplengthState& sls, MatvecCounter& mv,
                      double stationarity_tol) {
  GpStepInfo info;
  if (state.stationary) {
    info.stationary = true;
    info.stationarity = 0.0;
    return info;
  }

  // Step 1: steplength
  if (state.k == 0) {
    info.steplength.alpha = state.alpha0;
  } else {
    const Vector s = state.x - sls.prev_x;
    const Vector z = state.grad - sls.prev_grad;
    info.steplength = steplength_select(sls, s, z, cfg, state.k);
  }

  // Steps 2-3: projection and feasible direction. Theory guarantees
  // ∇fᵀd < 0 whenever h ≠ x, but very close to the solution the computed
  // slope can round to +0 while ‖h − x‖ is still above the stopping
  // tolerance. Any steplength in the closed interval is permitted, and a
  // larger α grows ‖h − x‖, so escalate α until the direction is numerically
  // usable; at α_max the iterate is at the arithmetic floor and we stop.
  // Escalation costs no operator applications.
  const double first_alpha = info.steplength.alpha;
  double first_stat = 0.0;
  double alpha = first_alpha;
  Vector d;
  for (bool first = true;; first = false) {
    const Vector h = project_l1_ball(state.x - alpha * state.grad, ball);
    info.stationarity = (h - state.x).lpNorm<Eigen::Infinity>();
    if (first) first_stat = info.stationarity;
    if (info.stationarity <= stationarity_tol) {
      state.stationary = true;
      info.stationary = true;
      info.alpha = alpha;
      info.f_after = state.f;
      return info;
    }
    d = h - state.x;
    info.dir_derivative = state.grad.dot(d);
    if (info.dir_derivative < 0.0) break;
    if (alpha >= cfg.alpha_max) {
      // no usable direction at any permitted steplength: the iterate is at
      // the arithmetic floor; report the residual of the chosen steplength
      state.stationary = true;
      info.stationary = true;
      info.alpha = first_alpha;
      info.stationarity = first_stat;
      info.f_after = state.f;
      return info;
    }
    alpha = std::min(alpha * 10.0, cfg.alpha_max);
  }
  info.alpha = alpha;

  const Vector kd = prob.op().apply(d, mv);
  const double a = state.kx_minus_y.dot(kd);
  const double b = kd.squaredNorm();

  // Steps 4-5: nonmonotone reference value and backtracking
  info.f_max = *std::max_element(state.f_history.begin(), state.f_history.end());
  const BacktrackResult bt = backtrack_quadratic(state.f, a, b, info.f_max,
                                                 info.dir_derivative, cfg);
  info.step = bt.step;
  info.halvings = bt.halvings;

  // Step 6: advance, keeping the misfit cache in sync
  sls.prev_x = state.x;
  sls.prev_grad = state.grad;
  state.x += bt.step * d;
  state.kx_minus_y += bt.step * kd;
  state.f = bt.f_new;
  state.grad = 2.0 * prob.op().apply_adjoint(state.kx_minus_y, mv);
  state.f_history.push_back(state.f);
  while (state.f_history.size() > static_cast<std::size_t>(cfg.memory))
    state.f_history.pop_front();
  ++state.k;

  info.f_after = state.f;
  return info;
}

SolverState gpss_solve(const Objective& prob, const L1Ball& ball, const GpConfig& cfg,
                       const StopRule& stop, const IterationCallback& cb, Vector x0) {
  stop.validate();
  const auto start = Clock::now();

  SolverState out;
  GpIterationState state = gp_init(prob, ball, std::move(x0), cfg, out.matvecs);
  SteplengthState sls = steplength_init(cfg);
  out.reason = StopReason::MaxIterations;
  out.objective = state.f;
  double f_prev = state.f;

  for (long k = 0;; ++k) {
    if (stop.max_iterations > 0 && k >= stop.max_iterations) {
      out.reason = StopReason::MaxIterations;
      break;
    }
    if (stop.max_matvecs > 0 && out.matvecs.count >= stop.max_matvecs) {
      out.reason = StopReason::MaxMatvecs;
      break;
    }
    if (stop.max_seconds > 0.0 && seconds_since(start) >= stop.max_seconds) {
      out.reason = StopReason::MaxSeconds;
      break;
    }

    const GpStepInfo info =
        gp_iterate(prob, ball, cfg, state, sls, out.matvecs, stop.stationarity_tol);
    out.stationarity = info.stationarity;
    if (info.stationary) {
      out.reason = StopReason::Stationary;
      break;
    }

    out.iterations = state.k;
    out.objective = state.f;
    out.elapsed_seconds = seconds_since(start);

    if (cb) {
      IterationRecord rec;
      rec.k = k;
      rec.f = info.f_after;
      rec.stationarity = info.stationarity;
      rec.alpha = info.alpha;
      rec.step = info.step;
      rec.matvecs = out.matvecs.count;
      rec.elapsed_seconds = out.elapsed_seconds;
      rec.bb_active = info.steplength.bb_active;
      rec.bb1_raw = info.steplength.bb1_raw;
      rec.bb2_raw = info.steplength.bb2_raw;
      rec.tau_before = info.steplength.tau_before;
      rec.tau_after = info.steplength.tau_after;
      rec.f_max = info.f_max;
      rec.dir_derivative = info.dir_derivative;
      cb(rec, state.x);
    }

    if (stop.objective_tol > 0.0 &&
        std::abs(f_prev - state.f) <= stop.objective_tol * std::max(1.0, std::abs(state.f))) {
      out.reason = StopReason::ObjectiveTol;
      break;
    }
    f_prev = state.f;
  }

  out.x = std::move(state.x);
  out.iterations = state.k;
  out.objective = state.f;
  out.f_history = std::move(state.f_history);
  out.elapsed_seconds = seconds_since(start);
  return out;
}

}  // namespace l1solve
