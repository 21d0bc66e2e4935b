#pragma once

#include <deque>
#include <vector>

#include "l1solve/solver.hpp"

namespace l1solve {

/// Parameters of the gradient-projection solver. Defaults are the reference
/// setting: monotone line search (M = 1), θ = 0.5, β = 1e-4, steplength
/// clamps [1e-10, 1e10], initial alternation threshold τ₁ = 0.5 and a
/// two-deep extra memory for the BB2 history (M_α = 2).
struct GpConfig {
  double beta = 1e-4;        // Armijo slope parameter, ∈ (0,1)
  double theta = 0.5;        // backtracking shrink factor, ∈ (0,1)
  int memory = 1;            // M, nonmonotone line-search window, ≥ 1
  double alpha_min = 1e-10;
  double alpha_max = 1e10;
  double tau1 = 0.5;         // initial alternation threshold, ∈ (0,1)
  int alpha2_memory = 2;     // M_α, ≥ 0

  void validate() const;  // throws std::invalid_argument on violation
};

/// Mutable state of the adaptive steplength rule: the variable threshold
/// τ_k, the ring buffer of the last M_α+1 clamped BB2 values, and the
/// previous iterate/gradient from which the secant pair (s, z) is formed.
/// Iterations with sᵀz ≤ 0 produce no BB2 value and leave τ and the buffer
/// untouched.
struct SteplengthState {
  double tau = 0.5;
  std::deque<double> alpha2_history;  // newest last, capacity alpha2_memory + 1
  Vector prev_x;
  Vector prev_grad;
};

SteplengthState steplength_init(const GpConfig& cfg);

/// Outcome of one steplength selection, including the raw (unclamped) BB
/// values for telemetry. bb_active is false on the sᵀz ≤ 0 branch, where
/// α = α_max and nothing else changes.
struct SteplengthChoice {
  double alpha = 0.0;
  bool bb_active = false;
  double bb1_raw = std::numeric_limits<double>::quiet_NaN();
  double bb2_raw = std::numeric_limits<double>::quiet_NaN();
  double tau_before = std::numeric_limits<double>::quiet_NaN();
  double tau_after = std::numeric_limits<double>::quiet_NaN();
};

/// Adaptive Barzilai-Borwein alternation, k ≥ 1:
///   sᵀz ≤ 0            → α = α_max
///   otherwise           α⁽¹⁾ = clamp(sᵀs/sᵀz), α⁽²⁾ = clamp(sᵀz/zᵀz);
///     α⁽²⁾/α⁽¹⁾ ≤ τ_k  → α = min of the stored α⁽²⁾ values (incl. current),
///                        τ_{k+1} = 0.9 τ_k
///     else              → α = α⁽¹⁾, τ_{k+1} = 1.1 τ_k
/// where s = x_k − x_{k−1} and z = ∇f(x_k) − ∇f(x_{k−1}). Zero s or z is
/// treated as the sᵀz ≤ 0 branch.
SteplengthChoice steplength_select(SteplengthState& st, const Vector& s, const Vector& z,
                                   const GpConfig& cfg, long k);

/// Initial steplength α₀ = max{α_min, min{‖P_Ω(x⁰ − ∇f(x⁰))‖∞⁻¹, α_max}};
/// a zero projected vector yields α_max. Costs 2 matvecs for the gradient.
double alpha0_init(const Objective& prob, const L1Ball& ball, const Vector& x0,
                   const GpConfig& cfg, MatvecCounter& mv);
/// Same formula from an already-computed gradient (no operator cost).
double alpha0_from_gradient(const L1Ball& ball, const Vector& x0, const Vector& grad,
                            const GpConfig& cfg);

struct BacktrackResult {
  double step = 1.0;   // accepted λ_k ∈ {1, θ, θ², ...}
  double f_new = 0.0;  // f(x + λ_k d)
  int halvings = 0;
};

/// Nonmonotone Armijo backtracking: first λ ∈ {1, θ, θ², ...} with
/// f(x + λd) ≤ f_max + β λ ∇f(x)ᵀd. Requires ∇f(x)ᵀd < 0; aborts with a
/// diagnostic after 60 shrink steps (possible only if the gradient or the
/// direction is inconsistent). Costs 2 matvecs (Kx and Kd); trial values come
/// from the exact quadratic restriction of f to the ray, so shrink steps are
/// free.
BacktrackResult backtracking_search(const Objective& prob, const Vector& x, const Vector& d,
                                    double f_max, double dir_derivative, const GpConfig& cfg,
                                    MatvecCounter& mv);

/// Iteration workspace of the gradient-projection loop. Caches Kx − y, the
/// objective and the gradient so a steady-state iteration costs 2 matvecs.
struct GpIterationState {
  Vector x;
  Vector kx_minus_y;
  Vector grad;
  double f = 0.0;
  long k = 0;
  std::deque<double> f_history;  // last ≤ M objective values, newest last
  double alpha0 = 0.0;
  bool stationary = false;
};

/// Validates x⁰ ∈ Ω, evaluates f and ∇f there and fixes α₀ (2 matvecs).
GpIterationState gp_init(const Objective& prob, const L1Ball& ball, Vector x0,
                         const GpConfig& cfg, MatvecCounter& mv);

/// Telemetry of one gradient-projection iteration.
struct GpStepInfo {
  bool stationary = false;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double step = std::numeric_limits<double>::quiet_NaN();
  double f_after = std::numeric_limits<double>::quiet_NaN();
  double stationarity = std::numeric_limits<double>::quiet_NaN();  // ‖h − x‖∞
  double f_max = std::numeric_limits<double>::quiet_NaN();
  double dir_derivative = std::numeric_limits<double>::quiet_NaN();
  SteplengthChoice steplength;
  int halvings = 0;
};

/// One iteration of the projected line-search loop:
/// choose α_k, project h = P_Ω(x − α∇f), stop if ‖h − x‖∞ ≤ stationarity_tol,
/// else backtrack along d = h − x and advance. Feasibility of every iterate
/// follows from h ∈ Ω and λ_k ∈ (0, 1].
GpStepInfo gp_iterate(const Objective& prob, const L1Ball& ball, const GpConfig& cfg,
                      GpIterationState& state, SteplengthState& sls, MatvecCounter& mv,
                      double stationarity_tol = 0.0);

/// Full solver for min ‖Kx − y‖² over ‖x‖₁ ≤ ρ: the gradient-projection
/// loop equipped with the adaptive BB steplength alternation. x0 empty means
/// the zero vector. With M = 1 the objective sequence is nonincreasing.
SolverState gpss_solve(const Objective& prob, const L1Ball& ball, const GpConfig& cfg,
                       const StopRule& stop, const IterationCallback& cb = {},
                       Vector x0 = Vector());

}  // namespace l1solve
