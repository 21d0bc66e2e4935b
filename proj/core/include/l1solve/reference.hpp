#pragma once

#include "l1solve/solver.hpp"

namespace l1solve {

/// A certified penalized minimizer x̄(λ): the accelerated-thresholding
/// iteration run until the fixed-point residual ‖x̄ − S_λ[x̄ + Kᵀ(y − Kx̄)]‖∞
/// (evaluated on the unscaled problem) drops below oracle_tol. rho = ‖x̄‖₁
/// and nnz counts components with |x̄_i| > nnz_threshold.
struct ReferenceSolution {
  double lambda = 0.0;
  double rho = 0.0;
  Vector x;
  long nnz = 0;
  double oracle_tol = 0.0;
  double certificate = 0.0;  // measured fixed-point residual at return
};

struct ReferenceOptions {
  double oracle_tol = 1e-12;
  long max_iterations = 500000;
  long check_interval = 50;     // true-residual certificate cadence
  double nnz_threshold = 1e-10;
};

/// Computes the reference minimizer for 0 < λ; λ ≥ λ_max yields the zero
/// vector directly. Throws std::runtime_error if the certificate cannot be
/// met within max_iterations — an unreliable reference is never returned.
ReferenceSolution reference_minimizer(const Objective& prob, double lambda,
                                      const ReferenceOptions& opt = {});

/// Fixed-point residual ‖x − S_λ[x + Kᵀ(y − Kx)]‖∞ of the penalized problem;
/// 2 matvecs. This is the certificate quantity used throughout.
double penalized_fixed_point_residual(const Objective& prob, const Vector& x, double lambda,
                                      MatvecCounter& mv);

}  // namespace l1solve
