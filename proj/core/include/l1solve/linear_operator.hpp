#pragma once

#include <memory>

#include "l1solve/types.hpp"

namespace l1solve {

/// Abstract n×p linear map K. Solvers touch K only through this interface:
/// `apply` realizes x ↦ Kx and `apply_adjoint` realizes r ↦ Kᵀr. Every call
/// increments the supplied counter by exactly one; dimension mismatches
/// throw. Implementations are immutable after construction and safe to
/// share read-only across concurrent solver runs (counters are per-run,
/// owned by the caller).
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;  // n, data dimension
  virtual Index cols() const = 0;  // p, coefficient dimension

  /// out = K x, len(x) = p. Counts one matvec.
  void apply(const Vector& x, Vector& out, MatvecCounter& mv) const;
  /// out = Kᵀ r, len(r) = n. Counts one matvec.
  void apply_adjoint(const Vector& r, Vector& out, MatvecCounter& mv) const;

  Vector apply(const Vector& x, MatvecCounter& mv) const;
  Vector apply_adjoint(const Vector& r, MatvecCounter& mv) const;

 protected:
  virtual void do_apply(const Vector& x, Vector& out) const = 0;
  virtual void do_apply_adjoint(const Vector& r, Vector& out) const = 0;
};

/// Dense n×p matrix of 64-bit floats.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix k) : k_(std::move(k)) {}

  Index rows() const override { return k_.rows(); }
  Index cols() const override { return k_.cols(); }
  const Matrix& matrix() const { return k_; }

 protected:
  void do_apply(const Vector& x, Vector& out) const override { out.noalias() = k_ * x; }
  void do_apply_adjoint(const Vector& r, Vector& out) const override {
    out.noalias() = k_.transpose() * r;
  }

 private:
  Matrix k_;
};

/// Largest singular value of K estimated by power iteration on KᵀK with a
/// deterministic start vector (normalized all-ones). The returned value is a
/// Rayleigh-quotient estimate, hence never exceeds ‖K‖; at convergence it is
/// within `tol` of ‖K‖ relative. Costs 2 matvecs per iteration.
double spectral_norm_estimate(const LinearOperator& op, int max_iters, double tol,
                              MatvecCounter& mv);
double spectral_norm_estimate(const LinearOperator& op, int max_iters = 1000,
                              double tol = 1e-8);

}  // namespace l1solve
