#include "l1solve/linear_operator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace l1solve {

namespace {

[[noreturn]] void dim_error(const char* what, Index got, Index want) {
  throw std::invalid_argument(std::string(what) + ": vector has length " +
                              std::to_string(got) + ", operator expects " +
                              std::to_string(want));
}

}  // namespace

void LinearOperator::apply(const Vector& x, Vector& out, MatvecCounter& mv) const {
  if (x.size() != cols()) dim_error("apply", x.size(), cols());
  do_apply(x, out);
  ++mv.count;
}

void LinearOperator::apply_adjoint(const Vector& r, Vector& out, MatvecCounter& mv) const {
  if (r.size() != rows()) dim_error("apply_adjoint", r.size(), rows());
  do_apply_adjoint(r, out);
  ++mv.count;
}

Vector LinearOperator::apply(const Vector& x, MatvecCounter& mv) const {
  Vector out(rows());
  apply(x, out, mv);
  return out;
}

Vector LinearOperator::apply_adjoint(const Vector& r, MatvecCounter& mv) const {
  Vector out(cols());
  apply_adjoint(r, out, mv);
  return out;
}

double spectral_norm_estimate(const LinearOperator& op, int max_iters, double tol,
                              MatvecCounter& mv) {
  if (max_iters < 1) throw std::invalid_argument("spectral_norm_estimate: max_iters must be >= 1");
  const Index p = op.cols();
  Vector v = Vector::Ones(p) / std::sqrt(static_cast<double>(p));
  Vector kv(op.rows()), w(p);
  double sigma = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    op.apply(v, kv, mv);
    const double sigma_new = kv.norm();  // Rayleigh estimate: ‖Kv‖ with ‖v‖ = 1
    if (sigma_new == 0.0) return 0.0;    // v in the null space and no better guess
    op.apply_adjoint(kv, w, mv);
    v = w / w.norm();
    if (it > 0 && std::abs(sigma_new - sigma) <= tol * sigma_new) return sigma_new;
    sigma = sigma_new;
  }
  return sigma;
}

double spectral_norm_estimate(const LinearOperator& op, int max_iters, double tol) {
  MatvecCounter scratch;
  return spectral_norm_estimate(op, max_iters, tol, scratch);
}

}  // namespace l1solve
