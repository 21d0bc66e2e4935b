#include "l1solve/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace l1solve {

L1Ball::L1Ball(double rho) : rho_(rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("L1Ball: radius must be >= 0");
}

bool L1Ball::contains(const Vector& x, double tol) const {
  return x.lpNorm<1>() <= rho_ + tol;
}

PenaltyWeight::PenaltyWeight(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("PenaltyWeight: lambda must be >= 0");
}

Vector soft_threshold(const Vector& x, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi > t)
      out[i] = xi - t;
    else if (xi < -t)
      out[i] = xi + t;
    else
      out[i] = 0.0;
  }
  return out;
}

L1Projection project_l1_ball_with_threshold(const Vector& x, const L1Ball& ball) {
  const double rho = ball.radius();
  if (rho == 0.0) return {Vector::Zero(x.size()), x.lpNorm<Eigen::Infinity>()};
  if (x.lpNorm<1>() <= rho) return {x, 0.0};

  // Sort |x| descending; the largest k with |x|_(k) > (Σ_{i≤k}|x|_(i) − ρ)/k
  // fixes the threshold θ = (Σ_{i≤k}|x|_(i) − ρ)/k.
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    cumulative += mags[i];
    const double candidate = (cumulative - rho) / static_cast<double>(i + 1);
    if (mags[i] > candidate)
      theta = candidate;
    else
      break;
  }
  if (theta < 0.0) theta = 0.0;

  Vector point = soft_threshold(x, theta);
  // Rounding can leave ‖point‖₁ a few ulps above ρ; nudge θ up until the
  // result is feasible in floating point, which makes re-projection exact.
  double bump = std::max(theta, x.lpNorm<Eigen::Infinity>()) *
                std::numeric_limits<double>::epsilon();
  int guard = 0;
  while (point.lpNorm<1>() > rho && guard++ < 64) {
    theta += bump;
    bump *= 2.0;
    point = soft_threshold(x, theta);
  }
  return {std::move(point), theta};
}

Vector project_l1_ball(const Vector& x, const L1Ball& ball) {
  return project_l1_ball_with_threshold(x, ball).point;
}

double lambda_max(const LinearOperator& op, const Vector& y, MatvecCounter& mv) {
  return op.apply_adjoint(y, mv).lpNorm<Eigen::Infinity>();
}

double lambda_max(const LinearOperator& op, const Vector& y) {
  MatvecCounter scratch;
  return lambda_max(op, y, scratch);
}

double lambda_from_rho(const LinearOperator& op, const Vector& y, const Vector& x_rho,
                       MatvecCounter& mv) {
  const Vector misfit = y - op.apply(x_rho, mv);
  return op.apply_adjoint(misfit, mv).lpNorm<Eigen::Infinity>();
}

double lambda_from_rho(const LinearOperator& op, const Vector& y, const Vector& x_rho) {
  MatvecCounter scratch;
  return lambda_from_rho(op, y, x_rho, scratch);
}

double rho_from_lambda(const Vector& x_lambda) { return x_lambda.lpNorm<1>(); }

}  // namespace l1solve
