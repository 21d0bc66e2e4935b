#include <doctest.h>

#include <cmath>

#include "l1solve/generators.hpp"
#include "l1solve/prox.hpp"
#include "l1solve/rng.hpp"
#include "l1solve/solver.hpp"
#include "test_util.hpp"

using namespace l1solve;
using l1solve::testutil::make_vec;

namespace {

StopRule tight_stop(long iters = 5000, double tol = 1e-13) {
  StopRule stop;
  stop.max_iterations = iters;
  stop.stationarity_tol = tol;
  return stop;
}

}  // namespace

TEST_CASE("objective: value, residual, gradient identities") {
  Rng rng(7);
  const DenseOperator k(rng.normal_matrix(10, 30));
  const Vector y = rng.normal_vector(10);
  const Objective obj(k, y);
  MatvecCounter mv;

  const Vector x = rng.normal_vector(30);
  const Vector r = obj.residual(x, mv);
  const Vector g = obj.gradient(x, mv);
  CHECK((g + 2.0 * r).lpNorm<Eigen::Infinity>() == 0.0);  // ∇f = −2r, same code path
  CHECK(obj.value(x, mv) >= 0.0);

  Vector g2;
  const double f = obj.value_and_gradient(x, g2, mv);
  CHECK(f == doctest::Approx(obj.value(x, mv)).epsilon(1e-15));
  CHECK((g2 - g).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("objective gradient matches central finite differences") {
  Rng rng(13);
  const GeneratedProblem prob = gen_gaussian_problem(10, 30, 5, 0.02, 13);
  const Objective obj(*prob.op, prob.y);
  MatvecCounter mv;
  const double h = 1e-6;
  for (int rep = 0; rep < 20; ++rep) {
    const Vector x = rng.normal_vector(30);
    Vector grad;
    obj.value_and_gradient(x, grad, mv);
    const double scale = std::max(1.0, grad.lpNorm<Eigen::Infinity>());
    for (Index i = 0; i < 30; ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (obj.value(xp, mv) - obj.value(xm, mv)) / (2.0 * h);
      CHECK(std::abs(fd - grad[i]) / scale <= 1e-5);
    }
  }
}

TEST_CASE("ista: identity operator converges to the scalar prox") {
  const DenseOperator id(Matrix::Identity(2, 2));
  const Objective obj(id, make_vec({2.0, 0.0}));
  const SolverState sol = ista_solve(obj, PenaltyWeight(1.0), tight_stop());
  CHECK((sol.x - make_vec({1.0, 0.0})).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(sol.reason == StopReason::Stationary);
}

TEST_CASE("ista: lambda above lambda_max converges to zero") {
  const GeneratedProblem prob = gen_gaussian_problem(8, 20, 3, 0.02, 19);
  const Objective obj(*prob.op, prob.y);
  const double lmax = lambda_max(*prob.op, prob.y);
  const SolverState sol = ista_solve(obj, PenaltyWeight(lmax * 1.5), tight_stop());
  CHECK(sol.x.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("ista: zero penalty approaches the least-squares solution") {
  Rng rng(21);
  Matrix m = rng.normal_matrix(6, 6);
  m += 6.0 * Matrix::Identity(6, 6);  // well-conditioned square system
  m /= spectral_norm_estimate(DenseOperator(m)) * 1.2;
  const DenseOperator k(m);
  const Vector x_star = rng.normal_vector(6);
  MatvecCounter mv;
  const Vector y = k.apply(x_star, mv);
  const Objective obj(k, y);
  const SolverState sol = ista_solve(obj, PenaltyWeight(0.0), tight_stop(20000, 1e-14));
  CHECK((sol.x - x_star).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("fista: momentum coefficient sequence from the recurrence") {
  const double t0 = 1.0;
  const double t1 = fista_t_next(t0);
  const double t2 = fista_t_next(t1);
  CHECK(t1 == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(t1 == doctest::Approx(1.6180339887498949).epsilon(1e-14));
  CHECK(t2 == doctest::Approx(2.1935270853310539).epsilon(1e-14));
}

TEST_CASE("fista: first iterate equals ista's first iterate from zero") {
  const GeneratedProblem prob = gen_gaussian_problem(12, 25, 4, 0.02, 23);
  const Objective obj(*prob.op, prob.y);
  const PenaltyWeight lambda(0.1 * lambda_max(*prob.op, prob.y));
  StopRule one;
  one.max_iterations = 1;
  one.stationarity_tol = 0.0;
  const SolverState a = ista_solve(obj, lambda, one);
  const SolverState b = fista_solve(obj, lambda, one);
  CHECK(l1solve::testutil::exactly_equal(a.x, b.x));
}

TEST_CASE("fista: two iterations match an independent hand trace") {
  const GeneratedProblem prob = gen_gaussian_problem(9, 14, 3, 0.02, 47);
  const Objective obj(*prob.op, prob.y);
  const Matrix& k = prob.op->matrix();
  const Vector& y = prob.y;
  const double lambda = 0.2 * lambda_max(*prob.op, prob.y);

  // re-derive two extrapolated-thresholding steps from scratch
  const double c2 = kShrinkageOperatorScale * kShrinkageOperatorScale;
  const double lam_eff = lambda * c2;
  const Vector x0 = Vector::Zero(14);
  const double t0 = 1.0, t1 = fista_t_next(t0), t2 = fista_t_next(t1);
  const auto T = [&](const Vector& w) {
    return soft_threshold(w + c2 * (k.transpose() * (y - k * w)), lam_eff);
  };
  const Vector x1 = T(x0 + ((t0 - 1.0) / t1) * (x0 - x0));
  const Vector x2 = T(x1 + ((t1 - 1.0) / t2) * (x1 - x0));

  StopRule two;
  two.max_iterations = 2;
  two.stationarity_tol = 0.0;
  const SolverState sol = fista_solve(obj, PenaltyWeight(lambda), two);
  CHECK((sol.x - x2).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK((x2 - x1).norm() > 0.0);  // momentum actually moved the second step
}

TEST_CASE("fista beats ista at an equal matvec budget") {
  const GeneratedProblem prob = gen_gaussian_problem(40, 120, 8, 0.02, 29);
  const Objective obj(*prob.op, prob.y);
  const double lambda = lambda_max(*prob.op, prob.y) / 64.0;
  StopRule budget;
  budget.max_iterations = 0;
  budget.max_matvecs = 400;
  budget.stationarity_tol = 0.0;
  const SolverState slow = ista_solve(obj, PenaltyWeight(lambda), budget);
  const SolverState fast = fista_solve(obj, PenaltyWeight(lambda), budget);
  MatvecCounter mv;
  const double f_slow = obj.value(slow.x, mv) + 2.0 * lambda * slow.x.lpNorm<1>();
  const double f_fast = obj.value(fast.x, mv) + 2.0 * lambda * fast.x.lpNorm<1>();
  CHECK(f_fast <= f_slow);
}

TEST_CASE("psd: identity operator lands on the ball projection in one step") {
  const DenseOperator id(Matrix::Identity(2, 2));
  const Vector y = make_vec({3.0, 1.0});
  const L1Ball ball(1.0);
  const Objective obj(id, y);
  StopRule stop = tight_stop(50, 1e-12);
  const SolverState sol = psd_solve(obj, ball, stop);
  CHECK((sol.x - project_l1_ball(y, ball)).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(sol.iterations <= 3);
}

TEST_CASE("psd: zero residual start returns immediately") {
  const DenseOperator id(Matrix::Identity(2, 2));
  const Objective obj(id, make_vec({0.0, 0.0}));  // x=0 already the LS solution
  const SolverState sol = psd_solve(obj, L1Ball(5.0), tight_stop());
  CHECK(sol.iterations == 0);
  CHECK(sol.reason == StopReason::Stationary);
  CHECK(sol.x.lpNorm<1>() == 0.0);
}

TEST_CASE("psd: hand-computed exact line-search step on diag(1,2)") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const DenseOperator op(d);
  const Objective obj(op, make_vec({1.0, 1.0}));
  // r = Kᵀy = (1,2), Kr = (1,4), β = ‖r‖²/‖Kr‖² = 5/17
  double beta_seen = -1.0;
  StopRule one;
  one.max_iterations = 1;
  one.stationarity_tol = 0.0;
  psd_solve(obj, L1Ball(100.0), one,
            [&](const IterationRecord& rec, const Vector&) { beta_seen = rec.alpha; });
  CHECK(beta_seen == doctest::Approx(5.0 / 17.0).epsilon(1e-15));
}

TEST_CASE("psd iterates stay feasible") {
  const GeneratedProblem prob = gen_gaussian_problem(30, 80, 6, 0.02, 31);
  const Objective obj(*prob.op, prob.y);
  const double rho = 0.75 * prob.x_true.lpNorm<1>();
  bool feasible = true;
  StopRule stop = tight_stop(200, 1e-13);
  psd_solve(obj, L1Ball(rho), stop, [&](const IterationRecord&, const Vector& x) {
    feasible = feasible && x.lpNorm<1>() <= rho + 1e-10;
  });
  CHECK(feasible);
}

TEST_CASE("objective_tol stops on a flat relative objective change") {
  const GeneratedProblem prob = gen_gaussian_problem(10, 20, 3, 0.02, 43);
  const Objective obj(*prob.op, prob.y);
  StopRule stop;
  stop.max_iterations = 10000;
  stop.stationarity_tol = 0.0;
  stop.objective_tol = 1e-4;
  const SolverState sol = ista_solve(obj, PenaltyWeight(0.05), stop);
  CHECK(sol.reason == StopReason::ObjectiveTol);
  CHECK(sol.iterations < 10000);
}

TEST_CASE("matvec accounting: psd costs 3 per iteration") {
  const GeneratedProblem prob = gen_gaussian_problem(10, 20, 3, 0.02, 41);
  const Objective obj(*prob.op, prob.y);
  StopRule four;
  four.max_iterations = 4;
  four.stationarity_tol = 0.0;
  const SolverState sol = psd_solve(obj, L1Ball(1.0), four);
  CHECK(sol.iterations == 4);
  CHECK(sol.matvecs.count == 12);  // Kx, Kᵀ(y−Kx), Kr per iteration
}

TEST_CASE("stop rule validation and budget stop reasons") {
  StopRule none;
  none.max_iterations = 0;
  none.max_matvecs = 0;
  none.max_seconds = 0.0;
  CHECK_THROWS_AS(none.validate(), std::invalid_argument);

  const GeneratedProblem prob = gen_gaussian_problem(10, 20, 3, 0.02, 37);
  const Objective obj(*prob.op, prob.y);
  StopRule budget;
  budget.max_iterations = 0;
  budget.max_matvecs = 10;
  budget.stationarity_tol = 0.0;
  const SolverState sol = ista_solve(obj, PenaltyWeight(0.01), budget);
  CHECK(sol.reason == StopReason::MaxMatvecs);
  CHECK(sol.matvecs.count == 10);  // 2 matvecs per iteration, exact bookkeeping
  CHECK(sol.iterations == 5);
}
