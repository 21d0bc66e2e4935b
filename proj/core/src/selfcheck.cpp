#include "l1solve/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l1solve/generators.hpp"
#include "l1solve/gpss.hpp"
#include "l1solve/reference.hpp"
#include "l1solve/rng.hpp"
#include "l1solve/solver.hpp"

namespace l1solve {

namespace {

CheckResult finish(std::string name, double worst, double tol, std::string detail = {}) {
  CheckResult res;
  res.name = std::move(name);
  res.worst = worst;
  res.tolerance = tol;
  res.pass = worst <= tol;
  res.margin = worst > 0.0 ? tol / worst : std::numeric_limits<double>::infinity();
  res.detail = std::move(detail);
  return res;
}

}  // namespace

CheckResult check_adjoint_identity(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 4; ++rep) {
    const Index n = 5 + 7 * rep;
    const Index p = 8 + 11 * rep;
    const DenseOperator op(rng.normal_matrix(n, p));
    MatvecCounter mv;
    for (int i = 0; i < 100; ++i) {
      const Vector u = rng.normal_vector(p);
      const Vector v = rng.normal_vector(n);
      const double lhs = op.apply(u, mv).dot(v);
      const double rhs = u.dot(op.apply_adjoint(v, mv));
      const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  return finish("adjoint-identity", worst, 1e-10);
}

CheckResult check_projection_kkt(std::uint64_t seed, const ProjectionFn& projection) {
  Rng rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Index p = 2 + static_cast<Index>(rng.below(49));
    const Vector x = 3.0 * rng.normal_vector(p);
    const double rho = 0.1 + 2.0 * rng.uniform() * std::sqrt(static_cast<double>(p));
    const L1Ball ball(rho);
    const Vector u = projection(x, ball);

    // feasibility
    worst = std::max(worst, u.lpNorm<1>() - rho);
    if (x.lpNorm<1>() <= rho) {
      worst = std::max(worst, (u - x).lpNorm<Eigen::Infinity>());
      continue;
    }
    // single-threshold optimality: |x_i| − |u_i| = θ on the support,
    // |x_i| ≤ θ off the support, sign preserved
    double theta_sum = 0.0;
    long support = 0;
    for (Index i = 0; i < p; ++i) {
      if (u[i] != 0.0) {
        theta_sum += std::abs(x[i]) - std::abs(u[i]);
        ++support;
        if (x[i] * u[i] < 0.0) worst = std::max(worst, std::abs(u[i]));
      }
    }
    if (support == 0) continue;
    const double theta = theta_sum / static_cast<double>(support);
    worst = std::max(worst, -theta);
    for (Index i = 0; i < p; ++i) {
      if (u[i] != 0.0)
        worst = std::max(worst, std::abs(std::abs(x[i]) - std::abs(u[i]) - theta));
      else
        worst = std::max(worst, std::abs(x[i]) - theta);
    }
  }
  return finish("projection-kkt", worst, 1e-10);
}

CheckResult check_projection_kkt(std::uint64_t seed) {
  return check_projection_kkt(
      seed, [](const Vector& x, const L1Ball& ball) { return project_l1_ball(x, ball); });
}

CheckResult check_gradient_finite_difference(std::uint64_t seed) {
  Rng rng(seed);
  const double h = 1e-6;
  double worst = 0.0;
  const GeneratedProblem prob = gen_gaussian_problem(10, 30, 5, 0.02, seed);
  const Objective obj(*prob.op, prob.y);
  MatvecCounter mv;
  for (int rep = 0; rep < 20; ++rep) {
    const Vector x = rng.normal_vector(30);
    Vector grad;
    obj.value_and_gradient(x, grad, mv);
    Vector fd(30);
    for (Index i = 0; i < 30; ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd[i] = (obj.value(xp, mv) - obj.value(xm, mv)) / (2.0 * h);
    }
    const double scale = std::max(1.0, grad.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (fd - grad).lpNorm<Eigen::Infinity>() / scale);
  }
  return finish("gradient-finite-difference", worst, 1e-5);
}

namespace {

// GPSS run on a seeded Gaussian instance, returning collected telemetry.
std::vector<IterationRecord> telemetry_run(std::uint64_t seed, int memory = 1) {
  const GeneratedProblem prob = gen_gaussian_problem(40, 160, 8, 0.02, seed);
  const Objective obj(*prob.op, prob.y);
  const double lmax = lambda_max(*prob.op, prob.y);
  const ReferenceOptions ropt{1e-10, 200000, 50, 1e-10};
  const ReferenceSolution ref = reference_minimizer(obj, lmax / 64.0, ropt);
  GpConfig cfg;
  cfg.memory = memory;
  StopRule stop;
  stop.max_iterations = 2000;
  stop.stationarity_tol = 1e-11;
  std::vector<IterationRecord> records;
  gpss_solve(obj, L1Ball(ref.rho), cfg, stop,
             [&](const IterationRecord& rec, const Vector&) { records.push_back(rec); });
  return records;
}

}  // namespace

CheckResult check_bb_ordering(std::uint64_t seed) {
  const auto records = telemetry_run(seed);
  double worst = 0.0;
  long active = 0;
  for (const auto& rec : records) {
    if (!rec.bb_active) continue;
    ++active;
    // Cauchy-Schwarz: sᵀz/zᵀz ≤ sᵀs/sᵀz when sᵀz > 0
    worst = std::max(worst, (rec.bb2_raw - rec.bb1_raw) / std::max(rec.bb1_raw, 1e-300));
  }
  return finish("bb-ordering", worst, 1e-12,
                std::to_string(active) + " BB-active iterations of " +
                    std::to_string(records.size()));
}

CheckResult check_descent_monotonic(std::uint64_t seed) {
  const auto records = telemetry_run(seed, 1);
  double worst = 0.0;
  double f_prev = std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    if (std::isfinite(f_prev))
      worst = std::max(worst, (rec.f - f_prev) / std::max(1.0, std::abs(f_prev)));
    f_prev = rec.f;
  }
  return finish("descent-monotonic", worst, 1e-12,
                std::to_string(records.size()) + " iterations, M = 1");
}

CheckResult check_lambda_rho_roundtrip(std::uint64_t seed) {
  const GeneratedProblem prob = gen_gaussian_problem(40, 160, 8, 0.02, seed);
  const Objective obj(*prob.op, prob.y);
  const double lambda0 = lambda_max(*prob.op, prob.y) / 8.0;
  const ReferenceSolution ref = reference_minimizer(obj, lambda0);
  StopRule stop;
  stop.max_iterations = 20000;
  stop.stationarity_tol = 1e-12;
  const SolverState sol = gpss_solve(obj, L1Ball(ref.rho), GpConfig{}, stop);
  const double lambda_rec = lambda_from_rho(*prob.op, prob.y, sol.x);
  const double worst = std::abs(lambda_rec - lambda0) / lambda0;
  return finish("lambda-rho-roundtrip", worst, 1e-3);
}

std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
  return {check_adjoint_identity(seed),          check_projection_kkt(seed),
          check_gradient_finite_difference(seed), check_bb_ordering(seed),
          check_descent_monotonic(seed),          check_lambda_rho_roundtrip(seed)};
}

}  // namespace l1solve
