// Microbenchmarks for the solver kernels: projection, thresholding, dense
// matvecs and one full gradient-projection iteration.

#include <benchmark/benchmark.h>

#include "l1solve/generators.hpp"
#include "l1solve/gpss.hpp"
#include "l1solve/prox.hpp"
#include "l1solve/rng.hpp"
#include "l1solve/solver.hpp"

using namespace l1solve;

namespace {

void BM_ProjectL1Ball(benchmark::State& state) {
  Rng rng(1);
  const Index p = state.range(0);
  const Vector x = rng.normal_vector(p);
  const L1Ball ball(0.1 * x.lpNorm<1>());
  for (auto _ : state) {
    Vector u = project_l1_ball(x, ball);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetComplexityN(p);
}
BENCHMARK(BM_ProjectL1Ball)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_SoftThreshold(benchmark::State& state) {
  Rng rng(2);
  const Index p = state.range(0);
  const Vector x = rng.normal_vector(p);
  for (auto _ : state) {
    Vector u = soft_threshold(x, 0.3);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetComplexityN(p);
}
BENCHMARK(BM_SoftThreshold)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_DenseMatvec(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(3);
  const DenseOperator op(rng.normal_matrix(n, 4 * n));
  const Vector x = rng.normal_vector(4 * n);
  MatvecCounter mv;
  for (auto _ : state) {
    Vector y = op.apply(x, mv);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_DenseMatvec)->RangeMultiplier(2)->Range(64, 512);

void BM_GpIteration(benchmark::State& state) {
  const GeneratedProblem prob = gen_gaussian_problem(128, 512, 16, 0.02, 4);
  const Objective obj(*prob.op, prob.y);
  const L1Ball ball(prob.x_true.lpNorm<1>());
  const GpConfig cfg;
  MatvecCounter mv;
  GpIterationState st = gp_init(obj, ball, Vector(), cfg, mv);
  SteplengthState sls = steplength_init(cfg);
  for (auto _ : state) {
    gp_iterate(obj, ball, cfg, st, sls, mv, 0.0);
    if (st.stationary) {  // restart so the loop keeps doing real work
      st = gp_init(obj, ball, Vector(), cfg, mv);
      sls = steplength_init(cfg);
    }
  }
}
BENCHMARK(BM_GpIteration);

void BM_SpectralNormEstimate(benchmark::State& state) {
  Rng rng(5);
  const DenseOperator op(rng.normal_matrix(128, 512));
  for (auto _ : state) {
    const double sigma = spectral_norm_estimate(op, 1000, 1e-8);
    benchmark::DoNotOptimize(sigma);
  }
}
BENCHMARK(BM_SpectralNormEstimate);

}  // namespace

BENCHMARK_MAIN();
