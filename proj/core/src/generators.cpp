#include "l1solve/generators.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "l1solve/rng.hpp"

namespace l1solve {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // rejection sampling to avoid modulo bias; threshold = 2^64 mod bound
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

Vector Rng::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Matrix Rng::normal_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal();
  return m;
}

std::vector<Index> Rng::sample_indices(Index population, Index k) {
  if (k > population) throw std::invalid_argument("Rng::sample_indices: k > population");
  std::vector<Index> pool(static_cast<std::size_t>(population));
  for (Index i = 0; i < population; ++i) pool[static_cast<std::size_t>(i)] = i;
  // partial Fisher-Yates
  for (Index i = 0; i < k; ++i) {
    const Index j = i + static_cast<Index>(below(static_cast<std::uint64_t>(population - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

namespace {

Vector make_spikes(Rng& rng, Index p, Index nnz) {
  Vector x = Vector::Zero(p);
  const auto support = rng.sample_indices(p, nnz);
  for (const Index i : support) x[i] = rng.sign();
  return x;
}

// y = K x_true + e with ‖e‖/‖Kx_true‖ = noise_level; absolute scale when
// Kx_true = 0.
Vector make_data(Rng& rng, const DenseOperator& op, const Vector& x_true, double noise_level) {
  MatvecCounter scratch;
  Vector y = op.apply(x_true, scratch);
  if (noise_level == 0.0) return y;
  Vector e = rng.normal_vector(op.rows());
  const double e_norm = e.norm();
  if (e_norm == 0.0) return y;
  const double signal = y.norm();
  const double scale = (signal > 0.0 ? noise_level * signal : noise_level) / e_norm;
  y += scale * e;
  return y;
}

void check_common(Index n, Index p, Index nnz, double noise_level) {
  if (n < 1 || p < 1) throw std::invalid_argument("problem generator: n and p must be positive");
  if (nnz < 0 || nnz > p)
    throw std::invalid_argument("problem generator: nnz must lie in [0, p], got " +
                                std::to_string(nnz) + " with p = " + std::to_string(p));
  if (noise_level < 0.0)
    throw std::invalid_argument("problem generator: noise_level must be >= 0");
}

}  // namespace

GeneratedProblem gen_gaussian_problem(Index n, Index p, Index nnz, double noise_level,
                                      std::uint64_t seed) {
  check_common(n, p, nnz, noise_level);
  Rng rng(seed);
  Matrix k = rng.normal_matrix(n, p);
  {
    DenseOperator raw(k);
    const double sigma = spectral_norm_estimate(raw, 1000, 1e-8);
    if (sigma == 0.0) throw std::runtime_error("gen_gaussian_problem: degenerate matrix");
    k /= sigma;
  }
  GeneratedProblem prob;
  prob.op = std::make_shared<DenseOperator>(std::move(k));
  prob.x_true = make_spikes(rng, p, nnz);
  prob.y = make_data(rng, *prob.op, prob.x_true, noise_level);
  prob.noise_level = noise_level;
  prob.seed = seed;
  return prob;
}

GeneratedProblem gen_illconditioned_problem(Index n, Index p, Index nnz, double decay,
                                            double noise_level, std::uint64_t seed) {
  check_common(n, p, nnz, noise_level);
  if (!(decay > 0.0 && decay < 1.0))
    throw std::invalid_argument("gen_illconditioned_problem: decay must lie strictly in (0,1)");
  Rng rng(seed);
  const Index r = std::min(n, p);
  // Orthonormal factors from QR of Gaussian matrices; σ_i = decay^(i-1), σ_1 = 1.
  Matrix u = Eigen::HouseholderQR<Matrix>(rng.normal_matrix(n, r))
                 .householderQ() *
             Matrix::Identity(n, r);
  Matrix v = Eigen::HouseholderQR<Matrix>(rng.normal_matrix(p, r))
                 .householderQ() *
             Matrix::Identity(p, r);
  Vector sigma(r);
  double s = 1.0;
  for (Index i = 0; i < r; ++i, s *= decay) sigma[i] = s;
  Matrix k = u * sigma.asDiagonal() * v.transpose();

  GeneratedProblem prob;
  prob.op = std::make_shared<DenseOperator>(std::move(k));
  prob.x_true = make_spikes(rng, p, nnz);
  prob.y = make_data(rng, *prob.op, prob.x_true, noise_level);
  prob.noise_level = noise_level;
  prob.seed = seed;
  return prob;
}

}  // namespace l1solve
