#pragma once

#include <cstdint>
#include <memory>

#include "l1solve/linear_operator.hpp"
#include "l1solve/types.hpp"

namespace l1solve {

/// A synthetic recovery instance: data y = K x_true + e with sparse x_true.
/// The noise fraction is ‖e‖/‖Kx_true‖ (exact, not approximate); when
/// Kx_true = 0 (e.g. nnz = 0) the fraction is undefined and ‖e‖ equals
/// noise_level absolutely instead.
struct GeneratedProblem {
  std::shared_ptr<const DenseOperator> op;
  Vector y;
  Vector x_true;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

/// Dense Gaussian sensing matrix (i.i.d. zero-mean entries), rescaled so the
/// power-iteration spectral norm estimate equals 1. x_true has `nnz` spikes
/// of value ±1 at uniformly random positions. Throws if nnz > p.
GeneratedProblem gen_gaussian_problem(Index n, Index p, Index nnz, double noise_level,
                                      std::uint64_t seed);

/// Ill-conditioned operator K = U diag(σ) Vᵀ with σ_i = decay^(i-1) (so
/// σ_1 = 1) and U, V orthonormal factors drawn from QR of Gaussian matrices.
/// decay must lie strictly inside (0, 1); the condition number over the
/// min(n,p) retained singular values is decay^-(min(n,p)-1).
GeneratedProblem gen_illconditioned_problem(Index n, Index p, Index nnz, double decay,
                                            double noise_level, std::uint64_t seed);

}  // namespace l1solve
