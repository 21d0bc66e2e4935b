#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "l1solve/types.hpp"

namespace l1solve {

/// Seeded random stream with a fixed bit-level mapping from engine output
/// to doubles, so generated problems are reproducible across standard
/// library implementations (std::*_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double normal();

  /// Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);

  /// +1 or -1 with equal probability.
  double sign() { return (engine_() & 1u) ? 1.0 : -1.0; }

  Vector normal_vector(Index n);
  Matrix normal_matrix(Index rows, Index cols);  // filled row by row

  /// k distinct indices drawn uniformly from {0, ..., population-1}.
  std::vector<Index> sample_indices(Index population, Index k);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace l1solve
