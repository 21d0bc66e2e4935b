#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "l1solve/prox.hpp"
#include "l1solve/types.hpp"

namespace l1solve {

/// Result of one built-in invariant check. margin is the headroom factor
/// tolerance / worst-observed-violation (larger is safer; < 1 fails).
struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

using ProjectionFn = std::function<Vector(const Vector&, const L1Ball&)>;

CheckResult check_adjoint_identity(std::uint64_t seed);
/// KKT optimality of the ℓ1 projection on random inputs. The projection
/// under test is injectable so a deliberately broken one can be shown to
/// fail (negative control in the tests).
CheckResult check_projection_kkt(std::uint64_t seed, const ProjectionFn& projection);
CheckResult check_projection_kkt(std::uint64_t seed);
CheckResult check_gradient_finite_difference(std::uint64_t seed);
CheckResult check_bb_ordering(std::uint64_t seed);
CheckResult check_descent_monotonic(std::uint64_t seed);
CheckResult check_lambda_rho_roundtrip(std::uint64_t seed);

/// Runs the full suite in a fixed order.
std::vector<CheckResult> run_selfchecks(std::uint64_t seed = 7);

}  // namespace l1solve
