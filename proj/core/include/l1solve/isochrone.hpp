#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "l1solve/gpss.hpp"
#include "l1solve/reference.hpp"
#include "l1solve/solver.hpp"

namespace l1solve {

enum class SolverId { Ista, Fista, Psd, Gpss };
std::string to_string(SolverId id);
/// Throws std::invalid_argument listing {ista, fista, psd, gpss} on unknown names.
SolverId solver_from_string(const std::string& name);

/// Geometric λ grid: λ_i = λ_max · 2^(−e_i) for equally spaced exponents
/// e_i in [min_exp, max_exp] (strictly increasing, so λ strictly decreasing).
struct LambdaGrid {
  double lambda_max = 0.0;
  std::vector<double> exponents;
  std::vector<double> lambdas;
  std::size_t size() const { return lambdas.size(); }
};

/// Builds the grid from the data; count ≥ 2, max_exp > min_exp, and the
/// problem must have λ_max > 0 (zero data is rejected).
LambdaGrid build_grid(const LinearOperator& op, const Vector& y, int count = 50,
                      double min_exp = 0.5, double max_exp = 16.0);

/// One point of an approximation-isochrone dataset: the relative error
/// e = ‖x − x̄(λ)‖/‖x̄(λ)‖ a solver reached within a compute budget.
struct IsochroneRecord {
  SolverId solver = SolverId::Ista;
  int lambda_index = 0;
  double exponent = 0.0;
  double lambda = 0.0;
  double rho = 0.0;
  long nnz = 0;
  std::int64_t budget_matvecs = 0;
  double budget_seconds = 0.0;
  double rel_error = 0.0;
  std::int64_t matvecs_used = 0;
  double seconds_used = 0.0;
};

struct IsochroneOptions {
  std::vector<std::int64_t> budget_matvecs;  // primary, machine-independent ladder
  std::vector<double> budget_seconds;        // optional wall-clock ladder
  GpConfig gp;
  double stationarity_tol = 1e-14;  // numerical-floor stop inside budgeted runs
  int jobs = 1;
  bool record_wall_time = true;  // false → measured seconds reported as 0 (reproducible bytes)
};

/// Runs every (solver, grid point, budget) cell. Constrained solvers receive
/// ρ_i = ‖x̄(λ_i)‖₁, penalized solvers receive λ_i. References must be
/// supplied for every grid point (run once, sample every budget level from
/// the same deterministic trajectory). Grid points whose reference is the
/// zero vector are skipped — the relative error is undefined there. Records
/// are ordered by (solver, grid point, budget) regardless of --jobs.
std::vector<IsochroneRecord> run_isochrones(const Objective& prob, const LambdaGrid& grid,
                                            const std::vector<SolverId>& solvers,
                                            const std::vector<ReferenceSolution>& refs,
                                            const IsochroneOptions& opt);

enum class TableFormat { Csv, Json };

/// Serializes records with the fixed header (solver, exponent, lambda, rho,
/// nnz, budget_matvecs, budget_seconds, rel_error, matvecs, seconds); floats
/// carry 17 significant digits so parsing round-trips exactly. The JSON
/// mirror uses identical field names. Row order is the record order.
void emit_isochrone_table(const std::vector<IsochroneRecord>& records, TableFormat format,
                          std::ostream& out);
void emit_isochrone_table(const std::vector<IsochroneRecord>& records, TableFormat format,
                          const std::filesystem::path& path);

}  // namespace l1solve
