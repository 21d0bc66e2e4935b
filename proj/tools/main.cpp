// l1solve command-line tool: problem generation, single solves, isochrone
// campaigns and the built-in invariant suite.
//
// Exit codes: 0 success, 2 usage/validation error, 1 computation or I/O
// failure. Any run is reproducible from (config, seed); pass --timing off to
// make artifact files byte-identical across reruns.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "l1solve/generators.hpp"
#include "l1solve/gpss.hpp"
#include "l1solve/isochrone.hpp"
#include "l1solve/problem_io.hpp"
#include "l1solve/prox.hpp"
#include "l1solve/reference.hpp"
#include "l1solve/selfcheck.hpp"
#include "l1solve/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace l1solve;

namespace {

// ---------------------------------------------------------------------------
// shared option blocks

struct GenerateOpts {
  std::string family = "gaussian";
  long n = 0, p = 0, nnz = 0;
  double noise = 0.02;
  double decay = 0.97;
  std::uint64_t seed = 0;
  std::string out = "problem.l1prob";
};

struct SolveOpts {
  std::string problem;
  std::string solver;
  double lambda = -1.0;
  double rho = -1.0;
  double tol = 1e-9;
  long max_iters = 100000;
  std::int64_t max_matvecs = 0;
  double max_seconds = 0.0;
  GpConfig gp;
  std::string out = "solution.json";
  std::string telemetry;
  std::string timing = "wall";
  bool with_reference = false;
  double oracle_tol = 1e-12;
  long oracle_max_iters = 500000;
};

struct IsochroneOpts {
  std::string problem;
  std::vector<std::string> solvers = {"ista", "fista", "psd", "gpss"};
  int count = 50;
  double min_exp = 0.5;
  double max_exp = 16.0;
  std::vector<std::int64_t> budget_matvecs;
  std::vector<double> budget_seconds;
  int jobs = 1;
  std::string cache;
  std::string out = "isochrones.csv";
  std::string format = "csv";
  std::string timing = "wall";
  double oracle_tol = 1e-12;
  long oracle_max_iters = 500000;
  double stationarity_tol = 1e-14;
};

struct VerifyOpts {
  std::uint64_t seed = 7;
};

fs::path resolve(const std::string& out_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : fs::path(out_dir) / p;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const std::string& out_dir, const GenerateOpts& o) {
  GeneratedProblem prob;
  if (o.family == "gaussian") {
    prob = gen_gaussian_problem(o.n, o.p, o.nnz, o.noise, o.seed);
  } else if (o.family == "illcond") {
    prob = gen_illconditioned_problem(o.n, o.p, o.nnz, o.decay, o.noise, o.seed);
  } else {
    throw std::invalid_argument("unknown family '" + o.family +
                                "'; expected gaussian or illcond");
  }
  const fs::path path = resolve(out_dir, o.out);
  save_problem(prob, path);
  std::printf("wrote %s (family=%s n=%ld p=%ld nnz=%ld noise=%g seed=%llu)\n",
              path.string().c_str(), o.family.c_str(), o.n, o.p, o.nnz, o.noise,
              static_cast<unsigned long long>(o.seed));
  std::printf("lambda_max = %.17g\n", lambda_max(*prob.op, prob.y));
  std::printf("spectral_norm_estimate = %.17g\n", spectral_norm_estimate(*prob.op));
  return 0;
}

// ---------------------------------------------------------------------------
// solve

json record_to_json(const IterationRecord& rec, bool wall_time) {
  json j{{"k", rec.k},
         {"f", rec.f},
         {"stationarity", rec.stationarity},
         {"alpha", rec.alpha},
         {"step", rec.step},
         {"matvecs", rec.matvecs},
         {"elapsed", wall_time ? rec.elapsed_seconds : 0.0}};
  if (rec.bb_active) {
    j["bb1"] = rec.bb1_raw;
    j["bb2"] = rec.bb2_raw;
    j["tau_before"] = rec.tau_before;
    j["tau_after"] = rec.tau_after;
  }
  return j;
}

int cmd_solve(const std::string& out_dir, const SolveOpts& o) {
  const SolverId id = solver_from_string(o.solver);
  const bool constrained = id == SolverId::Psd || id == SolverId::Gpss;
  const bool has_lambda = o.lambda >= 0.0;
  const bool has_rho = o.rho >= 0.0;
  if (has_lambda == has_rho)
    throw std::invalid_argument("pass exactly one of --lambda or --rho");
  if (!constrained && has_rho)
    throw std::invalid_argument(o.solver +
                                " solves the penalized problem; pass --lambda (the constrained "
                                "solvers gpss and psd accept --rho)");

  StopRule stop;
  stop.max_iterations = o.max_iters;
  stop.max_matvecs = o.max_matvecs;
  stop.max_seconds = o.max_seconds;
  stop.stationarity_tol = o.tol;
  stop.validate();
  o.gp.validate();  // every numeric override is checked before any computation

  const GeneratedProblem prob = load_problem(o.problem);
  const Objective obj(*prob.op, prob.y);
  const bool wall_time = o.timing == "wall";

  // penalty → radius conversion for constrained solvers, via the oracle
  double rho = o.rho;
  std::optional<ReferenceSolution> ref;
  ReferenceOptions ropt;
  ropt.oracle_tol = o.oracle_tol;
  ropt.max_iterations = o.oracle_max_iters;
  if (constrained && has_lambda) {
    ref = reference_minimizer(obj, o.lambda, ropt);
    rho = ref->rho;
    std::printf("lambda %.17g -> rho %.17g via reference oracle (nnz %ld, certificate %.3g)\n",
                o.lambda, rho, ref->nnz, ref->certificate);
  } else if (o.with_reference && has_lambda) {
    ref = reference_minimizer(obj, o.lambda, ropt);
  }

  std::ofstream telemetry;
  if (!o.telemetry.empty()) {
    telemetry.open(resolve(out_dir, o.telemetry), std::ios::trunc);
    if (!telemetry)
      throw std::runtime_error("cannot open telemetry file " + o.telemetry);
  }
  const IterationCallback cb = [&](const IterationRecord& rec, const Vector&) {
    if (telemetry.is_open()) telemetry << record_to_json(rec, wall_time).dump() << '\n';
  };

  SolverState sol;
  switch (id) {
    case SolverId::Ista: sol = ista_solve(obj, PenaltyWeight(o.lambda), stop, cb); break;
    case SolverId::Fista: sol = fista_solve(obj, PenaltyWeight(o.lambda), stop, cb); break;
    case SolverId::Psd: sol = psd_solve(obj, L1Ball(rho), stop, cb); break;
    case SolverId::Gpss: sol = gpss_solve(obj, L1Ball(rho), o.gp, stop, cb); break;
  }

  MatvecCounter scratch;
  const double f = obj.value(sol.x, scratch);
  json out{{"solver", o.solver},
           {"f", f},
           {"stationarity", sol.stationarity},
           {"iterations", sol.iterations},
           {"matvecs", sol.matvecs.count},
           {"stop_reason", to_string(sol.reason)},
           {"elapsed_seconds", wall_time ? sol.elapsed_seconds : 0.0}};
  if (has_lambda) out["lambda"] = o.lambda;
  out["rho"] = constrained ? rho : sol.x.lpNorm<1>();
  if (ref && ref->rho > 0.0) {
    const double e = (sol.x - ref->x).norm() / ref->x.norm();
    out["rel_error_vs_reference"] = e;
  }
  std::vector<double> coeffs(sol.x.data(), sol.x.data() + sol.x.size());
  out["x"] = coeffs;

  const fs::path path = resolve(out_dir, o.out);
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open output file " + path.string());
  file << out.dump(2) << '\n';

  std::printf("solver=%s f=%.6e stationarity=%.3e iterations=%ld matvecs=%lld stop=%s\n",
              o.solver.c_str(), f, sol.stationarity, sol.iterations,
              static_cast<long long>(sol.matvecs.count), to_string(sol.reason).c_str());
  if (out.contains("rel_error_vs_reference"))
    std::printf("rel_error_vs_reference=%.3e\n", out["rel_error_vs_reference"].get<double>());
  if (wall_time) std::printf("elapsed=%.3fs\n", sol.elapsed_seconds);
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// isochrone campaign with an on-disk reference cache

constexpr std::array<char, 8> kRefMagic = {'L', '1', 'R', 'E', 'F', 'v', '1', '\0'};

void save_reference(const fs::path& path, std::uint64_t hash, const ReferenceSolution& ref) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write reference cache file " + path.string());
  out.write(kRefMagic.data(), kRefMagic.size());
  const auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<char*>(&v), 8); };
  const auto put_f64 = [&](double v) { out.write(reinterpret_cast<char*>(&v), 8); };
  put_u64(hash);
  put_f64(ref.lambda);
  put_f64(ref.rho);
  put_f64(ref.oracle_tol);
  put_f64(ref.certificate);
  put_u64(static_cast<std::uint64_t>(ref.nnz));
  put_u64(static_cast<std::uint64_t>(ref.x.size()));
  out.write(reinterpret_cast<const char*>(ref.x.data()),
            static_cast<std::streamsize>(8 * ref.x.size()));
  if (!out) throw std::runtime_error("short write to reference cache file " + path.string());
}

std::optional<ReferenceSolution> load_reference(const fs::path& path, std::uint64_t hash,
                                                double lambda) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;  // not cached yet
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  const auto get_u64 = [&] {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  const auto get_f64 = [&] {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  if (magic != kRefMagic)
    throw std::runtime_error("reference cache file " + path.string() +
                             " is not an L1REFv1 file; delete the cache directory");
  const std::uint64_t file_hash = get_u64();
  if (file_hash != hash)
    throw std::runtime_error(
        "reference cache " + path.string() + " was computed for a different problem (hash " +
        std::to_string(file_hash) + ", expected " + std::to_string(hash) +
        "); delete the cache directory or point --cache elsewhere");
  ReferenceSolution ref;
  ref.lambda = get_f64();
  if (ref.lambda != lambda)
    throw std::runtime_error("reference cache " + path.string() +
                             " was computed for a different lambda grid; delete the cache "
                             "directory or point --cache elsewhere");
  ref.rho = get_f64();
  ref.oracle_tol = get_f64();
  ref.certificate = get_f64();
  ref.nnz = static_cast<long>(get_u64());
  const auto p = static_cast<Index>(get_u64());
  ref.x.resize(p);
  in.read(reinterpret_cast<char*>(ref.x.data()), static_cast<std::streamsize>(8 * p));
  if (!in) throw std::runtime_error("truncated reference cache file " + path.string());
  return ref;
}

int cmd_isochrone(const std::string& out_dir, const IsochroneOpts& o) {
  if (o.budget_matvecs.empty() && o.budget_seconds.empty())
    throw std::invalid_argument("pass --budget-matvecs (and/or --budget-seconds)");
  std::vector<SolverId> solvers;
  for (const auto& name : o.solvers) solvers.push_back(solver_from_string(name));

  const GeneratedProblem prob = load_problem(o.problem);
  const Objective obj(*prob.op, prob.y);
  const LambdaGrid grid = build_grid(*prob.op, prob.y, o.count, o.min_exp, o.max_exp);

  ReferenceOptions ropt;
  ropt.oracle_tol = o.oracle_tol;
  ropt.max_iterations = o.oracle_max_iters;

  std::optional<fs::path> cache_dir;
  std::uint64_t hash = 0;
  if (!o.cache.empty()) {
    cache_dir = resolve(out_dir, o.cache);
    fs::create_directories(*cache_dir);
    hash = problem_hash(prob);
  }

  std::vector<ReferenceSolution> refs;
  refs.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lambda = grid.lambdas[i];
    std::optional<ReferenceSolution> ref;
    fs::path cache_file;
    if (cache_dir) {
      cache_file = *cache_dir / ("ref_" + std::to_string(i) + ".l1ref");
      ref = load_reference(cache_file, hash, lambda);
    }
    if (!ref) {
      ref = reference_minimizer(obj, lambda, ropt);
      if (cache_dir) save_reference(cache_file, hash, *ref);
    }
    std::fprintf(stderr, "reference %zu/%zu: lambda %.6g rho %.6g nnz %ld\n", i + 1,
                 grid.size(), lambda, ref->rho, ref->nnz);
    refs.push_back(std::move(*ref));
  }

  IsochroneOptions run;
  run.budget_matvecs = o.budget_matvecs;
  run.budget_seconds = o.budget_seconds;
  run.jobs = o.jobs;
  run.stationarity_tol = o.stationarity_tol;
  run.record_wall_time = o.timing == "wall";
  const auto records = run_isochrones(obj, grid, solvers, refs, run);

  const fs::path path = resolve(out_dir, o.out);
  emit_isochrone_table(records, o.format == "json" ? TableFormat::Json : TableFormat::Csv, path);
  std::printf("wrote %zu records to %s\n", records.size(), path.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const VerifyOpts& o) {
  const auto results = run_selfchecks(o.seed);
  bool all_pass = true;
  for (const auto& res : results) {
    std::printf("[%s] %-28s worst %.3e  tolerance %.1e  margin %.2gx%s%s\n",
                res.pass ? "PASS" : "FAIL", res.name.c_str(), res.worst, res.tolerance,
                res.margin, res.detail.empty() ? "" : "  ", res.detail.c_str());
    all_pass = all_pass && res.pass;
  }
  std::printf(all_pass ? "verify: all invariants hold\n" : "verify: FAILURES detected\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l1solve: sparse recovery solvers and approximation-isochrone benchmarking"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file (flags win)");
  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "directory for output artifacts")
      ->envname("L1SOLVE_OUT_DIR")
      ->capture_default_str();

  GenerateOpts gen;
  auto* cgen = app.add_subcommand("generate", "generate a synthetic problem file");
  cgen->add_option("--family", gen.family, "gaussian | illcond")->capture_default_str();
  cgen->add_option("--n", gen.n, "data dimension (rows)")->required();
  cgen->add_option("--p", gen.p, "coefficient dimension (columns)")->required();
  cgen->add_option("--nnz", gen.nnz, "number of spikes in the true coefficients")->required();
  cgen->add_option("--noise", gen.noise, "noise fraction ‖e‖/‖Kx‖")->capture_default_str();
  cgen->add_option("--decay", gen.decay, "singular value decay (illcond only)")
      ->capture_default_str();
  cgen->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  cgen->add_option("--out", gen.out, "output problem file")->capture_default_str();

  SolveOpts sol;
  auto* csol = app.add_subcommand("solve", "run one solver on one problem");
  csol->add_option("--problem", sol.problem, "problem file from `generate`")->required();
  csol->add_option("--solver", sol.solver, "ista | fista | psd | gpss")->required();
  csol->add_option("--lambda", sol.lambda, "penalty weight (penalized form)");
  csol->add_option("--rho", sol.rho, "l1-ball radius (constrained form)");
  csol->add_option("--tol", sol.tol, "stationarity tolerance")->capture_default_str();
  csol->add_option("--max-iters", sol.max_iters)->capture_default_str();
  csol->add_option("--max-matvecs", sol.max_matvecs)->capture_default_str();
  csol->add_option("--max-seconds", sol.max_seconds)->capture_default_str();
  csol->add_option("--beta", sol.gp.beta, "Armijo slope")->capture_default_str();
  csol->add_option("--theta", sol.gp.theta, "backtracking shrink")->capture_default_str();
  csol->add_option("--memory", sol.gp.memory, "nonmonotone window M")->capture_default_str();
  csol->add_option("--alpha-min", sol.gp.alpha_min)->capture_default_str();
  csol->add_option("--alpha-max", sol.gp.alpha_max)->capture_default_str();
  csol->add_option("--tau1", sol.gp.tau1, "initial alternation threshold")
      ->capture_default_str();
  csol->add_option("--alpha2-memory", sol.gp.alpha2_memory, "BB2 history depth M_alpha")
      ->capture_default_str();
  csol->add_option("--out", sol.out, "solution JSON file")->capture_default_str();
  csol->add_option("--telemetry", sol.telemetry, "per-iteration NDJSON file");
  csol->add_option("--timing", sol.timing, "wall | off (off: reproducible artifact bytes)")
      ->check(CLI::IsMember({"wall", "off"}))
      ->capture_default_str();
  csol->add_flag("--with-reference", sol.with_reference,
                 "also compute the reference minimizer and report the relative error");
  csol->add_option("--oracle-tol", sol.oracle_tol)->capture_default_str();
  csol->add_option("--oracle-max-iters", sol.oracle_max_iters)->capture_default_str();

  IsochroneOpts iso;
  auto* ciso = app.add_subcommand("isochrone", "run a budget-ladder campaign over a lambda grid");
  ciso->add_option("--problem", iso.problem, "problem file from `generate`")->required();
  ciso->add_option("--solvers", iso.solvers, "subset of {ista,fista,psd,gpss}")
      ->delimiter(',')
      ->capture_default_str();
  ciso->add_option("--count", iso.count, "grid size")->capture_default_str();
  ciso->add_option("--min-exp", iso.min_exp, "smallest log2(lambda_max/lambda)")
      ->capture_default_str();
  ciso->add_option("--max-exp", iso.max_exp, "largest log2(lambda_max/lambda)")
      ->capture_default_str();
  ciso->add_option("--budget-matvecs", iso.budget_matvecs, "matvec budget ladder")
      ->delimiter(',');
  ciso->add_option("--budget-seconds", iso.budget_seconds, "wall-clock budget ladder")
      ->delimiter(',');
  ciso->add_option("--jobs", iso.jobs, "parallel grid-point workers")->capture_default_str();
  ciso->add_option("--cache", iso.cache, "reference cache directory (resumable)");
  ciso->add_option("--out", iso.out, "output table path")->capture_default_str();
  ciso->add_option("--format", iso.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  ciso->add_option("--timing", iso.timing, "wall | off")
      ->check(CLI::IsMember({"wall", "off"}))
      ->capture_default_str();
  ciso->add_option("--oracle-tol", iso.oracle_tol)->capture_default_str();
  ciso->add_option("--oracle-max-iters", iso.oracle_max_iters)->capture_default_str();
  ciso->add_option("--stationarity-tol", iso.stationarity_tol)->capture_default_str();

  VerifyOpts ver;
  auto* cver = app.add_subcommand("verify", "run the built-in invariant suite");
  cver->add_option("--seed", ver.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cgen->parsed()) return cmd_generate(out_dir, gen);
    if (csol->parsed()) return cmd_solve(out_dir, sol);
    if (ciso->parsed()) return cmd_isochrone(out_dir, iso);
    if (cver->parsed()) return cmd_verify(ver);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
