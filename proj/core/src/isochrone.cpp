#include "l1solve/isochrone.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace l1solve {

std::string to_string(SolverId id) {
  switch (id) {
    case SolverId::Ista: return "ista";
    case SolverId::Fista: return "fista";
    case SolverId::Psd: return "psd";
    case SolverId::Gpss: return "gpss";
  }
  return "unknown";
}

SolverId solver_from_string(const std::string& name) {
  if (name == "ista") return SolverId::Ista;
  if (name == "fista") return SolverId::Fista;
  if (name == "psd") return SolverId::Psd;
  if (name == "gpss") return SolverId::Gpss;
  throw std::invalid_argument("unknown solver '" + name + "'; expected one of {ista, fista, psd, gpss}");
}

LambdaGrid build_grid(const LinearOperator& op, const Vector& y, int count, double min_exp,
                      double max_exp) {
  if (count < 2) throw std::invalid_argument("build_grid: count must be >= 2");
  if (!(max_exp > min_exp)) throw std::invalid_argument("build_grid: need max_exp > min_exp");
  LambdaGrid grid;
  grid.lambda_max = lambda_max(op, y);
  if (grid.lambda_max == 0.0)
    throw std::invalid_argument("build_grid: lambda_max is zero (zero data)");
  grid.exponents.resize(static_cast<std::size_t>(count));
  grid.lambdas.resize(static_cast<std::size_t>(count));
  const double step = (max_exp - min_exp) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) {
    const double e = min_exp + step * i;
    grid.exponents[static_cast<std::size_t>(i)] = e;
    grid.lambdas[static_cast<std::size_t>(i)] = grid.lambda_max * std::exp2(-e);
  }
  return grid;
}

namespace {

// One (matvec count, error, seconds) checkpoint along a solver trajectory.
struct Sample {
  std::int64_t matvecs = 0;
  double rel_error = 0.0;
  double seconds = 0.0;
};

std::vector<Sample> trace_run(SolverId id, const Objective& prob, double lambda, double rho,
                              const Vector& x_ref, const IsochroneOptions& opt,
                              std::int64_t matvec_cap, double seconds_cap) {
  const double ref_norm = x_ref.norm();
  std::vector<Sample> samples;
  // budget 0: the zero starting point, no operator applications spent
  samples.push_back({0, (Vector::Zero(prob.dim()) - x_ref).norm() / ref_norm, 0.0});

  const auto cb = [&](const IterationRecord& rec, const Vector& x) {
    samples.push_back({rec.matvecs, (x - x_ref).norm() / ref_norm,
                       opt.record_wall_time ? rec.elapsed_seconds : 0.0});
  };

  StopRule stop;
  stop.max_iterations = 0;
  stop.max_matvecs = matvec_cap;
  stop.max_seconds = seconds_cap;
  stop.stationarity_tol = opt.stationarity_tol;

  switch (id) {
    case SolverId::Ista: ista_solve(prob, PenaltyWeight(lambda), stop, cb); break;
    case SolverId::Fista: fista_solve(prob, PenaltyWeight(lambda), stop, cb); break;
    case SolverId::Psd: psd_solve(prob, L1Ball(rho), stop, cb); break;
    case SolverId::Gpss: gpss_solve(prob, L1Ball(rho), opt.gp, stop, cb); break;
  }
  return samples;
}

const Sample& sample_at_matvec_budget(const std::vector<Sample>& samples, std::int64_t budget) {
  const Sample* best = &samples.front();
  for (const Sample& s : samples) {
    if (s.matvecs <= budget) best = &s;
    else break;
  }
  return *best;
}

const Sample& sample_at_time_budget(const std::vector<Sample>& samples, double budget) {
  const Sample* best = &samples.front();
  for (const Sample& s : samples) {
    if (s.seconds <= budget) best = &s;
    else break;
  }
  return *best;
}

}  // namespace

std::vector<IsochroneRecord> run_isochrones(const Objective& prob, const LambdaGrid& grid,
                                            const std::vector<SolverId>& solvers,
                                            const std::vector<ReferenceSolution>& refs,
                                            const IsochroneOptions& opt) {
  if (refs.size() != grid.size())
    throw std::invalid_argument("run_isochrones: need one reference per grid point (got " +
                                std::to_string(refs.size()) + " for " +
                                std::to_string(grid.size()) + " points)");
  if (opt.budget_matvecs.empty() && opt.budget_seconds.empty())
    throw std::invalid_argument("run_isochrones: no budgets given");

  auto budgets_mv = opt.budget_matvecs;
  std::sort(budgets_mv.begin(), budgets_mv.end());
  auto budgets_s = opt.budget_seconds;
  std::sort(budgets_s.begin(), budgets_s.end());
  const std::int64_t matvec_cap = budgets_mv.empty() ? 0 : budgets_mv.back();
  const double seconds_cap = budgets_s.empty() ? 0.0 : budgets_s.back();

  struct Task {
    SolverId solver;
    int grid_index;
  };
  std::vector<Task> tasks;
  for (const SolverId id : solvers)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (refs[i].rho == 0.0) continue;  // e undefined against the zero reference
      tasks.push_back({id, static_cast<int>(i)});
    }

  std::vector<std::vector<IsochroneRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (;;) {
      const std::size_t ti = next.fetch_add(1);
      if (ti >= tasks.size()) return;
      const Task& task = tasks[ti];
      const auto gi = static_cast<std::size_t>(task.grid_index);
      const ReferenceSolution& ref = refs[gi];
      const auto samples =
          trace_run(task.solver, prob, grid.lambdas[gi], ref.rho, ref.x, opt, matvec_cap,
                    seconds_cap);
      auto& out = slots[ti];
      IsochroneRecord base;
      base.solver = task.solver;
      base.lambda_index = task.grid_index;
      base.exponent = grid.exponents[gi];
      base.lambda = grid.lambdas[gi];
      base.rho = ref.rho;
      base.nnz = ref.nnz;
      for (const std::int64_t b : budgets_mv) {
        const Sample& s = sample_at_matvec_budget(samples, b);
        IsochroneRecord rec = base;
        rec.budget_matvecs = b;
        rec.rel_error = s.rel_error;
        rec.matvecs_used = s.matvecs;
        rec.seconds_used = s.seconds;
        out.push_back(rec);
      }
      for (const double b : budgets_s) {
        const Sample& s = sample_at_time_budget(samples, b);
        IsochroneRecord rec = base;
        rec.budget_seconds = b;
        rec.rel_error = s.rel_error;
        rec.matvecs_used = s.matvecs;
        rec.seconds_used = s.seconds;
        out.push_back(rec);
      }
    }
  };

  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // deterministic merge: slot order is (solver, grid point), budgets inside
  std::vector<IsochroneRecord> records;
  for (const auto& slot : slots) records.insert(records.end(), slot.begin(), slot.end());
  return records;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_isochrone_table(const std::vector<IsochroneRecord>& records, TableFormat format,
                          std::ostream& out) {
  if (records.empty()) throw std::invalid_argument("emit_isochrone_table: no records");
  if (format == TableFormat::Csv) {
    out << "solver,exponent,lambda,rho,nnz,budget_matvecs,budget_seconds,rel_error,matvecs,seconds\n";
    for (const auto& r : records) {
      out << to_string(r.solver) << ',' << fmt17(r.exponent) << ',' << fmt17(r.lambda) << ','
          << fmt17(r.rho) << ',' << r.nnz << ',' << r.budget_matvecs << ','
          << fmt17(r.budget_seconds) << ',' << fmt17(r.rel_error) << ',' << r.matvecs_used << ','
          << fmt17(r.seconds_used) << '\n';
    }
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : records) {
      rows.push_back({{"solver", to_string(r.solver)},
                      {"exponent", r.exponent},
                      {"lambda", r.lambda},
                      {"rho", r.rho},
                      {"nnz", r.nnz},
                      {"budget_matvecs", r.budget_matvecs},
                      {"budget_seconds", r.budget_seconds},
                      {"rel_error", r.rel_error},
                      {"matvecs", r.matvecs_used},
                      {"seconds", r.seconds_used}});
    }
    out << rows.dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("emit_isochrone_table: stream write failed");
}

void emit_isochrone_table(const std::vector<IsochroneRecord>& records, TableFormat format,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_isochrone_table: cannot open " + path.string());
  emit_isochrone_table(records, format, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_isochrone_table: short write to " + path.string());
}

}  // namespace l1solve
