#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "blockqn/bench.hpp"

namespace blockqn {

namespace {

RunTrace failed_run(const VectorXd& x0) {
  RunTrace tr;
  tr.termination = Termination::NonFinite;
  tr.f0 = kUnsolved;
  tr.f = kUnsolved;
  tr.gnorm0 = kUnsolved;
  tr.gnorm = kUnsolved;
  tr.x = x0;
  return tr;
}

RunTrace guarded_solve(const SuiteEntry& entry, const SolverConfig& cfg) {
  try {
    return solve(*entry.objective, entry.x0, cfg);
  } catch (const Error&) {
    return failed_run(entry.x0);
  }
}

double best_value(const RunTrace& tr) {
  double best = std::isnan(tr.f0) ? kUnsolved : tr.f0;
  for (const StepRecord& r : tr.steps)
    if (r.f < best) best = r.f;
  return best;
}

}  // namespace

GridResult run_grid(const std::vector<SuiteEntry>& suite, const std::vector<NamedSolver>& solvers,
                    const std::vector<double>& eps_list, CostMetric metric, int parallelism) {
  if (suite.empty() || solvers.empty()) throw Error(ErrorCode::EmptyInput, "run_grid: empty suite or solver list");
  if (eps_list.empty()) throw Error(ErrorCode::EmptyInput, "run_grid: no thresholds");
  for (double e : eps_list)
    if (!(e > 0.0)) throw Error(ErrorCode::InvalidArgument, "run_grid: thresholds must be positive");
  for (const NamedSolver& s : solvers) s.config.validate();

  const std::size_t np = suite.size(), ns = solvers.size(), jobs = np * ns;
  GridResult out;
  out.eps = eps_list;
  out.traces.assign(np, std::vector<RunTrace>(ns));

  std::size_t workers = parallelism < 1 ? 1 : static_cast<std::size_t>(parallelism);
  if (metric == CostMetric::CpuTime) {
    workers = 1;
    (void)guarded_solve(suite.front(), solvers.front().config);  // warm-up, discarded
  }
  workers = std::min(workers, jobs);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t p = j / ns, s = j % ns;
      out.traces[p][s] = guarded_solve(suite[p], solvers[s].config);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  out.best_f.assign(np, kUnsolved);
  for (std::size_t p = 0; p < np; ++p) {
    bool line_search_failed = false;
    for (std::size_t s = 0; s < ns; ++s) {
      out.best_f[p] = std::min(out.best_f[p], best_value(out.traces[p][s]));
      line_search_failed = line_search_failed || out.traces[p][s].termination == Termination::LineSearchFail;
    }
    if (suite[p].spec.type == "barrier" && line_search_failed) out.ill_conditioned.push_back(suite[p].spec.name);
  }

  for (double eps : eps_list) {
    CostMatrix cm;
    for (const NamedSolver& s : solvers) cm.solvers.push_back(s.name);
    for (const SuiteEntry& e : suite) cm.problems.push_back(e.spec.name);
    cm.t.resize(static_cast<Index>(np), static_cast<Index>(ns));
    for (std::size_t p = 0; p < np; ++p) {
      const bool solvable = std::isfinite(out.best_f[p]);
      const double threshold = solvable ? success_threshold(out.best_f[p], eps) : kUnsolved;
      for (std::size_t s = 0; s < ns; ++s) {
        cm.t(static_cast<Index>(p), static_cast<Index>(s)) =
            solvable ? trace_cost(out.traces[p][s], threshold, metric) : kUnsolved;
      }
    }
    out.costs.push_back(std::move(cm));
  }
  return out;
}

}  // namespace blockqn
