#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include <json.hpp>

#include "blockqn/bench.hpp"

namespace blockqn {

using nlohmann::json;

namespace {

std::string safe_name(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text << '\n';
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void run_command(const RunOptions& options) {
  if (options.out.empty()) throw Error(ErrorCode::InvalidArgument, "run: an output directory is required");
  const std::vector<ProblemSpec> manifest =
      options.suite.empty() ? default_manifest(options.seed) : read_manifest(options.suite);
  const std::vector<NamedSolver> solvers =
      options.solvers.empty() ? default_solvers() : read_solver_configs(options.solvers);
  const std::vector<SuiteEntry> suite = build_suite(manifest);

  const GridResult grid = run_grid(suite, solvers, options.eps, options.metric, options.parallel);
  std::filesystem::create_directories(options.out);

  json dropped = json::object();
  std::size_t tightest = 0;
  for (std::size_t i = 0; i < grid.eps.size(); ++i) {
    if (grid.eps[i] < grid.eps[tightest]) tightest = i;
    const std::string tag = format_eps(grid.eps[i]);
    const CostMatrix costs = exclude_problems(grid.costs[i], grid.ill_conditioned);
    write_costs_csv(costs, options.out / ("costs_" + tag + ".csv"));
    const CostMatrix kept = drop_unsolved(costs);
    dropped[tag] = kept.dropped;
    if (kept.problems.empty()) continue;
    const auto curves = performance_profile(kept);
    write_profile_csv(curves, options.out / ("profile_" + tag + ".csv"));
    write_profile_svg(curves, "eps = " + tag, options.out / ("profile_" + tag + ".svg"));
  }
  write_costs_csv(exclude_problems(grid.costs[tightest], grid.ill_conditioned), options.out / "costs.csv");

  if (options.write_traces) {
    const auto dir = options.out / "traces";
    std::filesystem::create_directories(dir);
    for (std::size_t p = 0; p < suite.size(); ++p) {
      for (std::size_t s = 0; s < solvers.size(); ++s) {
        const std::string stem = safe_name(suite[p].spec.name) + "__" + safe_name(solvers[s].name);
        write_trace_csv(grid.traces[p][s], dir / (stem + ".csv"));
        write_text(dir / (stem + ".json"), trace_summary_json(grid.traces[p][s]));
      }
    }
  }

  json problems = json::array();
  for (std::size_t p = 0; p < suite.size(); ++p) {
    problems.push_back({{"name", suite[p].spec.name}, {"best_f", number_or_null(grid.best_f[p])}});
  }
  std::vector<ProblemSpec> specs;
  for (const auto& e : suite) specs.push_back(e.spec);
  const auto suite_path = options.out / "suite_manifest.json";
  write_manifest(specs, options.seed, suite_path);

  const json run = {{"seed", options.seed},
                    {"metric", options.metric == CostMetric::Steps ? "steps" : "cpu"},
                    {"eps", grid.eps},
                    {"suite_source", options.suite.empty() ? "default" : options.suite.string()},
                    {"suite", json::parse(std::ifstream(suite_path))},
                    {"solvers", json::parse(solver_configs_json(solvers))},
                    {"problems", problems},
                    {"ill_conditioned", grid.ill_conditioned},
                    {"dropped", dropped}};
  write_text(options.out / "run_manifest.json", run.dump(2));
}

void profile_command(const std::filesystem::path& costs_csv, const std::filesystem::path& out) {
  const CostMatrix kept = drop_unsolved(read_costs_csv(costs_csv));
  if (kept.problems.empty()) throw Error(ErrorCode::EmptyInput, "profile: no problem was solved by any solver");
  const auto curves = performance_profile(kept);
  std::filesystem::create_directories(out);
  write_profile_csv(curves, out / "profile.csv");
  write_profile_svg(curves, costs_csv.stem().string(), out / "profile.svg");
  for (const auto& name : kept.dropped) std::cerr << "dropped unsolved problem: " << name << '\n';
}

std::vector<CheckReport> check_command(const std::vector<SuiteEntry>& suite, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<CheckReport> out;
  for (const SuiteEntry& e : suite) {
    CheckReport r;
    r.problem = e.spec.name;
    const Index n = e.objective->dim();
    VectorXd x = e.x0;
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal(rng);
    // Barrier problems are checked at their centred start; others at a
    // perturbed start so the check does not sit on a symmetric point.
    if (e.spec.type != "barrier") {
      for (Index i = 0; i < n; ++i) x(i) += 0.1 * normal(rng);
    }
    try {
      const double h = default_fd_step(x);
      r.grad_error = check_gradient(*e.objective, x, h);
      r.hess_error = check_hess_action(*e.objective, x, v, h);
      r.passed = r.grad_error <= kGradCheckTol && r.hess_error <= kHessCheckTol;
    } catch (const Error&) {
      r.grad_error = r.hess_error = std::numeric_limits<double>::quiet_NaN();
      r.passed = false;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace blockqn
