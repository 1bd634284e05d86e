#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "blockqn/problems.hpp"
#include "blockqn/solvers.hpp"

namespace blockqn {

inline constexpr double kUnsolved = std::numeric_limits<double>::infinity();

/// t(p, s): cost for solver s on problem p; kUnsolved marks a failure.
struct CostMatrix {
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  MatrixXd t;  // problems x solvers
  std::vector<std::string> dropped;  // problems no solver solved
};

struct ProfileCurve {
  std::string solver;
  std::vector<double> ratios;  // sorted breakpoints, >= 1
  std::vector<double> values;  // rho at each breakpoint

  /// rho(r): fraction of problems solved within a factor r of the best.
  double operator()(double r) const;
  double solved_fraction() const { return values.empty() ? 0.0 : values.back(); }
};

/// Threshold f* + 0.01|f*|, or f* + 1e-10 when |f*| < 1e-10.
double fstop_from_optimum(double f_star, double eps = 0.01);

/// Runs `reference` (high accuracy) from x0 and derives f_stop from the best
/// value. Throws ReferenceFailed when the run makes no progress.
double compute_fstop(const Objective& obj, const VectorXd& x0, const SolverConfig& reference);

/// Reference settings: classical BFGS, grad_tol 1e-9, 50000 steps.
SolverConfig reference_config();

/// Drops problems unsolved by every solver (recorded in `dropped`); ties at
/// the minimum get ratio exactly 1.
CostMatrix drop_unsolved(const CostMatrix& costs);

/// Removes the named problems, recording them in `dropped`.
CostMatrix exclude_problems(const CostMatrix& costs, const std::vector<std::string>& names);

/// Dolan-More profiles. Every problem in `costs` must have a finite best cost.
std::vector<ProfileCurve> performance_profile(const CostMatrix& costs);

struct NamedSolver {
  std::string name;
  SolverConfig config;
};

enum class CostMetric { Steps, CpuTime };

struct GridResult {
  std::vector<double> eps;
  std::vector<CostMatrix> costs;  // one per eps, before dropping
  std::vector<double> best_f;     // f_p per problem
  std::vector<std::vector<RunTrace>> traces;  // [problem][solver]
  /// Barrier problems on which some solver's line search failed; they are
  /// removed from the profiles and reported.
  std::vector<std::string> ill_conditioned;
};

/// Runs every solver on every problem and converts traces to costs at each
/// threshold f_p + eps |f_p|, where f_p is the best value any solver reached.
/// Steps cost is the first step index crossing the threshold (floored at 1);
/// CPU cost is the elapsed time at that step. Runs are distributed over
/// `parallelism` workers (forced to 1 for CpuTime).
GridResult run_grid(const std::vector<SuiteEntry>& suite, const std::vector<NamedSolver>& solvers,
                    const std::vector<double>& eps_list, CostMetric metric, int parallelism);

/// Cost of reaching `threshold` in a trace, or kUnsolved.
double trace_cost(const RunTrace& trace, double threshold, CostMetric metric);

/// Threshold f_p + eps |f_p| (f_p + 1e-10 when |f_p| < 1e-10).
double success_threshold(double f_best, double eps);

// ---------------------------------------------------------------------------
// File formats

void write_costs_csv(const CostMatrix& costs, const std::filesystem::path& path);
CostMatrix read_costs_csv(const std::filesystem::path& path);

void write_profile_csv(const std::vector<ProfileCurve>& curves, const std::filesystem::path& path);
void write_profile_svg(const std::vector<ProfileCurve>& curves, const std::string& title,
                       const std::filesystem::path& path);

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);
std::string trace_summary_json(const RunTrace& trace);

std::vector<ProblemSpec> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ProblemSpec>& manifest, std::uint64_t seed,
                    const std::filesystem::path& path);

std::vector<NamedSolver> read_solver_configs(const std::filesystem::path& path);
/// JSON array echoing every field of each configuration.
std::string solver_configs_json(const std::vector<NamedSolver>& solvers);
/// The solver line-up used when no configuration file is given.
std::vector<NamedSolver> default_solvers();

// ---------------------------------------------------------------------------
// CLI commands (also called directly by tests)

struct RunOptions {
  std::filesystem::path suite;    // empty: default manifest from seed
  std::filesystem::path solvers;  // empty: default_solvers()
  CostMetric metric = CostMetric::Steps;
  std::vector<double> eps = {0.2, 0.1, 0.01};
  std::uint64_t seed = 42;
  std::filesystem::path out;
  int parallel = 1;
  bool write_traces = true;
};

/// Executes a grid and writes costs_<eps>.csv, profile_<eps>.{csv,svg},
/// traces/ and run_manifest.json into options.out.
void run_command(const RunOptions& options);

/// Recomputes profile.csv and profile.svg from a saved cost matrix.
void profile_command(const std::filesystem::path& costs_csv, const std::filesystem::path& out);

struct CheckReport {
  std::string problem;
  double grad_error = 0.0;
  double hess_error = 0.0;
  bool passed = false;
};

/// Gradient (<= 1e-5) and Hessian-action (<= 1e-4) checks on every problem.
std::vector<CheckReport> check_command(const std::vector<SuiteEntry>& suite, std::uint64_t seed);

inline constexpr double kGradCheckTol = 1e-5;
inline constexpr double kHessCheckTol = 1e-4;

std::string format_eps(double eps);

}  // namespace blockqn
