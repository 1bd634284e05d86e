#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockqn/linesearch.hpp"
#include "blockqn/oracle.hpp"

namespace blockqn {

enum class Method {
  BlockBFGS,
  RollingBlockBFGS,
  BFGS,
  DampedBFGS,
  CautiousBFGS,
  ModifiedBFGS,
  GradientDescent,
};

std::string_view to_string(Method m) noexcept;
Method method_from_string(std::string_view name);

struct SolverConfig {
  Method method = Method::BlockBFGS;
  /// Block size; 0 selects floor(n^(1/3)) (min(3, floor(n^(1/3))) for the
  /// rolling variant).
  int q = 0;
  double tau = 1e-3;
  bool filter = true;
  bool always_keep_first = false;
  LineSearchParams ls;
  double grad_tol = 1e-6;
  std::optional<double> f_stop;
  int max_steps = 5000;
  double h0_scale = 1.0;

  double phi = 0.2;                 // Powell damping
  double cautious_eps = 1e-6;       // cautious gate
  double cautious_exponent = 1.0;
  double modified_eps = 1e-6;       // Li-Fukushima

  bool record_iterates = false;

  void validate() const;
};

/// Resolved block size for `cfg` on an n-dimensional problem.
int effective_block_size(const SolverConfig& cfg, Index n);

/// floor(n^(1/3)) computed exactly on integers (at least 1).
int cube_root_floor(Index n);

enum class Termination { GradTol, FStop, MaxSteps, LineSearchFail, NonFinite };

std::string_view to_string(Termination t) noexcept;

struct StepRecord {
  int step = 0;       // 1-based global step index
  int block = 0;      // 1-based block index
  int inner = 0;      // 1-based position inside the block
  double f = 0.0;     // objective after the step
  double gnorm = 0.0;
  double lambda = 0.0;
  double snorm = 0.0;
  double cos_theta = 0.0;
  bool updated = false;
  int qk = 0;         // columns used by the update performed after this step
  double elapsed = 0.0;  // seconds since the run started
  // Curvature pair of a damped update: z^T s and s^T B s (NaN otherwise).
  double zs = std::numeric_limits<double>::quiet_NaN();
  double sbs = std::numeric_limits<double>::quiet_NaN();
};

struct RunTrace {
  std::vector<StepRecord> steps;
  std::vector<VectorXd> iterates;  // x after each step, when recorded
  EvalCounters counters;
  double wall_time = 0.0;
  Termination termination = Termination::MaxSteps;
  double f0 = 0.0;
  double gnorm0 = 0.0;
  VectorXd x;
  double f = 0.0;
  double gnorm = 0.0;
  int updates = 0;
  int resets = 0;      // times H was reset because d was not a descent direction
  int max_window = 0;  // widest step set offered to an update

  int n_steps() const { return static_cast<int>(steps.size()); }
};

/// Block BFGS: q steps with a fixed inverse approximation, then one block
/// update from the Hessian at the final iterate acting on the block's steps.
RunTrace solve_block_bfgs(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg);

/// Rolling Block BFGS: a block update after every step from a window of the
/// most recent (at most q) steps, newest first.
RunTrace solve_rolling_block_bfgs(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg);

/// Classical BFGS with the secant update.
RunTrace solve_bfgs(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg);

/// DampedBFGS, CautiousBFGS, ModifiedBFGS or GradientDescent.
RunTrace solve_variant(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg);

/// Dispatches on cfg.method.
RunTrace solve(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg);

}  // namespace blockqn
