#pragma once

#include "blockqn/oracle.hpp"

namespace blockqn {

/// Parameters of the Armijo-Wolfe line search:
///   f(x + t d) <= f(x) + alpha t <g, d>      (sufficient decrease)
///   <g(x + t d), d> >= beta <g, d>           (curvature)
/// with 0 < alpha < 1/2 and alpha < beta < 1.
struct LineSearchParams {
  double alpha = 0.1;
  double beta = 0.75;
  int max_evals = 50;
  double lambda_min = 1e-20;
  double lambda_max = 1e20;
  /// Relative size of the objective change treated as rounding noise; see
  /// LineSearchStatus::ApproxWolfe. Zero disables the fallback.
  double noise_eps = 1e-8;

  void validate() const;
};

/// ApproxWolfe: sufficient decrease could not be resolved because
/// |f(x + t d) - f(x)| <= noise_eps (1 + |f(x)|); the step instead satisfies
/// the derivative form <g(x + t d), d> <= (1 - 2 alpha) |<g, d>| together with
/// the curvature condition. This arises only near a minimiser.
enum class LineSearchStatus { Converged, ApproxWolfe, MaxEvals, Failed };

inline bool accepted(LineSearchStatus s) {
  return s == LineSearchStatus::Converged || s == LineSearchStatus::ApproxWolfe;
}

struct LineSearchResult {
  double lambda = 0.0;
  double f_new = 0.0;
  VectorXd g_new;
  int n_evals = 0;
  LineSearchStatus status = LineSearchStatus::Failed;
};

/// Bracketing Wolfe search that always tries the unit step first. Inside a
/// bracket the next trial is the cubic interpolant minimiser, replaced by
/// bisection when it leaves the central 80% of the bracket. Non-finite
/// objective values count as sufficient-decrease failures.
///
/// Throws Error(NotDescent) when <g0, d> >= 0.
LineSearchResult wolfe_search(CountingObjective& obj, const VectorXd& x, const VectorXd& d,
                              double f0, const VectorXd& g0,
                              const LineSearchParams& params = {});

LineSearchResult wolfe_search(const Objective& obj, const VectorXd& x, const VectorXd& d,
                              double f0, const VectorXd& g0,
                              const LineSearchParams& params = {});

/// Minimiser of the cubic Hermite interpolant through (a, fa, da) and
/// (b, fb, db), or NaN when the interpolant has no interior minimiser.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db);

}  // namespace blockqn
