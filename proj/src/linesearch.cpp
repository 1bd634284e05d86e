#include "blockqn/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blockqn {

void LineSearchParams::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error(ErrorCode::InvalidArgument, "line search: need 0 < alpha < 1/2");
  if (!(beta > alpha && beta < 1.0)) throw Error(ErrorCode::InvalidArgument, "line search: need alpha < beta < 1");
  if (max_evals < 1) throw Error(ErrorCode::InvalidArgument, "line search: max_evals must be positive");
  if (!(lambda_min > 0.0 && lambda_max >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "line search: need lambda_min > 0 and lambda_max >= 1");
  }
  if (!(noise_eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "line search: noise_eps must be >= 0");
}

double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (a == b) return nan;
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) return nan;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return nan;
  const double t = b - (b - a) * (db + d2 - d1) / denom;
  return std::isfinite(t) ? t : nan;
}

LineSearchResult wolfe_search(CountingObjective& obj, const VectorXd& x, const VectorXd& d,
                              double f0, const VectorXd& g0, const LineSearchParams& params) {
  params.validate();
  const double slope0 = g0.dot(d);
  if (!(slope0 < 0.0)) throw Error(ErrorCode::NotDescent, "wolfe_search: <g, d> must be negative");

  const double inf = std::numeric_limits<double>::infinity();
  double lo = 0.0, f_lo = f0, s_lo = slope0;
  double hi = inf, f_hi = inf, s_hi = inf;
  bool hi_smooth = false;  // f and slope at hi are finite

  LineSearchResult res;
  const double noise = params.noise_eps * (1.0 + std::abs(f0));
  double t = std::min(1.0, params.lambda_max);
  for (int eval = 1; eval <= params.max_evals; ++eval) {
    res.n_evals = eval;
    const VectorXd xt = x + t * d;
    const double ft = obj.value(xt);
    VectorXd gt;
    double st = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(ft)) {
      gt = obj.gradient(xt);
      st = gt.dot(d);
    }
    const bool finite = std::isfinite(ft) && std::isfinite(st);

    const bool armijo = finite && ft <= f0 + params.alpha * t * slope0;
    if (finite && !armijo && std::abs(ft - f0) <= noise && st <= (2.0 * params.alpha - 1.0) * slope0 &&
        st >= params.beta * slope0) {
      res.lambda = t;
      res.f_new = ft;
      res.g_new = std::move(gt);
      res.status = LineSearchStatus::ApproxWolfe;
      return res;
    }
    if (!armijo) {
      hi = t;
      f_hi = ft;
      s_hi = st;
      hi_smooth = finite;
    } else if (st < params.beta * slope0) {
      lo = t;
      f_lo = ft;
      s_lo = st;
    } else {
      res.lambda = t;
      res.f_new = ft;
      res.g_new = std::move(gt);
      res.status = LineSearchStatus::Converged;
      return res;
    }

    if (hi == inf) {
      if (t >= params.lambda_max) break;
      t = std::min(2.0 * t, params.lambda_max);
      continue;
    }
    const double width = hi - lo;
    if (width <= params.lambda_min || width <= 1e-15 * hi) break;
    double next = std::numeric_limits<double>::quiet_NaN();
    if (hi_smooth) next = cubic_minimizer(lo, f_lo, s_lo, hi, f_hi, s_hi);
    if (!(next >= lo + 0.1 * width && next <= lo + 0.9 * width)) next = lo + 0.5 * width;
    t = next;
  }
  res.lambda = lo;
  res.status = res.n_evals >= params.max_evals ? LineSearchStatus::MaxEvals : LineSearchStatus::Failed;
  return res;
}

LineSearchResult wolfe_search(const Objective& obj, const VectorXd& x, const VectorXd& d,
                              double f0, const VectorXd& g0, const LineSearchParams& params) {
  CountingObjective counted(obj);
  return wolfe_search(counted, x, d, f0, g0, params);
}

}  // namespace blockqn
