#include <algorithm>
#include <cmath>

#include "blockqn/bench.hpp"

namespace blockqn {

double ProfileCurve::operator()(double r) const {
  const auto it = std::upper_bound(ratios.begin(), ratios.end(), r);
  if (it == ratios.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - ratios.begin()) - 1];
}

double fstop_from_optimum(double f_star, double eps) {
  if (!std::isfinite(f_star)) throw Error(ErrorCode::NonFiniteValue, "f_stop: optimum is not finite");
  if (std::abs(f_star) < 1e-10) return f_star + 1e-10;
  return f_star + eps * std::abs(f_star);
}

double success_threshold(double f_best, double eps) { return fstop_from_optimum(f_best, eps); }

SolverConfig reference_config() {
  SolverConfig cfg;
  cfg.method = Method::BFGS;
  cfg.grad_tol = 1e-9;
  cfg.max_steps = 50000;
  return cfg;
}

double compute_fstop(const Objective& obj, const VectorXd& x0, const SolverConfig& reference) {
  RunTrace tr;
  try {
    tr = solve(obj, x0, reference);
  } catch (const Error& e) {
    throw Error(ErrorCode::ReferenceFailed, std::string("reference run failed: ") + e.what());
  }
  const bool converged_at_start = tr.termination == Termination::GradTol || tr.termination == Termination::FStop;
  if (!std::isfinite(tr.f) || (tr.n_steps() == 0 && !converged_at_start)) {
    throw Error(ErrorCode::ReferenceFailed, "reference run made no progress");
  }
  return fstop_from_optimum(std::min(tr.f, tr.f0));
}

CostMatrix exclude_problems(const CostMatrix& costs, const std::vector<std::string>& names) {
  CostMatrix out;
  out.solvers = costs.solvers;
  out.dropped = costs.dropped;
  std::vector<Index> keep;
  for (std::size_t p = 0; p < costs.problems.size(); ++p) {
    if (std::find(names.begin(), names.end(), costs.problems[p]) != names.end()) {
      out.dropped.push_back(costs.problems[p]);
    } else {
      keep.push_back(static_cast<Index>(p));
      out.problems.push_back(costs.problems[p]);
    }
  }
  out.t.resize(static_cast<Index>(keep.size()), costs.t.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.t.row(static_cast<Index>(i)) = costs.t.row(keep[i]);
  return out;
}

CostMatrix drop_unsolved(const CostMatrix& costs) {
  std::vector<std::string> unsolved;
  for (Index p = 0; p < costs.t.rows(); ++p) {
    bool any = false;
    for (Index s = 0; s < costs.t.cols(); ++s) any = any || std::isfinite(costs.t(p, s));
    if (!any) unsolved.push_back(costs.problems[static_cast<std::size_t>(p)]);
  }
  return exclude_problems(costs, unsolved);
}

std::vector<ProfileCurve> performance_profile(const CostMatrix& costs) {
  const Index np = costs.t.rows(), ns = costs.t.cols();
  if (np == 0 || ns == 0) throw Error(ErrorCode::EmptyInput, "performance_profile: empty cost matrix");
  if (static_cast<Index>(costs.solvers.size()) != ns || static_cast<Index>(costs.problems.size()) != np) {
    throw Error(ErrorCode::DimensionMismatch, "performance_profile: names do not match the cost table");
  }

  VectorXd best(np);
  for (Index p = 0; p < np; ++p) {
    double m = kUnsolved;
    for (Index s = 0; s < ns; ++s) {
      const double t = costs.t(p, s);
      if (std::isnan(t) || t < 0.0) throw Error(ErrorCode::InvalidArgument, "performance_profile: bad cost");
      m = std::min(m, t);
    }
    if (!std::isfinite(m)) {
      throw Error(ErrorCode::InvalidArgument,
                  "performance_profile: problem '" + costs.problems[static_cast<std::size_t>(p)] + "' is unsolved");
    }
    best(p) = m;
  }

  std::vector<ProfileCurve> curves;
  for (Index s = 0; s < ns; ++s) {
    std::vector<double> ratios;
    for (Index p = 0; p < np; ++p) {
      const double t = costs.t(p, s);
      if (!std::isfinite(t)) continue;
      if (t == best(p)) {
        ratios.push_back(1.0);
      } else {
        ratios.push_back(best(p) > 0.0 ? t / best(p) : kUnsolved);
      }
    }
    std::sort(ratios.begin(), ratios.end());
    ProfileCurve c;
    c.solver = costs.solvers[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      if (!std::isfinite(ratios[i])) break;
      if (i + 1 < ratios.size() && ratios[i + 1] == ratios[i]) continue;
      c.ratios.push_back(ratios[i]);
      c.values.push_back(double(i + 1) / double(np));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

double trace_cost(const RunTrace& trace, double threshold, CostMetric metric) {
  constexpr double kMinCpu = 1e-9;
  if (trace.f0 <= threshold) return metric == CostMetric::Steps ? 1.0 : kMinCpu;
  for (const StepRecord& r : trace.steps) {
    if (r.f <= threshold) {
      return metric == CostMetric::Steps ? double(std::max(1, r.step)) : std::max(kMinCpu, r.elapsed);
    }
  }
  return kUnsolved;
}

}  // namespace blockqn
