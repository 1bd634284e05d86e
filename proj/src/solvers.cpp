#include "blockqn/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

#include "blockqn/updates.hpp"

namespace blockqn {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::BlockBFGS: return "block_bfgs";
    case Method::RollingBlockBFGS: return "rolling_block_bfgs";
    case Method::BFGS: return "bfgs";
    case Method::DampedBFGS: return "damped_bfgs";
    case Method::CautiousBFGS: return "cautious_bfgs";
    case Method::ModifiedBFGS: return "modified_bfgs";
    case Method::GradientDescent: return "gradient_descent";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::BlockBFGS, Method::RollingBlockBFGS, Method::BFGS, Method::DampedBFGS,
                   Method::CautiousBFGS, Method::ModifiedBFGS, Method::GradientDescent}) {
    if (to_string(m) == name) return m;
  }
  if (name == "gd") return Method::GradientDescent;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::GradTol: return "GradTol";
    case Termination::FStop: return "FStop";
    case Termination::MaxSteps: return "MaxSteps";
    case Termination::LineSearchFail: return "LineSearchFail";
    case Termination::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

void SolverConfig::validate() const {
  if (q < 0) throw Error(ErrorCode::InvalidArgument, "solver: q must be >= 1 (or 0 for the default)");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "solver: tau must be positive");
  if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "solver: max_steps must be >= 1");
  if (!(h0_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "solver: h0_scale must be positive");
  if (!(grad_tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "solver: grad_tol must be >= 0");
  ls.validate();
}

int cube_root_floor(Index n) {
  int r = 1;
  while (static_cast<Index>(r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

int effective_block_size(const SolverConfig& cfg, Index n) {
  if (cfg.q > 0) return cfg.q;
  const int q = cube_root_floor(n);
  return cfg.method == Method::RollingBlockBFGS ? std::min(3, q) : q;
}

namespace {

using Clock = std::chrono::steady_clock;

/// Iterate, objective state and trace bookkeeping shared by every driver.
class Run {
 public:
  Run(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg)
      : obj_(obj), cfg_(cfg), start_(Clock::now()) {
    cfg.validate();
    if (x0.size() != obj.dim()) throw Error(ErrorCode::DimensionMismatch, "solver: x0 has wrong size");
    x_ = x0;
    f_ = obj_.value(x_);
    g_ = obj_.gradient(x_);
    trace_.f0 = f_;
    trace_.gnorm0 = g_.norm();
    h_ = MatrixXd::Identity(x0.size(), x0.size()) * cfg.h0_scale;
    if (!std::isfinite(f_) || !g_.allFinite()) {
      done_ = true;
      trace_.termination = Termination::NonFinite;
    } else {
      check_converged();
    }
  }

  bool done() const { return done_; }
  const VectorXd& x() const { return x_; }
  const VectorXd& g() const { return g_; }
  MatrixXd& h() { return h_; }
  CountingObjective& obj() { return obj_; }
  const SolverConfig& cfg() const { return cfg_; }
  RunTrace& trace() { return trace_; }

  /// Quasi-Newton direction -H g; H is reset to its initial value when
  /// roundoff has destroyed the descent property.
  VectorXd direction() {
    VectorXd d = -(h_ * g_);
    if (!(g_.dot(d) < 0.0) || !d.allFinite()) {
      h_ = MatrixXd::Identity(x_.size(), x_.size()) * cfg_.h0_scale;
      ++trace_.resets;
      d = -cfg_.h0_scale * g_;
    }
    return d;
  }

  struct Step {
    VectorXd s;
    VectorXd y;       // gradient change
    VectorXd g_prev;
    double lambda = 0.0;
  };

  /// Line search along d and move. Returns false (and ends the run) when the
  /// search fails.
  bool take_step(const VectorXd& d, int block, int inner, Step& out) {
    LineSearchResult ls = wolfe_search(obj_, x_, d, f_, g_, cfg_.ls);
    if (!accepted(ls.status)) {
      finish(Termination::LineSearchFail);
      return false;
    }
    out.lambda = ls.lambda;
    out.s = ls.lambda * d;
    out.g_prev = g_;
    out.y = ls.g_new - g_;
    x_ += out.s;
    f_ = ls.f_new;
    g_ = std::move(ls.g_new);

    StepRecord rec;
    rec.step = trace_.n_steps() + 1;
    rec.block = block;
    rec.inner = inner;
    rec.f = f_;
    rec.gnorm = g_.norm();
    rec.lambda = ls.lambda;
    rec.snorm = out.s.norm();
    const double denom = out.g_prev.norm() * rec.snorm;
    rec.cos_theta = denom > 0.0 ? std::clamp(-out.g_prev.dot(out.s) / denom, 0.0, 1.0) : 0.0;
    rec.elapsed = seconds();
    trace_.steps.push_back(rec);
    if (cfg_.record_iterates) trace_.iterates.push_back(x_);

    if (!check_converged() && trace_.n_steps() >= cfg_.max_steps) finish(Termination::MaxSteps);
    return true;
  }

  void mark_update(int qk) {
    ++trace_.updates;
    if (!trace_.steps.empty()) {
      trace_.steps.back().updated = true;
      trace_.steps.back().qk = qk;
    }
  }

  void finish(Termination t) {
    done_ = true;
    trace_.termination = t;
  }

  RunTrace result() {
    trace_.x = x_;
    trace_.f = f_;
    trace_.gnorm = g_.norm();
    trace_.counters = obj_.counters();
    trace_.wall_time = seconds();
    return std::move(trace_);
  }

 private:
  bool check_converged() {
    if (g_.norm() <= cfg_.grad_tol) {
      finish(Termination::GradTol);
      return true;
    }
    if (cfg_.f_stop && f_ <= *cfg_.f_stop) {
      finish(Termination::FStop);
      return true;
    }
    return false;
  }

  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  CountingObjective obj_;
  const SolverConfig& cfg_;
  Clock::time_point start_;
  VectorXd x_;
  double f_ = 0.0;
  VectorXd g_;
  MatrixXd h_;
  RunTrace trace_;
  bool done_ = false;
};

FilterResult<double> select_columns(const SolverConfig& cfg, const MatrixXd& s, const MatrixXd& gs) {
  return cfg.filter ? filter_steps(s, gs, cfg.tau, cfg.always_keep_first) : keep_all_steps(s, gs);
}

/// Applies a block update unless the filter emptied D or D^T G D is not
/// positive definite (only possible without filtering). Returns the number
/// of columns used, 0 when skipped.
int apply_block_update(MatrixXd& h, const FilterResult<double>& filt) {
  if (filt.empty()) return 0;
  try {
    h = block_update_inverse(h, filt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularBlock) throw;
    return 0;
  }
  return static_cast<int>(filt.size());
}

void require_method(const SolverConfig& cfg, std::initializer_list<Method> allowed, const char* who) {
  for (Method m : allowed) {
    if (cfg.method == m) return;
  }
  throw Error(ErrorCode::InvalidArgument, std::string(who) + ": unsupported method " +
                                              std::string(to_string(cfg.method)));
}

}  // namespace

RunTrace solve_block_bfgs(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg) {
  require_method(cfg, {Method::BlockBFGS}, "solve_block_bfgs");
  Run run(obj, x0, cfg);
  const Index n = x0.size();
  const int q = effective_block_size(cfg, n);
  MatrixXd steps(n, q);
  Run::Step st;
  for (int k = 1; !run.done(); ++k) {
    int taken = 0;
    for (int i = 1; i <= q && !run.done(); ++i) {
      if (!run.take_step(run.direction(), k, i, st)) break;
      steps.col(taken++) = st.s;
    }
    // A block cut short by termination is not used for an update.
    if (run.done()) break;

    const MatrixXd gs = run.obj().hess_action(run.x(), steps);
    if (!gs.allFinite()) {
      run.finish(Termination::NonFinite);
      break;
    }
    run.trace().max_window = std::max(run.trace().max_window, q);
    const int used = apply_block_update(run.h(), select_columns(cfg, steps, gs));
    if (used > 0) run.mark_update(used);
  }
  return run.result();
}

RunTrace solve_rolling_block_bfgs(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg) {
  require_method(cfg, {Method::RollingBlockBFGS}, "solve_rolling_block_bfgs");
  Run run(obj, x0, cfg);
  const Index n = x0.size();
  const int q = effective_block_size(cfg, n);

  struct Column {
    int step;
    VectorXd s;
  };
  std::deque<Column> window;  // newest first
  Run::Step st;
  while (!run.done()) {
    if (!run.take_step(run.direction(), run.trace().n_steps() + 1, 1, st)) break;
    const int k = run.trace().n_steps();
    window.push_front({k, st.s});
    while (!window.empty() && window.back().step <= k - q) window.pop_back();
    if (run.done()) break;

    MatrixXd w(n, static_cast<Index>(window.size()));
    for (Index j = 0; j < w.cols(); ++j) w.col(j) = window[j].s;
    run.trace().max_window = std::max(run.trace().max_window, static_cast<int>(w.cols()));
    const MatrixXd gw = run.obj().hess_action(run.x(), w);
    if (!gw.allFinite()) {
      run.finish(Termination::NonFinite);
      break;
    }
    const FilterResult<double> filt = select_columns(cfg, w, gw);
    if (cfg.filter) {
      std::deque<Column> kept;
      for (Index idx : filt.kept) kept.push_back(std::move(window[idx]));
      window = std::move(kept);
    }
    const int used = apply_block_update(run.h(), filt);
    if (used > 0) run.mark_update(used);
  }
  return run.result();
}

namespace {

RunTrace solve_secant_family(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg) {
  Run run(obj, x0, cfg);
  Run::Step st;
  while (!run.done()) {
    const VectorXd d = cfg.method == Method::GradientDescent ? VectorXd(-run.g()) : run.direction();
    const int k = run.trace().n_steps() + 1;
    if (!run.take_step(d, k, 1, st)) break;
    if (run.done()) break;

    const VectorXd& s = st.s;
    const VectorXd& y = st.y;
    const double ys = y.dot(s);
    bool update = false;
    VectorXd z;
    switch (cfg.method) {
      case Method::BFGS:
        update = ys > 1e-12 * y.norm() * s.norm();
        z = y;
        break;
      case Method::CautiousBFGS:
        update = ys > 0.0 && cautious_gate(s, y, st.g_prev, cfg.cautious_eps, cfg.cautious_exponent);
        z = y;
        break;
      case Method::ModifiedBFGS:
        z = li_fukushima_modify(s, y, cfg.modified_eps);
        update = true;
        break;
      case Method::DampedBFGS: {
        // d = -H g, so B s = lambda B d = -lambda g exactly.
        const VectorXd bs = -st.lambda * st.g_prev;
        z = powell_damp(s, y, bs, cfg.phi);
        update = z.dot(s) > 0.0;
        run.trace().steps.back().zs = z.dot(s);
        run.trace().steps.back().sbs = s.dot(bs);
        break;
      }
      default:
        break;
    }
    if (update) {
      run.h() = secant_update(run.h(), s, z);
      run.mark_update(1);
    }
  }
  return run.result();
}

}  // namespace

RunTrace solve_bfgs(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg) {
  require_method(cfg, {Method::BFGS}, "solve_bfgs");
  return solve_secant_family(obj, x0, cfg);
}

RunTrace solve_variant(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg) {
  require_method(cfg,
                 {Method::DampedBFGS, Method::CautiousBFGS, Method::ModifiedBFGS, Method::GradientDescent},
                 "solve_variant");
  return solve_secant_family(obj, x0, cfg);
}

RunTrace solve(const Objective& obj, const VectorXd& x0, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::BlockBFGS: return solve_block_bfgs(obj, x0, cfg);
    case Method::RollingBlockBFGS: return solve_rolling_block_bfgs(obj, x0, cfg);
    case Method::BFGS: return solve_bfgs(obj, x0, cfg);
    default: return solve_variant(obj, x0, cfg);
  }
}

}  // namespace blockqn
