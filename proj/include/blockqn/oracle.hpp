#pragma once

#include <functional>
#include <optional>

#include "blockqn/linalg.hpp"

namespace blockqn {

/// Objective function interface: value, gradient and the Hessian acting on a
/// block of directions (one direction per column). Implementations must be
/// safe for concurrent const evaluation.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Index dim() const = 0;
  virtual double value(const VectorXd& x) const = 0;
  virtual VectorXd gradient(const VectorXd& x) const = 0;
  virtual MatrixXd hess_action(const VectorXd& x, const MatrixXd& directions) const = 0;

  /// Dense Hessian, when the objective can afford to form it.
  virtual std::optional<MatrixXd> hessian(const VectorXd& /*x*/) const { return std::nullopt; }
};

/// Objective assembled from callables; mostly useful in tests and examples.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const VectorXd&)>;
  using GradFn = std::function<VectorXd(const VectorXd&)>;
  using HessFn = std::function<MatrixXd(const VectorXd&)>;

  FunctionObjective(Index dim, ValueFn value, GradFn grad, HessFn hess)
      : dim_(dim), value_(std::move(value)), grad_(std::move(grad)), hess_(std::move(hess)) {}

  Index dim() const override { return dim_; }
  double value(const VectorXd& x) const override { return value_(x); }
  VectorXd gradient(const VectorXd& x) const override { return grad_(x); }
  MatrixXd hess_action(const VectorXd& x, const MatrixXd& v) const override {
    return hess_(x) * v;
  }
  std::optional<MatrixXd> hessian(const VectorXd& x) const override { return hess_(x); }

 private:
  Index dim_;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
};

struct EvalCounters {
  long long n_f = 0;
  long long n_grad = 0;
  long long n_hess_action_cols = 0;

  EvalCounters& operator+=(const EvalCounters& o) {
    n_f += o.n_f;
    n_grad += o.n_grad;
    n_hess_action_cols += o.n_hess_action_cols;
    return *this;
  }
};

/// Per-run view of an objective that tallies evaluations. Not shared between
/// runs, so counting needs no synchronisation.
class CountingObjective {
 public:
  explicit CountingObjective(const Objective& obj) : obj_(obj) {}

  Index dim() const { return obj_.dim(); }
  double value(const VectorXd& x) {
    ++counters_.n_f;
    return obj_.value(x);
  }
  VectorXd gradient(const VectorXd& x) {
    ++counters_.n_grad;
    return obj_.gradient(x);
  }
  MatrixXd hess_action(const VectorXd& x, const MatrixXd& v) {
    counters_.n_hess_action_cols += v.cols();
    return obj_.hess_action(x, v);
  }

  const Objective& objective() const { return obj_; }
  const EvalCounters& counters() const { return counters_; }

 private:
  const Objective& obj_;
  EvalCounters counters_;
};

/// Default finite-difference step, scaled with the size of x.
double default_fd_step(const VectorXd& x);

/// Central-difference gradient check. Returns the largest componentwise
/// error |g_i - fd_i| / max(1, |g_i|).
double check_gradient(const Objective& obj, const VectorXd& x, double h);

/// Compares G(x) v against (g(x + h v) - g(x - h v)) / 2h. Returns the
/// relative Euclidean error (absolute when both sides are tiny).
double check_hess_action(const Objective& obj, const VectorXd& x, const VectorXd& v, double h);

}  // namespace blockqn
