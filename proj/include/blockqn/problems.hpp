#pragma once

#include <Eigen/SparseCore>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockqn/oracle.hpp"

namespace blockqn {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Labelled sparse feature rows; labels are 0 or 1.
struct SparseDataset {
  SparseRows features;  // m x n
  std::vector<int> labels;

  Index points() const { return features.rows(); }
  Index features_dim() const { return features.cols(); }
};

/// Reads LIBSVM text ("label idx:val idx:val ..."), 1-based indices. The
/// smallest label maps to 0, anything larger to 1; more than two distinct
/// labels is a ParseError. `n_override` fixes the feature count.
SparseDataset parse_libsvm(std::istream& in, std::optional<Index> n_override = std::nullopt);
SparseDataset parse_libsvm_file(const std::string& path, std::optional<Index> n_override = std::nullopt);

/// f(x) = 1/2 x^T A x - b^T x.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(MatrixXd a, VectorXd b);

  Index dim() const override { return b_.size(); }
  double value(const VectorXd& x) const override;
  VectorXd gradient(const VectorXd& x) const override;
  MatrixXd hess_action(const VectorXd& x, const MatrixXd& v) const override;
  std::optional<MatrixXd> hessian(const VectorXd& x) const override;

  VectorXd minimizer() const;
  const MatrixXd& matrix() const { return a_; }

 private:
  MatrixXd a_;
  VectorXd b_;
};

/// Regularised logistic loss
///   L(w) = (1/m) sum_i [softplus(x_i^T w) - y_i x_i^T w] + (1/2m) w^T Q w,
/// which equals -(1/m) sum log phi(y_i, x_i, w) + (1/2m) w^T Q w.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(SparseDataset data, MatrixXd reg);

  Index dim() const override { return data_.features_dim(); }
  double value(const VectorXd& w) const override;
  VectorXd gradient(const VectorXd& w) const override;
  MatrixXd hess_action(const VectorXd& w, const MatrixXd& v) const override;
  std::optional<MatrixXd> hessian(const VectorXd& w) const override;

 private:
  SparseDataset data_;
  MatrixXd reg_;
  VectorXd y_;
};

/// Hyperbolic tangent loss
///   L(w) = (1/m) sum_i (1 - tanh(y_i x_i^T w)) + (1/2m) ||w||^2,
/// labels entering multiplicatively as stored (0 or 1).
class TanhObjective final : public Objective {
 public:
  explicit TanhObjective(SparseDataset data);

  Index dim() const override { return data_.features_dim(); }
  double value(const VectorXd& w) const override;
  VectorXd gradient(const VectorXd& w) const override;
  MatrixXd hess_action(const VectorXd& w, const MatrixXd& v) const override;
  std::optional<MatrixXd> hessian(const VectorXd& w) const override;

 private:
  SparseDataset data_;
  VectorXd y_;
};

/// min 1/2 x^T Q x + c^T x  subject to  A x = b, x >= 0.
struct QpStandardForm {
  MatrixXd q;
  VectorXd c;
  MatrixXd a;
  VectorXd b;
};

/// F(y) = 1/2 y^T Qbar y + cbar^T y - mu sum_i log(bbar - Abar y)_i.
struct BarrierProblem {
  MatrixXd qbar;
  VectorXd cbar;
  MatrixXd abar;
  VectorXd bbar;
  double mu = 1000.0;
  MatrixXd null_basis;  // N, orthonormal columns; x = x0 + N y
  VectorXd x0;
};

/// Null-space reduction of a standard-form QP to a log-barrier problem with
/// Qbar = N^T Q N, cbar = N^T (c + Q x0), bbar = x0, Abar = -N. When `x0` is
/// not supplied a strictly positive solution of A x = b is searched for.
BarrierProblem reduce_qp_to_barrier(const QpStandardForm& qp, double mu = 1000.0,
                                    std::optional<VectorXd> x0 = std::nullopt);

class BarrierObjective final : public Objective {
 public:
  explicit BarrierObjective(BarrierProblem bp);

  Index dim() const override { return bp_.cbar.size(); }
  /// +infinity outside the open domain {y : Abar y < bbar}.
  double value(const VectorXd& y) const override;
  VectorXd gradient(const VectorXd& y) const override;
  MatrixXd hess_action(const VectorXd& y, const MatrixXd& v) const override;
  std::optional<MatrixXd> hessian(const VectorXd& y) const override;

  const BarrierProblem& problem() const { return bp_; }

 private:
  VectorXd slack(const VectorXd& y) const;
  BarrierProblem bp_;
};

enum class BenchmarkFunction {
  Arwhead,
  Bdqrtic,
  Cube,
  DixonPrice,
  Edensch,
  Eg2,
  Fletchcr,
  Raydan1,
  Rosenbrock,
  Sinquad,
  Tointgss,
  Trid,
  DoubleWell,
};

std::string_view to_string(BenchmarkFunction f) noexcept;
BenchmarkFunction benchmark_from_string(std::string_view name);
const std::vector<BenchmarkFunction>& all_benchmarks();

/// Smallest valid dimension for `f` (and evenness for Rosenbrock).
bool benchmark_dimension_ok(BenchmarkFunction f, Index n);

std::unique_ptr<Objective> logistic_oracle(SparseDataset data, MatrixXd reg);
std::unique_ptr<Objective> tanh_oracle(SparseDataset data);
std::unique_ptr<Objective> barrier_oracle(BarrierProblem bp);
std::unique_ptr<Objective> benchmark_oracle(BenchmarkFunction f, Index n);
std::unique_ptr<Objective> benchmark_oracle(std::string_view name, Index n);

/// Conventional starting point of a benchmark function.
VectorXd standard_start(BenchmarkFunction f, Index n);
/// Componentwise uniform on [-scale, scale] with a per-function scale.
VectorXd random_start(BenchmarkFunction f, Index n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic problem generation

/// One entry of a problem-suite manifest.
struct ProblemSpec {
  std::string name;
  std::string type;  // quadratic | logistic | tanh | barrier | benchmark | libsvm_logistic | libsvm_tanh
  std::uint64_t seed = 0;
  Index n = 0;
  Index m = 0;             // data points (logistic/tanh) or equality rows (barrier)
  double cond = 0.0;       // quadratic condition number
  bool separable = false;  // logistic/tanh data
  bool random_reg = false; // Q = I + Q' instead of Q = I
  std::string function;    // benchmark name
  bool random_x0 = false;  // benchmark: random start instead of the standard one
  std::string path;        // libsvm file
};

struct SuiteEntry {
  ProblemSpec spec;
  std::shared_ptr<const Objective> objective;
  VectorXd x0;
  std::optional<VectorXd> minimizer;  // known exactly (quadratics)
  bool convex = false;
};

SuiteEntry build_problem(const ProblemSpec& spec);

/// Default desk-scale manifest: 12 quadratics, 10 logistic, 6 tanh and 5
/// barrier problems, all derived from `seed`.
std::vector<ProblemSpec> default_manifest(std::uint64_t seed);

std::vector<SuiteEntry> synth_suite(std::uint64_t seed);

std::vector<SuiteEntry> build_suite(const std::vector<ProblemSpec>& manifest);

/// Random dataset with a planted separator; non-separable sets flip labels
/// through logistic noise.
SparseDataset synthetic_dataset(Index m, Index n, double density, bool separable, std::uint64_t seed);

/// I + R^T R / n with R dense Gaussian.
MatrixXd random_regularizer(Index n, std::uint64_t seed);

/// Random SPD matrix V diag(lambda) V^T with log-spaced eigenvalues in [1, cond].
MatrixXd random_spd(Index n, double cond, std::uint64_t seed);

/// Random standard-form QP with a known strictly positive feasible point.
QpStandardForm random_standard_qp(Index n, Index rows, std::uint64_t seed, VectorXd* x0_out = nullptr);

}  // namespace blockqn
