#include <algorithm>
#include <cmath>
#include <random>

#include "blockqn/problems.hpp"
#include "blockqn/solvers.hpp"

namespace blockqn {

namespace {

/// gamma * log sum exp(-x_i / gamma) over x = base + N y: a smooth upper
/// bound on -min_i x_i that is at most gamma log(n) above it.
class SoftMinObjective final : public Objective {
 public:
  SoftMinObjective(const VectorXd& base, const MatrixXd& basis, double gamma)
      : base_(base), basis_(basis), gamma_(gamma) {}

  Index dim() const override { return basis_.cols(); }

  double value(const VectorXd& y) const override {
    const VectorXd t = -(base_ + basis_ * y) / gamma_;
    const double top = t.maxCoeff();
    return gamma_ * (top + std::log((t.array() - top).exp().sum()));
  }
  VectorXd gradient(const VectorXd& y) const override { return -(basis_.transpose() * weights(y)); }
  MatrixXd hess_action(const VectorXd& y, const MatrixXd& v) const override {
    const VectorXd w = weights(y);
    const MatrixXd nv = basis_ * v;
    const MatrixXd inner = w.asDiagonal() * nv - w * (w.transpose() * nv);
    return basis_.transpose() * inner / gamma_;
  }

 private:
  VectorXd weights(const VectorXd& y) const {
    const VectorXd t = -(base_ + basis_ * y) / gamma_;
    const VectorXd e = (t.array() - t.maxCoeff()).exp();
    return e / e.sum();
  }

  const VectorXd& base_;
  const MatrixXd& basis_;
  double gamma_;
};

VectorXd find_interior_point(const VectorXd& x_ls, const MatrixXd& basis) {
  if (x_ls.minCoeff() > 0.0) return x_ls;
  const double scale = std::max(1.0, x_ls.lpNorm<Eigen::Infinity>());
  SolverConfig cfg;
  cfg.method = Method::BFGS;
  cfg.grad_tol = 1e-10 * scale;
  cfg.max_steps = 2000;
  cfg.f_stop = -0.5 * scale;  // any value below zero certifies positivity
  VectorXd y = VectorXd::Zero(basis.cols());
  double gamma = scale / (4.0 * std::log(double(x_ls.size()) + 1.0));
  for (int attempt = 0; attempt < 4; ++attempt, gamma /= 10.0) {
    SoftMinObjective softmin(x_ls, basis, gamma);
    const RunTrace tr = solve_bfgs(softmin, y, cfg);
    y = tr.x;
    const VectorXd x = x_ls + basis * y;
    if (x.minCoeff() > 0.0) return x;
  }
  throw Error(ErrorCode::Infeasible, "reduce_qp_to_barrier: no strictly positive point with Ax = b found");
}

}  // namespace

BarrierProblem reduce_qp_to_barrier(const QpStandardForm& qp, double mu, std::optional<VectorXd> x0) {
  const Index n = qp.a.cols();
  const Index rows = qp.a.rows();
  if (qp.q.rows() != n || qp.q.cols() != n || qp.c.size() != n || qp.b.size() != rows) {
    throw Error(ErrorCode::DimensionMismatch, "reduce_qp_to_barrier: inconsistent QP data");
  }
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "reduce_qp_to_barrier: mu must be positive");
  if (rows >= n) throw Error(ErrorCode::BadDimension, "reduce_qp_to_barrier: null space of A is trivial");

  Eigen::JacobiSVD<MatrixXd> svd(qp.a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double cutoff = tol::kRankDeficiency * std::max(1.0, rows > 0 ? sv(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += sv(i) > cutoff ? 1 : 0;
  if (rank < rows) throw Error(ErrorCode::RankDeficient, "reduce_qp_to_barrier: A is rank deficient");
  const MatrixXd basis = svd.matrixV().rightCols(n - rows);

  VectorXd start;
  if (x0) {
    if (x0->size() != n) throw Error(ErrorCode::DimensionMismatch, "reduce_qp_to_barrier: x0 has wrong size");
    const double resid = (qp.a * *x0 - qp.b).norm();
    if (resid > 1e-8 * std::max(1.0, qp.b.norm()) || !(x0->minCoeff() > 0.0)) {
      throw Error(ErrorCode::Infeasible, "reduce_qp_to_barrier: supplied x0 is not strictly feasible");
    }
    start = *x0;
  } else {
    VectorXd x_ls = rows > 0 ? VectorXd(svd.solve(qp.b)) : VectorXd(VectorXd::Zero(n));
    start = find_interior_point(x_ls, basis);
  }

  BarrierProblem bp;
  bp.qbar = symmetrized(basis.transpose() * qp.q * basis);
  bp.cbar = basis.transpose() * (qp.c + qp.q * start);
  bp.abar = -basis;
  bp.bbar = start;
  bp.mu = mu;
  bp.null_basis = basis;
  bp.x0 = start;
  return bp;
}

MatrixXd random_spd(Index n, double cond, std::uint64_t seed) {
  if (n < 1 || !(cond >= 1.0)) throw Error(ErrorCode::InvalidArgument, "random_spd: bad size or condition");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  const MatrixXd v = Eigen::HouseholderQR<MatrixXd>(g).householderQ();
  VectorXd lambda(n);
  for (Index i = 0; i < n; ++i) {
    lambda(i) = n == 1 ? 1.0 : std::pow(cond, double(i) / double(n - 1));
  }
  return symmetrized(v * lambda.asDiagonal() * v.transpose());
}

MatrixXd random_regularizer(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd r(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) r(i, j) = normal(rng);
  return MatrixXd::Identity(n, n) + r.transpose() * r / double(n);
}

QpStandardForm random_standard_qp(Index n, Index rows, std::uint64_t seed, VectorXd* x0_out) {
  if (n < 2 || rows < 1 || rows >= n) throw Error(ErrorCode::InvalidArgument, "random_standard_qp: bad shape");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  QpStandardForm qp;
  qp.a.resize(rows, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < rows; ++i) qp.a(i, j) = normal(rng);
  VectorXd x0(n);
  for (Index i = 0; i < n; ++i) x0(i) = unif(rng);
  qp.b = qp.a * x0;
  // 2n x n factor keeps Q safely positive definite.
  MatrixXd r(2 * n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < 2 * n; ++i) r(i, j) = normal(rng);
  qp.q = r.transpose() * r / double(2 * n);
  qp.c.resize(n);
  for (Index i = 0; i < n; ++i) qp.c(i) = normal(rng);
  if (x0_out) *x0_out = x0;
  return qp;
}

}  // namespace blockqn
