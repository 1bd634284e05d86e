#include <cmath>
#include <limits>

#include "blockqn/problems.hpp"

namespace blockqn {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

VectorXd labels_vector(const SparseDataset& data) {
  VectorXd y(static_cast<Index>(data.labels.size()));
  for (Index i = 0; i < y.size(); ++i) y(i) = data.labels[static_cast<std::size_t>(i)];
  return y;
}

void check_dataset(const SparseDataset& data) {
  if (data.points() < 1) throw Error(ErrorCode::EmptyDataset, "dataset has no points");
  if (static_cast<Index>(data.labels.size()) != data.points()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from point count");
  }
}

void check_point(const Objective& obj, const VectorXd& x) {
  if (x.size() != obj.dim()) throw Error(ErrorCode::DimensionMismatch, "point has wrong dimension");
}

}  // namespace

// --- quadratic -------------------------------------------------------------

QuadraticObjective::QuadraticObjective(MatrixXd a, VectorXd b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "quadratic: A and b disagree");
  }
}

double QuadraticObjective::value(const VectorXd& x) const {
  check_point(*this, x);
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

VectorXd QuadraticObjective::gradient(const VectorXd& x) const {
  check_point(*this, x);
  return a_ * x - b_;
}

MatrixXd QuadraticObjective::hess_action(const VectorXd&, const MatrixXd& v) const { return a_ * v; }

std::optional<MatrixXd> QuadraticObjective::hessian(const VectorXd&) const { return a_; }

VectorXd QuadraticObjective::minimizer() const { return a_.llt().solve(b_); }

// --- logistic --------------------------------------------------------------

LogisticObjective::LogisticObjective(SparseDataset data, MatrixXd reg)
    : data_(std::move(data)), reg_(std::move(reg)) {
  check_dataset(data_);
  if (reg_.rows() != data_.features_dim() || reg_.cols() != data_.features_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "logistic: regulariser size differs from feature count");
  }
  y_ = labels_vector(data_);
}

double LogisticObjective::value(const VectorXd& w) const {
  check_point(*this, w);
  const VectorXd z = data_.features * w;
  double loss = 0.0;
  for (Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - y_(i) * z(i);
  const double m = static_cast<double>(data_.points());
  return loss / m + w.dot(reg_ * w) / (2.0 * m);
}

VectorXd LogisticObjective::gradient(const VectorXd& w) const {
  check_point(*this, w);
  const VectorXd z = data_.features * w;
  VectorXd r(z.size());
  for (Index i = 0; i < z.size(); ++i) r(i) = sigmoid(z(i)) - y_(i);
  const double m = static_cast<double>(data_.points());
  return (data_.features.transpose() * r + reg_ * w) / m;
}

MatrixXd LogisticObjective::hess_action(const VectorXd& w, const MatrixXd& v) const {
  check_point(*this, w);
  const VectorXd z = data_.features * w;
  VectorXd curv(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double p = sigmoid(z(i));
    curv(i) = p * (1.0 - p);
  }
  const double m = static_cast<double>(data_.points());
  const MatrixXd xv = data_.features * v;
  return (data_.features.transpose() * (curv.asDiagonal() * xv) + reg_ * v) / m;
}

std::optional<MatrixXd> LogisticObjective::hessian(const VectorXd& w) const {
  return hess_action(w, MatrixXd::Identity(dim(), dim()));
}

// --- tanh loss -------------------------------------------------------------

TanhObjective::TanhObjective(SparseDataset data) : data_(std::move(data)) {
  check_dataset(data_);
  y_ = labels_vector(data_);
}

double TanhObjective::value(const VectorXd& w) const {
  check_point(*this, w);
  const VectorXd z = data_.features * w;
  double loss = 0.0;
  for (Index i = 0; i < z.size(); ++i) loss += 1.0 - std::tanh(y_(i) * z(i));
  const double m = static_cast<double>(data_.points());
  return loss / m + w.squaredNorm() / (2.0 * m);
}

VectorXd TanhObjective::gradient(const VectorXd& w) const {
  check_point(*this, w);
  const VectorXd z = data_.features * w;
  VectorXd r(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double t = std::tanh(y_(i) * z(i));
    r(i) = -y_(i) * (1.0 - t * t);
  }
  const double m = static_cast<double>(data_.points());
  return (data_.features.transpose() * r + w) / m;
}

MatrixXd TanhObjective::hess_action(const VectorXd& w, const MatrixXd& v) const {
  check_point(*this, w);
  const VectorXd z = data_.features * w;
  VectorXd curv(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double t = std::tanh(y_(i) * z(i));
    curv(i) = 2.0 * y_(i) * y_(i) * t * (1.0 - t * t);
  }
  const double m = static_cast<double>(data_.points());
  const MatrixXd xv = data_.features * v;
  return (data_.features.transpose() * (curv.asDiagonal() * xv) + v) / m;
}

std::optional<MatrixXd> TanhObjective::hessian(const VectorXd& w) const {
  return hess_action(w, MatrixXd::Identity(dim(), dim()));
}

// --- log barrier -------------------------------------------------------------

BarrierObjective::BarrierObjective(BarrierProblem bp) : bp_(std::move(bp)) {
  const Index s = bp_.cbar.size();
  if (bp_.qbar.rows() != s || bp_.qbar.cols() != s || bp_.abar.cols() != s ||
      bp_.abar.rows() != bp_.bbar.size()) {
    throw Error(ErrorCode::DimensionMismatch, "barrier: inconsistent problem data");
  }
  if (!(bp_.mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "barrier: mu must be positive");
}

VectorXd BarrierObjective::slack(const VectorXd& y) const {
  check_point(*this, y);
  return bp_.bbar - bp_.abar * y;
}

double BarrierObjective::value(const VectorXd& y) const {
  const VectorXd r = slack(y);
  if (!(r.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  return 0.5 * y.dot(bp_.qbar * y) + bp_.cbar.dot(y) - bp_.mu * r.array().log().sum();
}

VectorXd BarrierObjective::gradient(const VectorXd& y) const {
  const VectorXd r = slack(y);
  if (!(r.minCoeff() > 0.0)) return VectorXd::Constant(y.size(), std::numeric_limits<double>::quiet_NaN());
  return bp_.qbar * y + bp_.cbar + bp_.mu * (bp_.abar.transpose() * r.cwiseInverse());
}

MatrixXd BarrierObjective::hess_action(const VectorXd& y, const MatrixXd& v) const {
  const VectorXd r = slack(y);
  if (!(r.minCoeff() > 0.0)) {
    return MatrixXd::Constant(v.rows(), v.cols(), std::numeric_limits<double>::quiet_NaN());
  }
  const VectorXd s = r.array().square().inverse();
  return bp_.qbar * v + bp_.mu * (bp_.abar.transpose() * (s.asDiagonal() * (bp_.abar * v)));
}

std::optional<MatrixXd> BarrierObjective::hessian(const VectorXd& y) const {
  return hess_action(y, MatrixXd::Identity(dim(), dim()));
}

// --- factories ---------------------------------------------------------------

std::unique_ptr<Objective> logistic_oracle(SparseDataset data, MatrixXd reg) {
  return std::make_unique<LogisticObjective>(std::move(data), std::move(reg));
}

std::unique_ptr<Objective> tanh_oracle(SparseDataset data) {
  return std::make_unique<TanhObjective>(std::move(data));
}

std::unique_ptr<Objective> barrier_oracle(BarrierProblem bp) {
  return std::make_unique<BarrierObjective>(std::move(bp));
}

}  // namespace blockqn
