#include "blockqn/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace blockqn {

namespace {

double checked(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite objective value");
  return v;
}

const VectorXd& checked(const VectorXd& v) {
  if (!v.allFinite()) throw Error(ErrorCode::NonFiniteValue, "non-finite gradient");
  return v;
}

}  // namespace

double default_fd_step(const VectorXd& x) { return 1e-5 * (1.0 + x.norm()); }

double check_gradient(const Objective& obj, const VectorXd& x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "check_gradient: h must be positive");
  if (x.size() != obj.dim()) throw Error(ErrorCode::DimensionMismatch, "check_gradient: bad x");
  const VectorXd g = checked(obj.gradient(x));
  double worst = 0.0;
  VectorXd xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = checked(obj.value(xp));
    xp(i) = x(i) - h;
    const double fm = checked(obj.value(xp));
    xp(i) = x(i);
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(g(i) - fd) / std::max(1.0, std::abs(g(i))));
  }
  return worst;
}

double check_hess_action(const Objective& obj, const VectorXd& x, const VectorXd& v, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "check_hess_action: h must be positive");
  if (x.size() != obj.dim() || v.size() != obj.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "check_hess_action: bad x or v");
  }
  const MatrixXd gv = obj.hess_action(x, v);
  if (!gv.allFinite()) throw Error(ErrorCode::NonFiniteValue, "non-finite Hessian action");
  const double vnorm = v.norm();
  if (vnorm == 0.0) return gv.norm();
  // Difference along the unit direction, rescaled, so the step length is h.
  const VectorXd u = v / vnorm;
  const VectorXd gp = checked(obj.gradient(x + h * u));
  const VectorXd gm = checked(obj.gradient(x - h * u));
  const VectorXd fd = vnorm * (gp - gm) / (2.0 * h);
  return (gv.col(0) - fd).norm() / std::max(1.0, gv.norm());
}

}  // namespace blockqn
