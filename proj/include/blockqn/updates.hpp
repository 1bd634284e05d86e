#pragma once

// Hessian-approximation updates. H always denotes the inverse approximation
// (H = B^{-1}); solvers only ever store H. All routines are pure and
// templated on the scalar type.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "blockqn/linalg.hpp"

namespace blockqn {

/// Steps of one block and the Hessian at the block's last iterate applied to
/// them. `grads` is diagnostic only and may be empty.
template <typename Scalar>
struct StepBlock {
  Mat<Scalar> steps;
  Mat<Scalar> hess_steps;
  Mat<Scalar> grads;
  Index block_index = 0;
};

/// Columns that survived filtering, with the LDL^T data of D^T G D.
template <typename Scalar>
struct FilterResult {
  std::vector<Index> kept;
  Mat<Scalar> d_cols;
  Mat<Scalar> gd_cols;
  LdltFactor<Scalar> factor;

  bool empty() const { return kept.empty(); }
  Index size() const { return static_cast<Index>(kept.size()); }
};

/// Step filtering by incremental LDL^T of S^T G S.
///
/// Columns are visited in order. For column i the pivot sigma_i^2 is the
/// Schur complement of S^T G S restricted to the columns kept so far; the
/// column is kept iff sigma_i^2 >= tau ||s_i||^2 (and sigma_i^2 > 0). When
/// `always_keep_first` is set the first column is kept whenever its
/// curvature exceeds the rounding level of the block's largest curvature.
/// Rejected columns leave no trace in the factor.
/// S^T G S is formed from `hess_steps`, so no new Hessian actions are needed.
template <typename DerivedS, typename DerivedGS>
FilterResult<typename DerivedS::Scalar> filter_steps(const Eigen::MatrixBase<DerivedS>& steps,
                                                     const Eigen::MatrixBase<DerivedGS>& hess_steps,
                                                     typename DerivedS::Scalar tau,
                                                     bool always_keep_first = false) {
  using Scalar = typename DerivedS::Scalar;
  if (!(tau > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "filter_steps: tau must be positive");
  if (steps.cols() < 1 || steps.rows() != hess_steps.rows() || steps.cols() != hess_steps.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "filter_steps: steps and hess_steps differ in shape");
  }
  const Index q = steps.cols();
  const Mat<Scalar> sgs = symmetrized(steps.transpose() * hess_steps);
  // Curvature below this (per unit |s|^2) is indistinguishable from zero.
  Scalar g_scale(0);
  for (Index j = 0; j < q; ++j) {
    const Scalar sn = steps.col(j).norm();
    if (sn > Scalar(0)) g_scale = std::max(g_scale, Scalar(hess_steps.col(j).norm() / sn));
  }
  const Scalar rounding_floor = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * g_scale;

  std::vector<Index> kept;
  Mat<Scalar> lower = Mat<Scalar>::Zero(q, q);
  Vec<Scalar> pivots = Vec<Scalar>::Zero(q);
  Vec<Scalar> row(q);
  for (Index i = 0; i < q; ++i) {
    const Index nk = static_cast<Index>(kept.size());
    for (Index p = 0; p < nk; ++p) {
      Scalar v = sgs(i, kept[p]);
      for (Index r = 0; r < p; ++r) v -= row(r) * lower(p, r) * pivots(r);
      row(p) = v / pivots(p);
    }
    Scalar sigma2 = sgs(i, i);
    for (Index p = 0; p < nk; ++p) sigma2 -= row(p) * row(p) * pivots(p);

    const bool passes = sigma2 >= tau * steps.col(i).squaredNorm();
    const bool forced = always_keep_first && i == 0 && sigma2 > rounding_floor * steps.col(i).squaredNorm();
    if (sigma2 > Scalar(0) && (passes || forced)) {
      lower.row(nk).head(nk) = row.head(nk).transpose();
      lower(nk, nk) = Scalar(1);
      pivots(nk) = sigma2;
      kept.push_back(i);
    }
  }

  FilterResult<Scalar> out;
  const Index nk = static_cast<Index>(kept.size());
  out.kept = kept;
  out.d_cols.resize(steps.rows(), nk);
  out.gd_cols.resize(steps.rows(), nk);
  for (Index p = 0; p < nk; ++p) {
    out.d_cols.col(p) = steps.col(kept[p]);
    out.gd_cols.col(p) = hess_steps.col(kept[p]);
  }
  out.factor.lower = lower.topLeftCorner(nk, nk);
  out.factor.pivots = pivots.head(nk);
  return out;
}

template <typename Scalar>
FilterResult<Scalar> filter_steps(const StepBlock<Scalar>& block, Scalar tau,
                                  bool always_keep_first = false) {
  return filter_steps(block.steps, block.hess_steps, tau, always_keep_first);
}

/// Keeps every column (no filtering). The factor is the raw LDL^T of D^T G D.
template <typename DerivedS, typename DerivedGS>
FilterResult<typename DerivedS::Scalar> keep_all_steps(const Eigen::MatrixBase<DerivedS>& steps,
                                                       const Eigen::MatrixBase<DerivedGS>& hess_steps) {
  using Scalar = typename DerivedS::Scalar;
  FilterResult<Scalar> out;
  for (Index i = 0; i < steps.cols(); ++i) out.kept.push_back(i);
  out.d_cols = steps;
  out.gd_cols = hess_steps;
  out.factor = ldlt(symmetrized(steps.transpose() * hess_steps).eval(), Pivoting::Raw);
  return out;
}

namespace detail {
template <typename Derived>
LdltFactor<typename Derived::Scalar> block_factor(const Eigen::MatrixBase<Derived>& m) {
  try {
    return ldlt(m, Pivoting::StrictPositive);
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularBlock, std::string("block update: ") + e.what());
  }
}
}  // namespace detail

/// Block BFGS update of the inverse approximation:
///
///   H+ = D M^{-1} D^T + (I - D M^{-1} Y^T) H (I - Y M^{-1} D^T),
///
/// with Y = G D and M = D^T G D. H+ satisfies H+ Y = D and is the G-weighted
/// nearest symmetric matrix to H that does so. The result is symmetrised.
template <typename DerivedH, typename DerivedD, typename DerivedY>
Mat<typename DerivedH::Scalar> block_update_inverse(const Eigen::MatrixBase<DerivedH>& h,
                                                    const Eigen::MatrixBase<DerivedD>& d,
                                                    const Eigen::MatrixBase<DerivedY>& gd) {
  using Scalar = typename DerivedH::Scalar;
  if (d.cols() < 1) throw Error(ErrorCode::InvalidArgument, "block update needs at least one column");
  if (d.rows() != h.rows() || gd.rows() != h.rows() || gd.cols() != d.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "block_update_inverse: shape mismatch");
  }
  const auto fac = detail::block_factor(symmetrized(d.transpose() * gd).eval());
  const Mat<Scalar> p = ldlt_solve(fac, d.transpose()).transpose();  // D M^{-1}
  const Mat<Scalar> hy = h * gd;
  const Mat<Scalar> yhy = gd.transpose() * hy;
  Mat<Scalar> out = h;
  out.noalias() += p * d.transpose();
  out.noalias() -= p * hy.transpose();
  out.noalias() -= hy * p.transpose();
  out.noalias() += p * (yhy * p.transpose());
  return symmetrized(out);
}

template <typename DerivedH, typename Scalar = typename DerivedH::Scalar>
Mat<Scalar> block_update_inverse(const Eigen::MatrixBase<DerivedH>& h,
                                 const FilterResult<Scalar>& filt) {
  return block_update_inverse(h, filt.d_cols, filt.gd_cols);
}

/// Direct form B+ = B - B D (D^T B D)^{-1} D^T B + Y (D^T Y)^{-1} Y^T.
/// Kept for verification; solvers use the inverse form.
template <typename DerivedB, typename DerivedD, typename DerivedY>
Mat<typename DerivedB::Scalar> block_update_direct(const Eigen::MatrixBase<DerivedB>& b,
                                                   const Eigen::MatrixBase<DerivedD>& d,
                                                   const Eigen::MatrixBase<DerivedY>& gd) {
  using Scalar = typename DerivedB::Scalar;
  if (d.cols() < 1) throw Error(ErrorCode::InvalidArgument, "block update needs at least one column");
  if (d.rows() != b.rows() || gd.rows() != b.rows() || gd.cols() != d.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "block_update_direct: shape mismatch");
  }
  const Mat<Scalar> bd = b * d;
  const auto fb = detail::block_factor(symmetrized(d.transpose() * bd).eval());
  const auto fg = detail::block_factor(symmetrized(d.transpose() * gd).eval());
  Mat<Scalar> out = b;
  out.noalias() -= bd * ldlt_solve(fb, bd.transpose());
  out.noalias() += gd * ldlt_solve(fg, gd.transpose());
  return symmetrized(out);
}

template <typename DerivedB, typename Scalar = typename DerivedB::Scalar>
Mat<Scalar> block_update_direct(const Eigen::MatrixBase<DerivedB>& b,
                                const FilterResult<Scalar>& filt) {
  return block_update_direct(b, filt.d_cols, filt.gd_cols);
}

/// Classical BFGS update of the inverse approximation from a step s and
/// gradient change y; H+ y = s.
template <typename DerivedH, typename DerivedS, typename DerivedY>
Mat<typename DerivedH::Scalar> secant_update(const Eigen::MatrixBase<DerivedH>& h,
                                             const Eigen::MatrixBase<DerivedS>& s,
                                             const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedH::Scalar;
  const Scalar ys = y.dot(s);
  if (!(ys > Scalar(0))) {
    throw Error(ErrorCode::CurvatureViolation, "secant_update: <y, s> must be positive");
  }
  // A one-column block update with G D replaced by y is exactly BFGS.
  return block_update_inverse(h, s, y);
}

/// Li-Fukushima cautious rule: update only if <y,s>/||s||^2 >= eps ||g||^exponent.
template <typename DerivedS, typename DerivedY, typename DerivedG>
bool cautious_gate(const Eigen::MatrixBase<DerivedS>& s, const Eigen::MatrixBase<DerivedY>& y,
                   const Eigen::MatrixBase<DerivedG>& g, typename DerivedS::Scalar eps,
                   typename DerivedS::Scalar exponent) {
  using Scalar = typename DerivedS::Scalar;
  const Scalar ss = s.squaredNorm();
  if (!(ss > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "cautious_gate: zero step");
  using std::pow;
  return y.dot(s) / ss >= eps * pow(g.norm(), exponent);
}

/// Li-Fukushima modified secant vector z = y + r s with r chosen so that
/// <z, s> >= eps ||s||^2.
template <typename DerivedS, typename DerivedY>
Vec<typename DerivedS::Scalar> li_fukushima_modify(const Eigen::MatrixBase<DerivedS>& s,
                                                   const Eigen::MatrixBase<DerivedY>& y,
                                                   typename DerivedS::Scalar eps) {
  using Scalar = typename DerivedS::Scalar;
  const Scalar ss = s.squaredNorm();
  if (!(ss > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "li_fukushima_modify: zero step");
  if (!(eps > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "li_fukushima_modify: eps must be positive");
  const Scalar r = std::max(Scalar(0), eps - y.dot(s) / ss);
  return y + r * s;
}

/// Powell damping: z = theta y + (1 - theta) B s, with theta = 1 when
/// y^T s >= phi s^T B s and otherwise the value giving z^T s = phi s^T B s.
template <typename DerivedS, typename DerivedY, typename DerivedBS>
Vec<typename DerivedS::Scalar> powell_damp(const Eigen::MatrixBase<DerivedS>& s,
                                           const Eigen::MatrixBase<DerivedY>& y,
                                           const Eigen::MatrixBase<DerivedBS>& b_s,
                                           typename DerivedS::Scalar phi) {
  using Scalar = typename DerivedS::Scalar;
  if (!(phi > Scalar(0) && phi < Scalar(1))) {
    throw Error(ErrorCode::InvalidArgument, "powell_damp: phi must lie in (0, 1)");
  }
  const Scalar sbs = s.dot(b_s);
  if (!(sbs > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "powell_damp: s^T B s must be positive");
  const Scalar ys = y.dot(s);
  const Scalar theta = ys >= phi * sbs ? Scalar(1) : (Scalar(1) - phi) * sbs / (sbs - ys);
  return theta * y + (Scalar(1) - theta) * b_s;
}

/// Lower bound eta with D^T G D >= eta D^T D for filtered, unit-norm columns
/// and ||G|| <= m_upper: tau^q / (q^q m_upper^(q-1)).
inline double filter_eta_bound(double tau, int q, double m_upper) {
  return std::pow(tau, q) / (std::pow(double(q), q) * std::pow(m_upper, q - 1));
}

}  // namespace blockqn
