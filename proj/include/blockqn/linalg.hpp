#pragma once

// Dense kernels shared by the update rules and solvers. Everything here is
// header-only and templated on the scalar type.

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "blockqn/errors.hpp"

namespace blockqn {

using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Mat<double>;
using VectorXd = Vec<double>;

namespace tol {
inline constexpr double kReconstruction = 1e-10;
inline constexpr double kComparison = 1e-8;
inline constexpr double kRankDeficiency = 1e-10;
}  // namespace tol

/// Unit lower-triangular L and pivots sigma such that L diag(sigma) L^T
/// reproduces the factored matrix.
template <typename Scalar>
struct LdltFactor {
  Mat<Scalar> lower;
  Vec<Scalar> pivots;

  Index dim() const { return pivots.size(); }

  Mat<Scalar> reconstruct() const {
    return lower * pivots.asDiagonal() * lower.transpose();
  }
};

enum class Pivoting { Raw, StrictPositive };

/// LDL^T without pivoting. Column order is preserved. Only the lower triangle
/// of `a` is read. With Pivoting::Raw non-positive pivots are returned as
/// computed (entries below a zero pivot are set to zero).
template <typename Derived>
LdltFactor<typename Derived::Scalar> ldlt(const Eigen::MatrixBase<Derived>& a,
                                          Pivoting mode = Pivoting::Raw) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  if (n < 1 || a.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "ldlt: matrix must be square and non-empty");
  }
  LdltFactor<Scalar> f{Mat<Scalar>::Identity(n, n), Vec<Scalar>::Zero(n)};
  for (Index j = 0; j < n; ++j) {
    Scalar d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= f.lower(j, k) * f.lower(j, k) * f.pivots(k);
    if (!std::isfinite(static_cast<double>(d))) {
      throw Error(ErrorCode::NonFiniteValue, "ldlt: non-finite pivot");
    }
    if (mode == Pivoting::StrictPositive && !(d > Scalar(0))) {
      throw Error(ErrorCode::DegenerateFactor,
                  "ldlt: non-positive pivot at column " + std::to_string(j));
    }
    f.pivots(j) = d;
    for (Index i = j + 1; i < n; ++i) {
      Scalar v = a(i, j);
      for (Index k = 0; k < j; ++k) v -= f.lower(i, k) * f.lower(j, k) * f.pivots(k);
      f.lower(i, j) = (d != Scalar(0)) ? v / d : Scalar(0);
    }
  }
  return f;
}

/// Solves (L diag(sigma) L^T) X = B for a factor with positive pivots.
template <typename Scalar, typename Derived>
Mat<Scalar> ldlt_solve(const LdltFactor<Scalar>& f, const Eigen::MatrixBase<Derived>& b) {
  Mat<Scalar> x = f.lower.template triangularView<Eigen::UnitLower>().solve(b);
  x = f.pivots.cwiseInverse().asDiagonal() * x;
  f.lower.transpose().template triangularView<Eigen::UnitUpper>().solveInPlace(x);
  return x;
}

template <typename Derived>
LdltFactor<typename Derived::Scalar> ldlt_spd(const Eigen::MatrixBase<Derived>& a) {
  try {
    return ldlt(a, Pivoting::StrictPositive);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateFactor) {
      throw Error(ErrorCode::NotPositiveDefinite, e.what());
    }
    throw;
  }
}

template <typename DerivedA, typename DerivedB>
Mat<typename DerivedA::Scalar> solve_spd(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
  if (b.rows() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "solve_spd: row count mismatch");
  }
  return ldlt_solve(ldlt_spd(a), b);
}

template <typename Derived>
typename Derived::Scalar det_spd(const Eigen::MatrixBase<Derived>& a) {
  return ldlt_spd(a).pivots.prod();
}

/// Returns (a + a^T) / 2.
template <typename Derived>
Mat<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& a) {
  return (a + a.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& a) {
  return a.allFinite();
}

}  // namespace blockqn
