#pragma once

// Random instance generators shared by the unit and acceptance tests.

#include <cmath>
#include <random>

#include "blockqn/linalg.hpp"

namespace testkit {

using blockqn::Index;
using blockqn::MatrixXd;
using blockqn::VectorXd;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  VectorXd vector(Index n) {
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  MatrixXd matrix(Index r, Index c) {
    MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  MatrixXd orthogonal(Index n) { return Eigen::HouseholderQR<MatrixXd>(matrix(n, n)).householderQ(); }

  /// V diag(lambda) V^T with eigenvalues log-uniform in [lo, hi].
  MatrixXd spd(Index n, double lo, double hi) {
    const MatrixXd v = orthogonal(n);
    VectorXd lambda(n);
    for (Index i = 0; i < n; ++i) lambda(i) = std::exp(uniform(std::log(lo), std::log(hi)));
    return blockqn::symmetrized(v * lambda.asDiagonal() * v.transpose());
  }

  /// Symmetric spd matrix together with its eigenvalues.
  MatrixXd spd_with_eigs(Index n, double lo, double hi, VectorXd& eigs) {
    const MatrixXd v = orthogonal(n);
    eigs.resize(n);
    for (Index i = 0; i < n; ++i) eigs(i) = std::exp(uniform(std::log(lo), std::log(hi)));
    return blockqn::symmetrized(v * eigs.asDiagonal() * v.transpose());
  }

  MatrixXd invertible(Index n) {
    // Well conditioned: orthogonal times a diagonal in [0.5, 2].
    VectorXd d(n);
    for (Index i = 0; i < n; ++i) d(i) = uniform(0.5, 2.0) * (normal() < 0 ? -1.0 : 1.0);
    return orthogonal(n) * d.asDiagonal() * orthogonal(n);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double rel_err(const MatrixXd& a, const MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testkit
