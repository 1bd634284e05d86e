#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "blockqn/updates.hpp"
#include "support.hpp"

using namespace blockqn;

namespace {

MatrixXd diag2(double a, double b) {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

VectorXd vec2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

double g_norm2(const MatrixXd& e, const MatrixXd& g) { return (e * g * e.transpose() * g).trace(); }

double min_generalized_eig(const MatrixXd& a, const MatrixXd& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(a, b);
  return es.eigenvalues().minCoeff();
}

}  // namespace

// --- filtering ---------------------------------------------------------------

TEST_CASE("filter drops a column with negligible curvature") {
  const MatrixXd s = MatrixXd::Identity(2, 2);
  const MatrixXd gs = diag2(4.0, 1e-8) * s;
  const auto f = filter_steps(s, gs, 1e-3);
  REQUIRE(f.size() == 1);
  CHECK(f.kept[0] == 0);
  CHECK(f.factor.pivots(0) == doctest::Approx(4.0));
  CHECK(f.d_cols.col(0).isApprox(s.col(0)));
  CHECK(f.gd_cols.col(0).isApprox(gs.col(0)));
}

TEST_CASE("filter drops a duplicate column") {
  MatrixXd s(2, 2);
  s << 1, 1, 0, 0;
  const auto f = filter_steps(s, s, 1e-3);
  REQUIRE(f.size() == 1);
  CHECK(f.kept[0] == 0);
}

TEST_CASE("filter keeps orthonormal steps under the identity") {
  testkit::Gen gen(31);
  const MatrixXd s = gen.orthogonal(5).leftCols(3);
  for (double tau : {1e-6, 1e-3, 0.5, 1.0}) {
    const auto f = filter_steps(s, s, tau);
    REQUIRE(f.size() == 3);
    CHECK(f.factor.lower.isIdentity(1e-12));
    CHECK(f.factor.pivots.isOnes(1e-12));
  }
}

TEST_CASE("filter never keeps zero or negative curvature, even when forced") {
  MatrixXd s = MatrixXd::Identity(2, 2);
  MatrixXd gs = diag2(-1.0, 2.0);
  auto f = filter_steps(s, gs, 1e-3, true);
  REQUIRE(f.size() == 1);
  CHECK(f.kept[0] == 1);

  gs = diag2(1e-9, 2.0);
  f = filter_steps(s, gs, 1e-3, true);
  CHECK(f.size() == 2);  // forced first column with tiny positive curvature
  f = filter_steps(s, gs, 1e-3, false);
  CHECK(f.size() == 1);
}

TEST_CASE("forced first column is dropped when its curvature is rounding noise") {
  MatrixXd s = MatrixXd::Identity(2, 2);
  MatrixXd gs = diag2(1e-17, 3.0);
  const auto f = filter_steps(s, gs, 1e-3, true);
  REQUIRE(f.size() == 1);
  CHECK(f.kept[0] == 1);
}

TEST_CASE("deleted columns leave no trace in the factor") {
  // Column 1 duplicates column 0; column 2 must then be factored against
  // column 0 alone.
  testkit::Gen gen(32);
  const MatrixXd g = gen.spd(4, 0.5, 3.0);
  MatrixXd s(4, 3);
  s.col(0) = gen.vector(4);
  s.col(1) = 2.0 * s.col(0);
  s.col(2) = gen.vector(4);
  const auto f = filter_steps(s, g * s, 1e-6);
  REQUIRE(f.size() == 2);
  CHECK(f.kept[0] == 0);
  CHECK(f.kept[1] == 2);
  const MatrixXd dgd = f.d_cols.transpose() * g * f.d_cols;
  const auto ref = ldlt(dgd);
  CHECK((f.factor.lower - ref.lower).norm() <= 1e-10);
  CHECK((f.factor.pivots - ref.pivots).norm() <= 1e-10 * ref.pivots.norm());
}

TEST_CASE("filter input validation") {
  const MatrixXd s = MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(filter_steps(s, s, 0.0), Error);
  CHECK_THROWS_AS(filter_steps(s, MatrixXd::Identity(3, 2), 1e-3), Error);
}

// --- block update ------------------------------------------------------------

TEST_CASE("block update leaves H = I alone when G acts as the identity on D") {
  testkit::Gen gen(33);
  const MatrixXd d = gen.matrix(4, 2);
  CHECK(block_update_inverse(MatrixXd::Identity(4, 4), d, d).isApprox(MatrixXd::Identity(4, 4), 1e-12));
}

TEST_CASE("block update 2x2 example") {
  const MatrixXd d = vec2(1, 0);
  const MatrixXd gd = vec2(2, 0);
  const MatrixXd hp = block_update_inverse(MatrixXd::Identity(2, 2), d, gd);
  CHECK(hp.isApprox(diag2(0.5, 1.0), 1e-15));
  const MatrixXd bp = block_update_direct(MatrixXd::Identity(2, 2), d, gd);
  CHECK(bp.isApprox(diag2(2.0, 1.0), 1e-15));
  CHECK(bp.determinant() == doctest::Approx(2.0));
}

TEST_CASE("direct update with B = G leaves B unchanged") {
  testkit::Gen gen(34);
  const MatrixXd b = gen.spd(5, 0.5, 4.0);
  const MatrixXd d = gen.matrix(5, 3);
  CHECK(testkit::rel_err(block_update_direct(b, d, b * d), b) <= 1e-12);
}

TEST_CASE("block update rejects singular D^T G D") {
  MatrixXd d(2, 2);
  d << 1, 1, 0, 0;
  try {
    (void)block_update_inverse(MatrixXd::Identity(2, 2), d, d);
    FAIL("expected SingularBlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularBlock);
  }
}

TEST_CASE("filter result overloads agree with the explicit form") {
  testkit::Gen gen(35);
  const MatrixXd g = gen.spd(6, 0.5, 5.0), h = gen.spd(6, 0.5, 2.0);
  const MatrixXd s = gen.matrix(6, 3);
  const auto f = filter_steps(s, g * s, 1e-3);
  CHECK(block_update_inverse(h, f).isApprox(block_update_inverse(h, f.d_cols, f.gd_cols)));
  CHECK(block_update_direct(h, f).isApprox(block_update_direct(h, f.d_cols, f.gd_cols)));
}

TEST_CASE("property: block update identities on random instances") {
  testkit::Gen gen(36);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = gen.integer(2, 10);
    const Index q = gen.integer(1, std::min<Index>(4, n));
    const MatrixXd h = gen.spd(n, 0.2, 5.0), g = gen.spd(n, 0.2, 5.0);
    const MatrixXd b = h.inverse();
    const MatrixXd d = gen.matrix(n, q), gd = g * d;
    const MatrixXd hp = block_update_inverse(h, d, gd);
    const MatrixXd bp = block_update_direct(b, d, gd);

    CHECK((hp * gd - d).norm() <= 1e-8 * d.norm());
    CHECK((bp * d - gd).norm() <= 1e-8 * gd.norm());
    CHECK((bp * hp - MatrixXd::Identity(n, n)).norm() <= 1e-7);
    CHECK(hp.isApprox(hp.transpose(), 0.0));
    CHECK(ldlt(hp).pivots.minCoeff() > 0.0);

    const double lhs = bp.determinant() / b.determinant();
    const double rhs = (d.transpose() * gd).determinant() / (d.transpose() * b * d).determinant();
    CHECK(std::abs(lhs - rhs) <= 1e-7 * std::abs(rhs));

    const MatrixXd p = gen.invertible(q);
    CHECK(testkit::rel_err(block_update_inverse(h, d * p, gd * p), hp) <= 1e-8);
  }
}

TEST_CASE("property: the update is the G-weighted nearest feasible matrix") {
  testkit::Gen gen(37);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = gen.integer(3, 8);
    const Index q = gen.integer(1, n - 1);
    const MatrixXd h = gen.spd(n, 0.2, 5.0), g = gen.spd(n, 0.2, 5.0);
    const MatrixXd d = gen.matrix(n, q), y = g * d;
    const MatrixXd hp = block_update_inverse(h, d, y);
    const MatrixXd proj = MatrixXd::Identity(n, n) - y * (y.transpose() * y).inverse() * y.transpose();
    const MatrixXd z = symmetrized(gen.matrix(n, n));
    const MatrixXd nmat = proj * z * proj;
    REQUIRE((nmat * y).norm() <= 1e-10 * std::max(1.0, nmat.norm()) * y.norm());
    const double base = g_norm2(hp - h, g);
    for (double t : {-1.0, -0.1, 0.1, 1.0}) CHECK(g_norm2(hp + t * nmat - h, g) >= base - 1e-10);
  }
}

TEST_CASE("property: filtered columns pass the acceptance test and the eta bound") {
  testkit::Gen gen(38);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = gen.integer(2, 8);
    const int q = gen.integer(1, 4);
    const MatrixXd g = gen.spd(n, 1e-3, 10.0);
    const double m_upper = Eigen::SelfAdjointEigenSolver<MatrixXd>(g).eigenvalues().maxCoeff();
    MatrixXd s = gen.matrix(n, q);
    s.colwise().normalize();
    if (q >= 2 && trial % 5 == 0) s.col(1) = s.col(0);
    const double tau = std::pow(10.0, gen.uniform(-5, -1));
    const auto f = filter_steps(s, g * s, tau);
    for (Index k = 0; k < f.size(); ++k) {
      CHECK(f.factor.pivots(k) >= tau * s.col(f.kept[static_cast<std::size_t>(k)]).squaredNorm());
    }
    for (std::size_t k = 1; k < f.kept.size(); ++k) CHECK(f.kept[k] > f.kept[k - 1]);
    if (f.empty()) continue;
    const MatrixXd dgd = f.d_cols.transpose() * g * f.d_cols;
    CHECK((f.factor.reconstruct() - dgd).norm() <= 1e-10 * dgd.norm());
    const double eta = filter_eta_bound(tau, q, m_upper);
    CHECK(min_generalized_eig(dgd, f.d_cols.transpose() * f.d_cols) >= eta * (1 - 1e-9));
  }
}

// --- secant family -------------------------------------------------------------

TEST_CASE("secant update examples") {
  testkit::Gen gen(39);
  const VectorXd s = gen.vector(4);
  const MatrixXd hp = secant_update(MatrixXd::Identity(4, 4), s, s);
  CHECK((hp * s - s).norm() <= 1e-14 * s.norm());

  const VectorXd y = (VectorXd(2) << 0, 1).finished();
  try {
    (void)secant_update(MatrixXd::Identity(2, 2), vec2(1, 0), y);
    FAIL("expected CurvatureViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CurvatureViolation);
  }
}

TEST_CASE("secant updates along G-conjugate steps recover the inverse Hessian") {
  testkit::Gen gen(40);
  const Index n = 6;
  const MatrixXd g = gen.spd(n, 0.5, 20.0);
  const MatrixXd l = g.llt().matrixL();
  const MatrixXd steps = l.transpose().triangularView<Eigen::Upper>().solve(MatrixXd::Identity(n, n));
  MatrixXd h = MatrixXd::Identity(n, n);
  for (Index i = 0; i < n; ++i) h = secant_update(h, steps.col(i), g * steps.col(i));
  CHECK(testkit::rel_err(h, g.inverse()) <= 1e-6);
}

TEST_CASE("property: secant update satisfies H+ y = s") {
  testkit::Gen gen(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = gen.integer(1, 10);
    const MatrixXd h = gen.spd(n, 0.1, 10.0);
    const VectorXd s = gen.vector(n);
    const VectorXd y = gen.spd(n, 0.1, 10.0) * s;
    const MatrixXd hp = secant_update(h, s, y);
    CHECK((hp * y - s).norm() <= 1e-8 * s.norm());
  }
}

TEST_CASE("cautious gate examples") {
  const VectorXd s = vec2(1, 0);
  CHECK(cautious_gate(s, s, vec2(0, 1), 1e-6, 1.0));
  CHECK_FALSE(cautious_gate(s, vec2(0, 3), vec2(0, 1), 1e-12, 1.0));
  CHECK_FALSE(cautious_gate(s, VectorXd(0.5 * s), vec2(0, 1), 1.0, 0.0));
  CHECK_THROWS_AS(cautious_gate(VectorXd::Zero(2), s, s, 1.0, 1.0), Error);
}

TEST_CASE("Li-Fukushima examples") {
  const VectorXd s = vec2(1, 0);
  CHECK(li_fukushima_modify(s, VectorXd(2.0 * s), 1.0).isApprox(2.0 * s));
  const VectorXd z = li_fukushima_modify(s, VectorXd(-s), 1.0);
  CHECK(z.isApprox(s));
  CHECK(z.dot(s) == doctest::Approx(1.0));
  CHECK(li_fukushima_modify(s, VectorXd::Zero(2), 1.0).isApprox(s));
}

TEST_CASE("property: Li-Fukushima guarantees <z, s> >= eps |s|^2") {
  testkit::Gen gen(42);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = gen.integer(1, 6);
    const VectorXd s = gen.vector(n), y = gen.vector(n);
    const double eps = std::pow(10.0, gen.uniform(-6, 1));
    // <z, s> = <y, s> + r |s|^2 cancels; rounding scales with |<y, s>|.
    const double slack = 1e-12 * (std::abs(y.dot(s)) + eps * s.squaredNorm());
    CHECK(li_fukushima_modify(s, y, eps).dot(s) >= eps * s.squaredNorm() - slack);
  }
}

TEST_CASE("Powell damping examples") {
  const VectorXd s = vec2(1, 0), bs = vec2(1, 0);
  CHECK(powell_damp(s, vec2(1, 2), bs, 0.2).isApprox(vec2(1, 2)));  // y^T s = s^T B s
  const VectorXd z0 = powell_damp(s, vec2(0, 1), bs, 0.2);          // theta = 0.8
  CHECK(z0.isApprox(vec2(0.2, 0.8)));
  CHECK(z0.dot(s) == doctest::Approx(0.2));
  const VectorXd z1 = powell_damp(s, vec2(-1, 0), bs, 0.2);  // theta = 0.4
  CHECK(z1.isApprox(vec2(0.2, 0.0)));
  CHECK(z1.dot(s) == doctest::Approx(0.2));
  CHECK_THROWS_AS(powell_damp(s, s, bs, 1.0), Error);
  CHECK_THROWS_AS(powell_damp(s, s, VectorXd(-bs), 0.2), Error);
}

TEST_CASE("property: Powell damping guarantees z^T s >= phi s^T B s") {
  testkit::Gen gen(43);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = gen.integer(1, 6);
    const MatrixXd b = gen.spd(n, 0.1, 10.0);
    const VectorXd s = gen.vector(n), y = gen.vector(n);
    const double phi = gen.uniform(0.01, 0.99);
    const VectorXd z = powell_damp(s, y, VectorXd(b * s), phi);
    CHECK(z.dot(s) >= phi * s.dot(b * s) - 1e-12);
  }
}

TEST_CASE("eta bound formula") {
  CHECK(filter_eta_bound(1e-3, 1, 10.0) == doctest::Approx(1e-3));
  CHECK(filter_eta_bound(0.1, 2, 5.0) == doctest::Approx(0.01 / (4.0 * 5.0)));
}

TEST_CASE("updates instantiate with long double") {
  using LMat = Mat<long double>;
  LMat d(2, 1), gd(2, 1);
  d << 1, 0;
  gd << 2, 0;
  const LMat hp = block_update_inverse(LMat(LMat::Identity(2, 2)), d, gd);
  CHECK(static_cast<double>(hp(0, 0)) == doctest::Approx(0.5));
  const auto f = filter_steps(d, gd, static_cast<long double>(1e-3));
  CHECK(f.size() == 1);
}
