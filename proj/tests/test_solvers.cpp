#include <doctest.h>

#include "blockqn/problems.hpp"
#include "blockqn/solvers.hpp"
#include "support.hpp"

using namespace blockqn;

namespace {

FunctionObjective half_norm(Index n) {
  return FunctionObjective(
      n, [](const VectorXd& x) { return 0.5 * x.squaredNorm(); }, [](const VectorXd& x) { return x; },
      [n](const VectorXd&) { return MatrixXd(MatrixXd::Identity(n, n)); });
}

// f = x^4 - x^2 in one dimension.
FunctionObjective quartic_well() {
  return FunctionObjective(
      1, [](const VectorXd& x) { return std::pow(x(0), 4) - x(0) * x(0); },
      [](const VectorXd& x) { return VectorXd::Constant(1, 4 * std::pow(x(0), 3) - 2 * x(0)); },
      [](const VectorXd& x) { return MatrixXd::Constant(1, 1, 12 * x(0) * x(0) - 2); });
}

SolverConfig config(Method m) {
  SolverConfig cfg;
  cfg.method = m;
  return cfg;
}

const std::vector<Method> kAllMethods = {Method::BlockBFGS,    Method::RollingBlockBFGS, Method::BFGS,
                                         Method::DampedBFGS,   Method::CautiousBFGS,     Method::ModifiedBFGS,
                                         Method::GradientDescent};

}  // namespace

TEST_CASE("block BFGS on 1/2 |x|^2 converges in one unit step") {
  const auto f = half_norm(2);
  const VectorXd x0 = (VectorXd(2) << 3, 4).finished();
  for (int q : {1, 2, 3}) {
    SolverConfig cfg = config(Method::BlockBFGS);
    cfg.q = q;
    const auto t = solve_block_bfgs(f, x0, cfg);
    CHECK(t.termination == Termination::GradTol);
    REQUIRE(t.n_steps() == 1);
    CHECK(t.steps[0].lambda == 1.0);
    CHECK(t.x.isZero(0.0));
  }
}

TEST_CASE("block BFGS reaches the direct-solve minimiser on a quadratic with eigenvalues in [1, 100]") {
  testkit::Gen gen(51);
  VectorXd eigs;
  const MatrixXd a = gen.spd_with_eigs(20, 1.0, 100.0, eigs);
  QuadraticObjective f(a, gen.vector(20));
  SolverConfig cfg = config(Method::BlockBFGS);
  cfg.q = 3;
  cfg.grad_tol = 1e-8;
  cfg.record_iterates = true;
  const auto t = solve_block_bfgs(f, VectorXd::Zero(20), cfg);
  REQUIRE(t.termination == Termination::GradTol);
  const VectorXd xstar = a.ldlt().solve(-f.gradient(VectorXd::Zero(20)));
  CHECK((t.x - xstar).norm() <= 1e-8);
  REQUIRE(t.iterates.size() == t.steps.size());
  CHECK((t.iterates.back() - t.x).norm() == 0.0);
  // Unit steps are eventually admissible.
  CHECK(t.steps.back().lambda == 1.0);
}

TEST_CASE("f_stop above f(x0) stops before the first step") {
  const auto f = half_norm(3);
  for (Method m : kAllMethods) {
    SolverConfig cfg = config(m);
    cfg.f_stop = 100.0;
    const auto t = solve(f, VectorXd::Ones(3), cfg);
    CHECK(t.termination == Termination::FStop);
    CHECK(t.n_steps() == 0);
  }
}

TEST_CASE("starting at the minimiser takes no steps") {
  testkit::Gen gen(52);
  QuadraticObjective f(gen.spd(5, 1.0, 10.0), gen.vector(5));
  for (Method m : kAllMethods) {
    const auto t = solve(f, f.minimizer(), config(m));
    CHECK(t.termination == Termination::GradTol);
    CHECK(t.n_steps() == 0);
  }
}

TEST_CASE("rolling block BFGS with a one-column window") {
  testkit::Gen gen(53);
  QuadraticObjective f(gen.spd(5, 1.0, 10.0), gen.vector(5));
  SolverConfig cfg = config(Method::RollingBlockBFGS);
  cfg.q = 1;
  cfg.grad_tol = 1e-8;
  const auto t = solve_rolling_block_bfgs(f, VectorXd::Zero(5), cfg);
  CHECK(t.termination == Termination::GradTol);
  CHECK(t.n_steps() <= 50);
  CHECK((t.x - f.minimizer()).norm() <= 1e-6);
}

TEST_CASE("rolling window never exceeds q") {
  const auto f = benchmark_oracle(BenchmarkFunction::Rosenbrock, 10);
  for (int q : {1, 2, 3, 4}) {
    for (bool filter : {false, true}) {
      SolverConfig cfg = config(Method::RollingBlockBFGS);
      cfg.q = q;
      cfg.filter = filter;
      cfg.max_steps = 100;
      cfg.grad_tol = 0.0;
      const auto t = solve_rolling_block_bfgs(*f, standard_start(BenchmarkFunction::Rosenbrock, 10), cfg);
      CHECK(t.max_window <= q);
      for (const auto& r : t.steps) CHECK(r.qk <= q);
      // Each step's Hessian action covers the window it offered.
      CHECK(t.counters.n_hess_action_cols <= static_cast<long long>(q) * t.n_steps());
    }
  }
}

TEST_CASE("rolling filter drops an older colinear step") {
  // f = x1^4 / 4 + x2^2 / 2 from (2, 0): every step lies on the x1 axis.
  FunctionObjective f(
      2, [](const VectorXd& x) { return 0.25 * std::pow(x(0), 4) + 0.5 * x(1) * x(1); },
      [](const VectorXd& x) { return (VectorXd(2) << std::pow(x(0), 3), x(1)).finished(); },
      [](const VectorXd& x) {
        MatrixXd h = MatrixXd::Zero(2, 2);
        h(0, 0) = 3 * x(0) * x(0);
        h(1, 1) = 1.0;
        return h;
      });
  SolverConfig cfg = config(Method::RollingBlockBFGS);
  cfg.q = 2;
  cfg.filter = true;
  cfg.max_steps = 20;
  const auto t = solve_rolling_block_bfgs(f, (VectorXd(2) << 2, 0).finished(), cfg);
  REQUIRE(t.n_steps() >= 3);
  CHECK(t.max_window == 2);
  for (const auto& r : t.steps) {
    if (r.updated) CHECK(r.qk == 1);
  }
}

TEST_CASE("BFGS on Rosenbrock from (-1.2, 1)") {
  const auto f = benchmark_oracle(BenchmarkFunction::Rosenbrock, 2);
  const VectorXd x0 = standard_start(BenchmarkFunction::Rosenbrock, 2);
  CHECK(x0(0) == -1.2);
  CHECK(x0(1) == 1.0);
  const auto t = solve_bfgs(*f, x0, config(Method::BFGS));
  CHECK(t.termination == Termination::GradTol);
  CHECK(t.n_steps() < 200);
  CHECK((t.x - VectorXd::Ones(2)).norm() <= 1e-6);
}

TEST_CASE("BFGS on a 5-dimensional quadratic needs about n steps") {
  testkit::Gen gen(54);
  QuadraticObjective f(gen.spd(5, 1.0, 10.0), gen.vector(5));
  SolverConfig cfg = config(Method::BFGS);
  cfg.grad_tol = 1e-8;
  const auto t = solve_bfgs(f, VectorXd::Zero(5), cfg);
  CHECK(t.termination == Termination::GradTol);
  CHECK(t.n_steps() <= 5 + 10);
  CHECK((t.x - f.minimizer()).norm() <= 1e-7);
}

TEST_CASE("damped BFGS on x^4 - x^2 keeps z^T s >= phi s^T B s") {
  const auto f = quartic_well();
  SolverConfig cfg = config(Method::DampedBFGS);
  const auto t = solve_variant(f, VectorXd::Constant(1, 0.1), cfg);
  CHECK(t.termination == Termination::GradTol);
  CHECK(std::abs(f.gradient(t.x)(0)) <= 1e-6);
  CHECK(std::abs(std::abs(t.x(0)) - 1.0 / std::sqrt(2.0)) <= 1e-6);
  int damped = 0;
  for (const auto& r : t.steps) {
    if (std::isnan(r.zs)) continue;
    ++damped;
    CHECK(r.zs >= cfg.phi * r.sbs - 1e-12);
  }
  CHECK(damped > 0);
}

TEST_CASE("cautious BFGS with a huge threshold never updates") {
  testkit::Gen gen(55);
  QuadraticObjective f(gen.spd(6, 1.0, 5.0), gen.vector(6));
  SolverConfig cfg = config(Method::CautiousBFGS);
  cfg.cautious_eps = 1e6;
  const auto t = solve_variant(f, VectorXd::Zero(6), cfg);
  CHECK(t.updates == 0);
  double prev = t.f0;
  for (const auto& r : t.steps) {
    CHECK(r.f < prev);
    prev = r.f;
  }
}

TEST_CASE("gradient descent on 1/2 |x|^2 from (1, 0)") {
  const auto f = half_norm(2);
  const auto t = solve_variant(f, (VectorXd(2) << 1, 0).finished(), config(Method::GradientDescent));
  CHECK(t.termination == Termination::GradTol);
  REQUIRE(t.n_steps() == 1);
  CHECK(t.steps[0].lambda == 1.0);
  CHECK(t.updates == 0);
}

TEST_CASE("drivers reject a mismatched method") {
  const auto f = half_norm(2);
  CHECK_THROWS_AS(solve_block_bfgs(f, VectorXd::Ones(2), config(Method::BFGS)), Error);
  CHECK_THROWS_AS(solve_bfgs(f, VectorXd::Ones(2), config(Method::BlockBFGS)), Error);
  CHECK_THROWS_AS(solve_variant(f, VectorXd::Ones(2), config(Method::BFGS)), Error);
  CHECK_THROWS_AS(solve(f, VectorXd::Ones(3), config(Method::BFGS)), Error);
  SolverConfig bad = config(Method::BFGS);
  bad.tau = 0.0;
  CHECK_THROWS_AS(solve(f, VectorXd::Ones(2), bad), Error);
}

TEST_CASE("block size defaults") {
  CHECK(cube_root_floor(1) == 1);
  CHECK(cube_root_floor(7) == 1);
  CHECK(cube_root_floor(8) == 2);
  CHECK(cube_root_floor(26) == 2);
  CHECK(cube_root_floor(27) == 3);
  CHECK(cube_root_floor(1000) == 10);
  CHECK(effective_block_size(config(Method::BlockBFGS), 100) == 4);
  CHECK(effective_block_size(config(Method::RollingBlockBFGS), 100) == 3);
  CHECK(effective_block_size(config(Method::RollingBlockBFGS), 20) == 2);
}

TEST_CASE("method names round trip") {
  for (Method m : kAllMethods) CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("newton"), Error);
}

TEST_CASE("non-finite start is reported, not thrown") {
  FunctionObjective f(
      1, [](const VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); },
      [](const VectorXd&) { return VectorXd::Zero(1); }, [](const VectorXd&) { return MatrixXd::Zero(1, 1); });
  const auto t = solve(f, VectorXd::Zero(1), config(Method::BFGS));
  CHECK(t.termination == Termination::NonFinite);
  CHECK(t.n_steps() == 0);
}

TEST_CASE("property: trace invariants on random problems") {
  testkit::Gen gen(56);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = gen.integer(2, 12);
    std::unique_ptr<Objective> f;
    VectorXd x0;
    if (trial % 2 == 0) {
      f = std::make_unique<QuadraticObjective>(gen.spd(n, 1.0, 1e3), gen.vector(n));
      x0 = gen.vector(n);
    } else {
      const Index m = 2 * (n / 2 + 1);
      f = benchmark_oracle(BenchmarkFunction::Rosenbrock, m);
      x0 = random_start(BenchmarkFunction::Rosenbrock, m, static_cast<std::uint64_t>(trial));
    }
    for (Method m : kAllMethods) {
      SolverConfig cfg = config(m);
      cfg.max_steps = 300;
      const auto t = solve(*f, x0, cfg);
      double prev = t.f0;
      int step = 0;
      for (const auto& r : t.steps) {
        CHECK(r.step == ++step);
        CHECK(r.f <= prev);
        prev = r.f;
        CHECK(r.cos_theta >= 0.0);
        CHECK(r.cos_theta <= 1.0);
        CHECK(r.lambda > 0.0);
      }
      int updated = 0;
      long long kept = 0;
      for (const auto& r : t.steps) {
        updated += r.updated ? 1 : 0;
        kept += r.qk;
      }
      CHECK(updated == t.updates);
      CHECK(t.counters.n_f >= t.n_steps());

      if (m == Method::BlockBFGS) {
        // One Hessian action of q columns per completed block; updates use
        // the kept subset.
        const int q = effective_block_size(cfg, x0.size());
        int blocks = 0;
        for (std::size_t j = 0; j < t.steps.size(); ++j) {
          const bool last_step = j + 1 == t.steps.size();
          if (t.steps[j].inner == q && !(last_step && t.termination != Termination::LineSearchFail))
            ++blocks;
        }
        CHECK(t.counters.n_hess_action_cols == static_cast<long long>(q) * blocks);
        CHECK(kept <= t.counters.n_hess_action_cols);
        for (const auto& r : t.steps) {
          CHECK(r.inner >= 1);
          CHECK(r.inner <= q);
          if (r.updated) CHECK(r.inner == q);
        }
      } else if (m == Method::RollingBlockBFGS) {
        CHECK(kept <= t.counters.n_hess_action_cols);
      } else {
        CHECK(t.counters.n_hess_action_cols == 0);
        CHECK(kept == t.updates);
      }
    }
  }
}

TEST_CASE("block BFGS without filtering: Hessian-action columns equal the update columns") {
  testkit::Gen gen(57);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = gen.integer(8, 30);
    QuadraticObjective f(gen.spd(n, 1.0, 100.0), gen.vector(n));
    SolverConfig cfg = config(Method::BlockBFGS);
    cfg.filter = false;
    const auto t = solve_block_bfgs(f, VectorXd::Zero(n), cfg);
    REQUIRE(t.termination == Termination::GradTol);
    long long kept = 0;
    for (const auto& r : t.steps) kept += r.qk;
    CHECK(t.counters.n_hess_action_cols == kept);
  }
}
