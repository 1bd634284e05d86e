#include <array>
#include <random>

#include "blockqn/problems.hpp"

namespace blockqn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ splitmix64(index)); }

VectorXd gaussian_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Data density for synthetic classification sets.
constexpr double kDensity = 0.3;

void require(bool ok, const ProblemSpec& spec, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, "problem '" + spec.name + "': " + what);
}

}  // namespace

SuiteEntry build_problem(const ProblemSpec& spec) {
  SuiteEntry e;
  e.spec = spec;
  const std::string& t = spec.type;
  if (t == "quadratic") {
    require(spec.n >= 1 && spec.cond >= 1.0, spec, "quadratic needs n >= 1 and cond >= 1");
    MatrixXd a = random_spd(spec.n, spec.cond, child_seed(spec.seed, 1));
    VectorXd b = gaussian_vector(spec.n, child_seed(spec.seed, 2));
    auto q = std::make_shared<QuadraticObjective>(std::move(a), std::move(b));
    e.minimizer = q->minimizer();
    e.objective = std::move(q);
    e.x0 = VectorXd::Zero(spec.n);
    e.convex = true;
  } else if (t == "logistic" || t == "tanh") {
    require(spec.n >= 1 && spec.m >= 1, spec, "classification problem needs n, m >= 1");
    SparseDataset data = synthetic_dataset(spec.m, spec.n, kDensity, spec.separable, child_seed(spec.seed, 1));
    if (t == "logistic") {
      MatrixXd reg = spec.random_reg ? random_regularizer(spec.n, child_seed(spec.seed, 2))
                                     : MatrixXd(MatrixXd::Identity(spec.n, spec.n));
      e.objective = logistic_oracle(std::move(data), std::move(reg));
      e.convex = true;
    } else {
      e.objective = tanh_oracle(std::move(data));
    }
    e.x0 = VectorXd::Zero(spec.n);
  } else if (t == "libsvm_logistic" || t == "libsvm_tanh") {
    require(!spec.path.empty(), spec, "libsvm problem needs a path");
    std::optional<Index> n_override;
    if (spec.n > 0) n_override = spec.n;
    SparseDataset data = parse_libsvm_file(spec.path, n_override);
    const Index n = data.features_dim();
    if (t == "libsvm_logistic") {
      MatrixXd reg = spec.random_reg ? random_regularizer(n, child_seed(spec.seed, 2))
                                     : MatrixXd(MatrixXd::Identity(n, n));
      e.objective = logistic_oracle(std::move(data), std::move(reg));
      e.convex = true;
    } else {
      e.objective = tanh_oracle(std::move(data));
    }
    e.x0 = VectorXd::Zero(n);
  } else if (t == "barrier") {
    require(spec.n >= 2 && spec.m >= 1 && spec.m < spec.n, spec, "barrier needs 1 <= m < n");
    VectorXd x_feas;
    const QpStandardForm qp = random_standard_qp(spec.n, spec.m, child_seed(spec.seed, 1), &x_feas);
    e.objective = barrier_oracle(reduce_qp_to_barrier(qp, 1000.0, x_feas));
    e.x0 = VectorXd::Zero(spec.n - spec.m);
    e.convex = true;
  } else if (t == "benchmark") {
    const BenchmarkFunction f = benchmark_from_string(spec.function);
    e.objective = benchmark_oracle(f, spec.n);
    e.x0 = spec.random_x0 ? random_start(f, spec.n, child_seed(spec.seed, 1)) : standard_start(f, spec.n);
  } else {
    throw Error(ErrorCode::InvalidArgument, "problem '" + spec.name + "': unknown type '" + t + "'");
  }
  return e;
}

std::vector<ProblemSpec> default_manifest(std::uint64_t seed) {
  std::vector<ProblemSpec> out;
  std::uint64_t index = 0;
  auto add = [&](ProblemSpec p) {
    p.seed = child_seed(seed, ++index);
    out.push_back(std::move(p));
  };

  for (Index n : {20, 50, 80, 100}) {
    for (double cond : {10.0, 1e3, 1e5}) {
      ProblemSpec p;
      p.type = "quadratic";
      p.n = n;
      p.cond = cond;
      p.name = "quad_n" + std::to_string(n) + "_c" + (cond == 10.0 ? "1e1" : cond == 1e3 ? "1e3" : "1e5");
      add(p);
    }
  }

  constexpr std::array<Index, 5> kLogisticDims{10, 20, 30, 40, 50};
  for (std::size_t k = 0; k < kLogisticDims.size(); ++k) {
    for (bool separable : {false, true}) {
      ProblemSpec p;
      p.type = "logistic";
      p.n = kLogisticDims[k];
      p.m = 8 * p.n;
      p.separable = separable;
      p.random_reg = k % 2 == 1;
      p.name = "logistic_n" + std::to_string(p.n) + (separable ? "_sep" : "_noisy") + (p.random_reg ? "_q" : "");
      add(p);
    }
  }

  for (Index n : {10, 20, 30}) {
    for (bool separable : {false, true}) {
      ProblemSpec p;
      p.type = "tanh";
      p.n = n;
      p.m = 8 * n;
      p.separable = separable;
      p.name = "tanh_n" + std::to_string(n) + (separable ? "_sep" : "_noisy");
      add(p);
    }
  }

  for (Index n : {10, 15, 20, 25, 30}) {
    ProblemSpec p;
    p.type = "barrier";
    p.n = n;
    p.m = n / 3;
    p.name = "barrier_n" + std::to_string(n) + "_m" + std::to_string(p.m);
    add(p);
  }
  return out;
}

std::vector<SuiteEntry> build_suite(const std::vector<ProblemSpec>& manifest) {
  std::vector<SuiteEntry> suite;
  suite.reserve(manifest.size());
  for (const ProblemSpec& spec : manifest) suite.push_back(build_problem(spec));
  return suite;
}

std::vector<SuiteEntry> synth_suite(std::uint64_t seed) { return build_suite(default_manifest(seed)); }

}  // namespace blockqn
