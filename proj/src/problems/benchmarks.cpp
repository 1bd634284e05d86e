// Unconstrained test functions from the Andrei / CUTEst collections.
//
// Each function is written as a sum of element functions of a few variables.
// An element reports its value, local gradient and local Hessian; the sink
// scatters them into f, the gradient, a Hessian action or the dense Hessian.

#include <array>
#include <cmath>
#include <random>

#include "blockqn/problems.hpp"

namespace blockqn {

namespace {

template <int K>
using LVec = Eigen::Matrix<double, K, 1>;
template <int K>
using LMat = Eigen::Matrix<double, K, K>;

class ElementSink {
 public:
  ElementSink(VectorXd* grad, const MatrixXd* dirs, MatrixXd* action, MatrixXd* hess)
      : grad_(grad), dirs_(dirs), action_(action), hess_(hess) {}

  template <int K>
  void add(const std::array<Index, K>& idx, double val, const LVec<K>& g, const LMat<K>& h) {
    f_ += val;
    if (grad_) {
      for (int a = 0; a < K; ++a) (*grad_)(idx[a]) += g(a);
    }
    if (action_) {
      for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
          if (h(a, b) != 0.0) action_->row(idx[a]) += h(a, b) * dirs_->row(idx[b]);
    }
    if (hess_) {
      for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b) (*hess_)(idx[a], idx[b]) += h(a, b);
    }
  }

  void constant(double c) { f_ += c; }

  /// Element h(u(x)) for a scalar inner function u with gradient du and
  /// Hessian d2u: grad = h' du, Hessian = h'' du du^T + h' d2u.
  template <int K>
  void compose(const std::array<Index, K>& idx, double h0, double h1, double h2, const LVec<K>& du,
               const LMat<K>& d2u) {
    add<K>(idx, h0, h1 * du, h2 * du * du.transpose() + h1 * d2u);
  }

  /// weight * r^2.
  template <int K>
  void square(const std::array<Index, K>& idx, double weight, double r, const LVec<K>& dr,
              const LMat<K>& d2r) {
    compose<K>(idx, weight * r * r, 2.0 * weight * r, 2.0 * weight, dr, d2r);
  }

  double value() const { return f_; }

 private:
  double f_ = 0.0;
  VectorXd* grad_;
  const MatrixXd* dirs_;
  MatrixXd* action_;
  MatrixXd* hess_;
};

LVec<1> v1(double a) { return LVec<1>(a); }
LMat<1> m1(double a) { return LMat<1>::Constant(a); }
LVec<2> v2(double a, double b) { return LVec<2>(a, b); }
LMat<2> m2(double a, double b, double c, double d) {
  LMat<2> m;
  m << a, b, c, d;
  return m;
}

// arwhead: sum_{i<n} (-4 x_i + 3) + (x_i^2 + x_n^2)^2
void arwhead(const VectorXd& x, ElementSink& e) {
  const Index n = x.size();
  const double b = x(n - 1);
  for (Index i = 0; i + 1 < n; ++i) {
    const double a = x(i), u = a * a + b * b;
    e.add<2>({i, n - 1}, -4.0 * a + 3.0 + u * u, v2(-4.0 + 4.0 * u * a, 4.0 * u * b),
             m2(4.0 * u + 8.0 * a * a, 8.0 * a * b, 8.0 * a * b, 4.0 * u + 8.0 * b * b));
  }
}

// bdqrtic: sum_{i<=n-4} (-4 x_i + 3)^2 + (x_i^2 + 2x_{i+1}^2 + 3x_{i+2}^2 + 4x_{i+3}^2 + 5x_n^2)^2
void bdqrtic(const VectorXd& x, ElementSink& e) {
  const Index n = x.size();
  for (Index i = 0; i + 4 < n; ++i) {
    e.square<1>({i}, 1.0, -4.0 * x(i) + 3.0, v1(-4.0), m1(0.0));
    const std::array<Index, 5> idx{i, i + 1, i + 2, i + 3, n - 1};
    double r = 0.0;
    LVec<5> dr;
    LMat<5> d2r = LMat<5>::Zero();
    for (int j = 0; j < 5; ++j) {
      const double c = j + 1.0, xj = x(idx[j]);
      r += c * xj * xj;
      dr(j) = 2.0 * c * xj;
      d2r(j, j) = 2.0 * c;
    }
    e.square<5>(idx, 1.0, r, dr, d2r);
  }
}

// cube: (x_1 - 1)^2 + sum_{i>=2} 100 (x_i - x_{i-1}^3)^2
void cube(const VectorXd& x, ElementSink& e) {
  e.square<1>({0}, 1.0, x(0) - 1.0, v1(1.0), m1(0.0));
  for (Index i = 1; i < x.size(); ++i) {
    const double p = x(i - 1);
    e.square<2>({i - 1, i}, 100.0, x(i) - p * p * p, v2(-3.0 * p * p, 1.0), m2(-6.0 * p, 0, 0, 0));
  }
}

// dixonprice: (x_1 - 1)^2 + sum_{i>=2} i (2 x_i^2 - x_{i-1})^2
void dixonprice(const VectorXd& x, ElementSink& e) {
  e.square<1>({0}, 1.0, x(0) - 1.0, v1(1.0), m1(0.0));
  for (Index i = 1; i < x.size(); ++i) {
    e.square<2>({i - 1, i}, double(i + 1), 2.0 * x(i) * x(i) - x(i - 1), v2(-1.0, 4.0 * x(i)),
                m2(0, 0, 0, 4.0));
  }
}

// edensch: 16 + sum_{i<n} (x_i - 2)^4 + (x_i x_{i+1} - 2 x_{i+1})^2 + (x_{i+1} + 1)^2
void edensch(const VectorXd& x, ElementSink& e) {
  e.constant(16.0);
  for (Index i = 0; i + 1 < x.size(); ++i) {
    const double t = x(i) - 2.0;
    e.compose<1>({i}, t * t * t * t, 4.0 * t * t * t, 12.0 * t * t, v1(1.0), m1(0.0));
    e.square<2>({i, i + 1}, 1.0, x(i) * x(i + 1) - 2.0 * x(i + 1), v2(x(i + 1), x(i) - 2.0),
                m2(0, 1.0, 1.0, 0));
    e.square<1>({i + 1}, 1.0, x(i + 1) + 1.0, v1(1.0), m1(0.0));
  }
}

// eg2: sum_{i<n} sin(x_1 + x_i^2 - 1) + sin(x_n^2) / 2
void eg2(const VectorXd& x, ElementSink& e) {
  const Index n = x.size();
  {
    const double u = x(0) + x(0) * x(0) - 1.0;
    e.compose<1>({0}, std::sin(u), std::cos(u), -std::sin(u), v1(1.0 + 2.0 * x(0)), m1(2.0));
  }
  for (Index i = 1; i + 1 < n; ++i) {
    const double u = x(0) + x(i) * x(i) - 1.0;
    e.compose<2>({0, i}, std::sin(u), std::cos(u), -std::sin(u), v2(1.0, 2.0 * x(i)), m2(0, 0, 0, 2.0));
  }
  const double u = x(n - 1) * x(n - 1);
  e.compose<1>({n - 1}, 0.5 * std::sin(u), 0.5 * std::cos(u), -0.5 * std::sin(u), v1(2.0 * x(n - 1)),
               m1(2.0));
}

// fletchcr: sum_{i<n} 100 (x_{i+1} - x_i + 1 - x_i^2)^2
void fletchcr(const VectorXd& x, ElementSink& e) {
  for (Index i = 0; i + 1 < x.size(); ++i) {
    e.square<2>({i, i + 1}, 100.0, x(i + 1) - x(i) + 1.0 - x(i) * x(i), v2(-1.0 - 2.0 * x(i), 1.0),
                m2(-2.0, 0, 0, 0));
  }
}

// raydan1: sum_i (i / 10) (exp(x_i) - x_i)
void raydan1(const VectorXd& x, ElementSink& e) {
  for (Index i = 0; i < x.size(); ++i) {
    const double c = double(i + 1) / 10.0, ex = std::exp(x(i));
    e.add<1>({i}, c * (ex - x(i)), v1(c * (ex - 1.0)), m1(c * ex));
  }
}

// extended rosenbrock: sum over pairs 100 (x_{2i} - x_{2i-1}^2)^2 + (1 - x_{2i-1})^2
void rosenbrock(const VectorXd& x, ElementSink& e) {
  for (Index j = 0; j + 1 < x.size(); j += 2) {
    const double a = x(j), b = x(j + 1);
    e.square<2>({j, j + 1}, 100.0, b - a * a, v2(-2.0 * a, 1.0), m2(-2.0, 0, 0, 0));
    e.square<1>({j}, 1.0, 1.0 - a, v1(-1.0), m1(0.0));
  }
}

// sinquad: (x_1 - 1)^4 + sum_{i=2}^{n-1} (sin(x_i - x_n) - x_1^2 + x_i^2)^2 + (x_n^2 - x_1^2)^2
void sinquad(const VectorXd& x, ElementSink& e) {
  const Index n = x.size();
  const double t = x(0) - 1.0;
  e.compose<1>({0}, t * t * t * t, 4.0 * t * t * t, 12.0 * t * t, v1(1.0), m1(0.0));
  for (Index i = 1; i + 1 < n; ++i) {
    const double d = x(i) - x(n - 1), sd = std::sin(d), cd = std::cos(d);
    const double r = sd - x(0) * x(0) + x(i) * x(i);
    LVec<3> dr(-2.0 * x(0), cd + 2.0 * x(i), -cd);
    LMat<3> d2r;
    d2r << -2.0, 0.0, 0.0,
           0.0, 2.0 - sd, sd,
           0.0, sd, -sd;
    e.square<3>({0, i, n - 1}, 1.0, r, dr, d2r);
  }
  e.square<2>({0, n - 1}, 1.0, x(n - 1) * x(n - 1) - x(0) * x(0), v2(-2.0 * x(0), 2.0 * x(n - 1)),
              m2(-2.0, 0, 0, 2.0));
}

// tointgss: sum_{i<=n-2} (10/(n+2) + x_{i+2}^2) (2 - exp(-(x_i - x_{i+1})^2 / (0.1 + x_{i+2}^2)))
void tointgss(const VectorXd& x, ElementSink& e) {
  const Index n = x.size();
  const double c0 = 10.0 / double(n + 2);
  for (Index i = 0; i + 2 < n; ++i) {
    const double a = x(i), b = x(i + 1), c = x(i + 2);
    const double p = c0 + c * c, q = 0.1 + c * c, d = a - b;
    const double w = d * d / q, ew = std::exp(-w);
    // phi = p * h(w), h(w) = 2 - exp(-w)
    const double h = 2.0 - ew, h1 = ew, h2 = -ew;
    const LVec<3> dp(0.0, 0.0, 2.0 * c);
    LMat<3> d2p = LMat<3>::Zero();
    d2p(2, 2) = 2.0;
    const LVec<3> dw(2.0 * d / q, -2.0 * d / q, -2.0 * c * d * d / (q * q));
    LMat<3> d2w;
    const double ac = -4.0 * d * c / (q * q);
    const double cc = -d * d * (2.0 / (q * q) - 8.0 * c * c / (q * q * q));
    d2w << 2.0 / q, -2.0 / q, ac,
           -2.0 / q, 2.0 / q, -ac,
           ac, -ac, cc;
    const LVec<3> grad = h * dp + p * h1 * dw;
    const LMat<3> hess = h * d2p + h1 * (dp * dw.transpose() + dw * dp.transpose()) +
                         p * (h2 * dw * dw.transpose() + h1 * d2w);
    e.add<3>({i, i + 1, i + 2}, p * h, grad, hess);
  }
}

// trid: sum_i (x_i - 1)^2 - sum_{i>=2} x_i x_{i-1}
void trid(const VectorXd& x, ElementSink& e) {
  for (Index i = 0; i < x.size(); ++i) e.square<1>({i}, 1.0, x(i) - 1.0, v1(1.0), m1(0.0));
  for (Index i = 1; i < x.size(); ++i) {
    e.add<2>({i - 1, i}, -x(i - 1) * x(i), v2(-x(i), -x(i - 1)), m2(0, -1.0, -1.0, 0));
  }
}

// double well: sum_i x_i^4 - x_i^2, stationary points 0 and +-1/sqrt(2)
void double_well(const VectorXd& x, ElementSink& e) {
  for (Index i = 0; i < x.size(); ++i) {
    const double t = x(i);
    e.add<1>({i}, t * t * t * t - t * t, v1(4.0 * t * t * t - 2.0 * t), m1(12.0 * t * t - 2.0));
  }
}

using ElementFn = void (*)(const VectorXd&, ElementSink&);

ElementFn element_fn(BenchmarkFunction f) {
  switch (f) {
    case BenchmarkFunction::Arwhead: return arwhead;
    case BenchmarkFunction::Bdqrtic: return bdqrtic;
    case BenchmarkFunction::Cube: return cube;
    case BenchmarkFunction::DixonPrice: return dixonprice;
    case BenchmarkFunction::Edensch: return edensch;
    case BenchmarkFunction::Eg2: return eg2;
    case BenchmarkFunction::Fletchcr: return fletchcr;
    case BenchmarkFunction::Raydan1: return raydan1;
    case BenchmarkFunction::Rosenbrock: return rosenbrock;
    case BenchmarkFunction::Sinquad: return sinquad;
    case BenchmarkFunction::Tointgss: return tointgss;
    case BenchmarkFunction::Trid: return trid;
    case BenchmarkFunction::DoubleWell: return double_well;
  }
  throw Error(ErrorCode::UnknownFunction, "unknown benchmark function");
}

class ElementObjective final : public Objective {
 public:
  ElementObjective(BenchmarkFunction f, Index n) : fn_(element_fn(f)), n_(n) {}

  Index dim() const override { return n_; }

  double value(const VectorXd& x) const override {
    check(x);
    ElementSink sink(nullptr, nullptr, nullptr, nullptr);
    fn_(x, sink);
    return sink.value();
  }
  VectorXd gradient(const VectorXd& x) const override {
    check(x);
    VectorXd g = VectorXd::Zero(n_);
    ElementSink sink(&g, nullptr, nullptr, nullptr);
    fn_(x, sink);
    return g;
  }
  MatrixXd hess_action(const VectorXd& x, const MatrixXd& v) const override {
    check(x);
    if (v.rows() != n_) throw Error(ErrorCode::DimensionMismatch, "hess_action: directions have wrong size");
    MatrixXd out = MatrixXd::Zero(n_, v.cols());
    ElementSink sink(nullptr, &v, &out, nullptr);
    fn_(x, sink);
    return out;
  }
  std::optional<MatrixXd> hessian(const VectorXd& x) const override {
    check(x);
    MatrixXd h = MatrixXd::Zero(n_, n_);
    ElementSink sink(nullptr, nullptr, nullptr, &h);
    fn_(x, sink);
    return h;
  }

 private:
  void check(const VectorXd& x) const {
    if (x.size() != n_) throw Error(ErrorCode::DimensionMismatch, "benchmark: point has wrong dimension");
  }

  ElementFn fn_;
  Index n_;
};

struct BenchmarkInfo {
  BenchmarkFunction fn;
  std::string_view name;
  Index min_dim;
  double random_scale;
};

constexpr std::array<BenchmarkInfo, 13> kBenchmarks{{
    {BenchmarkFunction::Arwhead, "arwhead", 2, 1.0},
    {BenchmarkFunction::Bdqrtic, "bdqrtic", 5, 1.0},
    {BenchmarkFunction::Cube, "cube", 2, 1.0},
    {BenchmarkFunction::DixonPrice, "dixonprice", 2, 1.0},
    {BenchmarkFunction::Edensch, "edensch", 2, 1.0},
    {BenchmarkFunction::Eg2, "eg2", 2, 1.0},
    {BenchmarkFunction::Fletchcr, "fletchcr", 2, 1.0},
    {BenchmarkFunction::Raydan1, "raydan1", 1, 1.0},
    {BenchmarkFunction::Rosenbrock, "rosenbrock", 2, 2.0},
    {BenchmarkFunction::Sinquad, "sinquad", 3, 1.0},
    {BenchmarkFunction::Tointgss, "tointgss", 3, 3.0},
    {BenchmarkFunction::Trid, "trid", 2, 1.0},
    {BenchmarkFunction::DoubleWell, "double_well", 1, 1.0},
}};

const BenchmarkInfo& info(BenchmarkFunction f) {
  for (const auto& b : kBenchmarks)
    if (b.fn == f) return b;
  throw Error(ErrorCode::UnknownFunction, "unknown benchmark function");
}

}  // namespace

std::string_view to_string(BenchmarkFunction f) noexcept {
  for (const auto& b : kBenchmarks)
    if (b.fn == f) return b.name;
  return "unknown";
}

BenchmarkFunction benchmark_from_string(std::string_view name) {
  for (const auto& b : kBenchmarks)
    if (b.name == name) return b.fn;
  throw Error(ErrorCode::UnknownFunction, "unknown benchmark function '" + std::string(name) + "'");
}

const std::vector<BenchmarkFunction>& all_benchmarks() {
  static const std::vector<BenchmarkFunction> all = [] {
    std::vector<BenchmarkFunction> v;
    for (const auto& b : kBenchmarks) v.push_back(b.fn);
    return v;
  }();
  return all;
}

bool benchmark_dimension_ok(BenchmarkFunction f, Index n) {
  if (n < info(f).min_dim) return false;
  return f != BenchmarkFunction::Rosenbrock || n % 2 == 0;
}

std::unique_ptr<Objective> benchmark_oracle(BenchmarkFunction f, Index n) {
  if (!benchmark_dimension_ok(f, n)) {
    throw Error(ErrorCode::BadDimension, "benchmark " + std::string(to_string(f)) + ": invalid dimension " +
                                             std::to_string(n));
  }
  return std::make_unique<ElementObjective>(f, n);
}

std::unique_ptr<Objective> benchmark_oracle(std::string_view name, Index n) {
  return benchmark_oracle(benchmark_from_string(name), n);
}

VectorXd standard_start(BenchmarkFunction f, Index n) {
  switch (f) {
    case BenchmarkFunction::Cube:
    case BenchmarkFunction::Rosenbrock: {
      VectorXd x(n);
      for (Index i = 0; i < n; ++i) x(i) = i % 2 == 0 ? -1.2 : 1.0;
      return x;
    }
    case BenchmarkFunction::Edensch:
    case BenchmarkFunction::Fletchcr: return VectorXd::Zero(n);
    case BenchmarkFunction::Sinquad:
    case BenchmarkFunction::DoubleWell: return VectorXd::Constant(n, 0.1);
    case BenchmarkFunction::Tointgss: return VectorXd::Constant(n, 3.0);
    default: return VectorXd::Ones(n);
  }
}

VectorXd random_start(BenchmarkFunction f, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double scale = info(f).random_scale;
  std::uniform_real_distribution<double> unif(-scale, scale);
  VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = unif(rng);
  return x;
}

}  // namespace blockqn
