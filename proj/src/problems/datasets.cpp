#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "blockqn/problems.hpp"

namespace blockqn {

namespace {

[[noreturn]] void parse_error(long line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "libsvm line " + std::to_string(line) + ": " + what);
}

// Two labels: smallest -> 0. A single label keeps its sign (positive -> 1).
int label_code(double label, const std::vector<double>& alphabet) {
  if (alphabet.size() == 2) return label == alphabet.front() ? 0 : 1;
  return label > 0.0 ? 1 : 0;
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in, std::optional<Index> n_override) {
  struct Row {
    double label;
    std::vector<std::pair<Index, double>> entries;
  };
  std::vector<Row> rows;
  Index max_index = 0;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    Row row;
    try {
      std::size_t used = 0;
      row.label = std::stod(tok, &used);
      if (used != tok.size()) parse_error(line_no, "bad label '" + tok + "'");
    } catch (const std::logic_error&) {
      parse_error(line_no, "bad label '" + tok + "'");
    }
    Index prev = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_error(line_no, "expected index:value, got '" + tok + "'");
      Index idx = 0;
      double val = 0.0;
      try {
        std::size_t used_i = 0, used_v = 0;
        const std::string is = tok.substr(0, colon), vs = tok.substr(colon + 1);
        idx = std::stoll(is, &used_i);
        val = std::stod(vs, &used_v);
        if (used_i != is.size() || used_v != vs.size()) parse_error(line_no, "malformed pair '" + tok + "'");
      } catch (const std::logic_error&) {
        parse_error(line_no, "malformed pair '" + tok + "'");
      }
      if (idx < 1) parse_error(line_no, "feature index must be >= 1");
      if (idx <= prev) parse_error(line_no, "feature indices must be strictly increasing");
      if (!std::isfinite(val)) parse_error(line_no, "non-finite feature value");
      prev = idx;
      row.entries.emplace_back(idx - 1, val);
    }
    max_index = std::max(max_index, prev);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyDataset, "libsvm: no data points");

  const Index n = n_override.value_or(max_index);
  if (n < 1 || n < max_index) {
    throw Error(ErrorCode::DimensionMismatch, "libsvm: feature count smaller than largest index");
  }

  std::vector<double> alphabet;
  for (const Row& r : rows) alphabet.push_back(r.label);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  if (alphabet.size() > 2) throw Error(ErrorCode::ParseError, "libsvm: more than two distinct labels");

  SparseDataset data;
  data.features.resize(static_cast<Index>(rows.size()), n);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    data.labels.push_back(label_code(rows[i].label, alphabet));
    for (const auto& [j, v] : rows[i].entries) trips.emplace_back(static_cast<Index>(i), j, v);
  }
  data.features.setFromTriplets(trips.begin(), trips.end());
  data.features.makeCompressed();
  return data;
}

SparseDataset parse_libsvm_file(const std::string& path, std::optional<Index> n_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return parse_libsvm(in, n_override);
}

SparseDataset synthetic_dataset(Index m, Index n, double density, bool separable, std::uint64_t seed) {
  if (m < 1 || n < 1 || !(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "synthetic_dataset: bad shape or density");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  VectorXd w_true(n);
  for (Index j = 0; j < n; ++j) w_true(j) = normal(rng);

  SparseDataset data;
  data.features.resize(m, n);
  std::vector<Eigen::Triplet<double>> trips;
  for (Index i = 0; i < m; ++i) {
    double margin = 0.0;
    bool any = false;
    for (Index j = 0; j < n; ++j) {
      if (unif(rng) < density || (j == n - 1 && !any)) {
        const double v = normal(rng);
        trips.emplace_back(i, j, v);
        margin += v * w_true(j);
        any = true;
      }
    }
    int label;
    if (separable) {
      label = margin > 0.0 ? 1 : 0;
    } else {
      const double p = 1.0 / (1.0 + std::exp(-margin));
      label = unif(rng) < p ? 1 : 0;
    }
    data.labels.push_back(label);
  }
  data.features.setFromTriplets(trips.begin(), trips.end());
  data.features.makeCompressed();
  return data;
}

}  // namespace blockqn
