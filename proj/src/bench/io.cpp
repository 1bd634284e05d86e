#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blockqn/bench.hpp"

namespace blockqn {

using nlohmann::json;

namespace {

std::string fmt_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& tok, const std::string& where) {
  if (tok == "inf" || tok == "Inf" || tok == "INF") return kUnsolved;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::ParseError, where + ": bad number '" + tok + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw Error(ErrorCode::ParseError, what + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& what) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ParseError, what + ": key '" + key + "' has the wrong type");
  }
}

json spec_to_json(const ProblemSpec& p) {
  json j = {{"name", p.name}, {"type", p.type}, {"seed", p.seed}};
  if (p.n) j["n"] = p.n;
  if (p.m) j["m"] = p.m;
  if (p.cond != 0.0) j["cond"] = p.cond;
  if (p.type == "logistic" || p.type == "tanh") j["separable"] = p.separable;
  if (p.type == "logistic" || p.type == "libsvm_logistic") j["random_reg"] = p.random_reg;
  if (!p.function.empty()) j["function"] = p.function;
  if (p.type == "benchmark") j["random_x0"] = p.random_x0;
  if (!p.path.empty()) j["path"] = p.path;
  return j;
}

ProblemSpec spec_from_json(const json& j, std::size_t index) {
  const std::string what = "manifest problem " + std::to_string(index);
  if (!j.is_object()) throw Error(ErrorCode::ParseError, what + ": expected an object");
  check_keys(j, {"name", "type", "seed", "n", "m", "cond", "separable", "random_reg", "function", "random_x0", "path"},
             what);
  ProblemSpec p;
  if (!j.contains("type")) throw Error(ErrorCode::ParseError, what + ": missing 'type'");
  read_opt(j, "type", p.type, what);
  read_opt(j, "name", p.name, what);
  read_opt(j, "seed", p.seed, what);
  read_opt(j, "n", p.n, what);
  read_opt(j, "m", p.m, what);
  read_opt(j, "cond", p.cond, what);
  read_opt(j, "separable", p.separable, what);
  read_opt(j, "random_reg", p.random_reg, what);
  read_opt(j, "function", p.function, what);
  read_opt(j, "random_x0", p.random_x0, what);
  read_opt(j, "path", p.path, what);
  if (p.name.empty()) p.name = p.type + "_" + std::to_string(index);
  return p;
}

json config_to_json(const NamedSolver& s) {
  const SolverConfig& c = s.config;
  json j = {{"name", s.name},
            {"method", std::string(to_string(c.method))},
            {"q", c.q},
            {"tau", c.tau},
            {"filter", c.filter},
            {"always_keep_first", c.always_keep_first},
            {"grad_tol", c.grad_tol},
            {"max_steps", c.max_steps},
            {"h0_scale", c.h0_scale},
            {"phi", c.phi},
            {"cautious_eps", c.cautious_eps},
            {"cautious_exponent", c.cautious_exponent},
            {"modified_eps", c.modified_eps},
            {"ls", {{"alpha", c.ls.alpha}, {"beta", c.ls.beta}, {"max_evals", c.ls.max_evals}}}};
  if (c.f_stop) j["f_stop"] = *c.f_stop;
  return j;
}

NamedSolver config_from_json(const json& j, std::size_t index) {
  const std::string what = "solver " + std::to_string(index);
  if (!j.is_object()) throw Error(ErrorCode::ParseError, what + ": expected an object");
  check_keys(j, {"name", "method", "q", "tau", "filter", "always_keep_first", "grad_tol", "f_stop", "max_steps",
                 "h0_scale", "phi", "cautious_eps", "cautious_exponent", "modified_eps", "ls"},
             what);
  NamedSolver s;
  SolverConfig& c = s.config;
  std::string method = "block_bfgs";
  read_opt(j, "method", method, what);
  try {
    c.method = method_from_string(method);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
  read_opt(j, "name", s.name, what);
  if (s.name.empty()) s.name = method;
  read_opt(j, "q", c.q, what);
  read_opt(j, "tau", c.tau, what);
  read_opt(j, "filter", c.filter, what);
  read_opt(j, "always_keep_first", c.always_keep_first, what);
  read_opt(j, "grad_tol", c.grad_tol, what);
  if (j.contains("f_stop") && !j.at("f_stop").is_null()) {
    double f = 0.0;
    read_opt(j, "f_stop", f, what);
    c.f_stop = f;
  }
  read_opt(j, "max_steps", c.max_steps, what);
  read_opt(j, "h0_scale", c.h0_scale, what);
  read_opt(j, "phi", c.phi, what);
  read_opt(j, "cautious_eps", c.cautious_eps, what);
  read_opt(j, "cautious_exponent", c.cautious_exponent, what);
  read_opt(j, "modified_eps", c.modified_eps, what);
  if (j.contains("ls")) {
    const json& ls = j.at("ls");
    check_keys(ls, {"alpha", "beta", "max_evals", "lambda_min", "lambda_max"}, what + " ls");
    read_opt(ls, "alpha", c.ls.alpha, what);
    read_opt(ls, "beta", c.ls.beta, what);
    read_opt(ls, "max_evals", c.ls.max_evals, what);
    read_opt(ls, "lambda_min", c.ls.lambda_min, what);
    read_opt(ls, "lambda_max", c.ls.lambda_max, what);
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
  return s;
}

}  // namespace

void write_costs_csv(const CostMatrix& costs, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "problem";
  for (const auto& s : costs.solvers) out << ',' << s;
  out << '\n';
  for (std::size_t p = 0; p < costs.problems.size(); ++p) {
    out << costs.problems[p];
    for (Index s = 0; s < costs.t.cols(); ++s) out << ',' << fmt_number(costs.t(static_cast<Index>(p), s));
    out << '\n';
  }
}

CostMatrix read_costs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, path.string() + ": empty cost file");
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 2) throw Error(ErrorCode::ParseError, path.string() + ": header needs at least one solver");
  CostMatrix cm;
  cm.solvers.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    const std::string where = path.string() + " line " + std::to_string(line_no);
    if (cells.size() != header.size()) throw Error(ErrorCode::ParseError, where + ": wrong number of columns");
    cm.problems.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(parse_number(cells[i], where));
    rows.push_back(std::move(row));
  }
  cm.t.resize(static_cast<Index>(rows.size()), static_cast<Index>(cm.solvers.size()));
  for (std::size_t p = 0; p < rows.size(); ++p)
    for (std::size_t s = 0; s < cm.solvers.size(); ++s) cm.t(static_cast<Index>(p), static_cast<Index>(s)) = rows[p][s];
  return cm;
}

void write_profile_csv(const std::vector<ProfileCurve>& curves, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "solver,r,rho\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.ratios.size(); ++i) {
      out << c.solver << ',' << fmt_number(c.ratios[i]) << ',' << fmt_number(c.values[i]) << '\n';
    }
  }
}

void write_profile_svg(const std::vector<ProfileCurve>& curves, const std::string& title,
                       const std::filesystem::path& path) {
  constexpr double W = 640, H = 420, left = 60, right = 170, top = 40, bottom = 50;
  constexpr std::array<const char*, 8> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  double max_log = 1.0;
  for (const auto& c : curves)
    for (double r : c.ratios) max_log = std::max(max_log, std::log2(r));
  max_log *= 1.05;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double log_r) { return left + pw * log_r / max_log; };
  auto py = [&](double rho) { return top + ph * (1.0 - rho); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double rho = k / 4.0;
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << num(py(rho)) << "\" x2=\"" << left << "\" y2=\"" << num(py(rho))
        << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << num(py(rho) + 4)
        << "\" text-anchor=\"end\">" << num(rho) << "</text>\n";
  }
  const int ticks = std::max(1, static_cast<int>(std::floor(max_log)));
  const int stride = std::max(1, ticks / 8);
  for (int k = 0; k <= ticks; k += stride) {
    out << "<line x1=\"" << num(px(k)) << "\" y1=\"" << top + ph << "\" x2=\"" << num(px(k)) << "\" y2=\""
        << top + ph + 4 << "\" stroke=\"black\"/><text x=\"" << num(px(k)) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">" << (1LL << std::min(k, 62)) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">performance ratio r (log scale)</text>\n";
  out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2
      << ")\">fraction of problems</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const ProfileCurve& c = curves[i];
    const char* color = colors[i % colors.size()];
    std::string pts = num(px(0)) + "," + num(py(0));
    double prev = 0.0;
    for (std::size_t k = 0; k < c.ratios.size(); ++k) {
      const double x = px(std::log2(c.ratios[k]));
      pts += " " + num(x) + "," + num(py(prev)) + " " + num(x) + "," + num(py(c.values[k]));
      prev = c.values[k];
    }
    pts += " " + num(px(max_log)) + "," + num(py(prev));
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - right + 36 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << W - right + 42 << "\" y=\""
        << ly << "\">" << xml_escape(c.solver) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "step,k,i,f,gnorm,lambda,snorm,costheta,updated,qk\n";
  for (const StepRecord& r : trace.steps) {
    out << r.step << ',' << r.block << ',' << r.inner << ',' << fmt_number(r.f) << ',' << fmt_number(r.gnorm) << ','
        << fmt_number(r.lambda) << ',' << fmt_number(r.snorm) << ',' << fmt_number(r.cos_theta) << ','
        << (r.updated ? 1 : 0) << ',' << r.qk << '\n';
  }
}

std::string trace_summary_json(const RunTrace& trace) {
  json j = {{"termination", std::string(to_string(trace.termination))},
            {"steps", trace.n_steps()},
            {"f0", trace.f0},
            {"f", trace.f},
            {"gnorm0", trace.gnorm0},
            {"gnorm", trace.gnorm},
            {"updates", trace.updates},
            {"resets", trace.resets},
            {"counters",
             {{"f", trace.counters.n_f},
              {"grad", trace.counters.n_grad},
              {"hess_action_cols", trace.counters.n_hess_action_cols}}},
            {"wall_time", trace.wall_time}};
  return j.dump(2);
}

std::vector<ProblemSpec> read_manifest(const std::filesystem::path& path) {
  const json j = read_json(path);
  if (!j.is_object()) throw Error(ErrorCode::ParseError, path.string() + ": manifest must be a JSON object");
  check_keys(j, {"seed", "problems"}, path.string());
  if (!j.contains("problems")) {
    std::uint64_t seed = 42;
    read_opt(j, "seed", seed, path.string());
    return default_manifest(seed);
  }
  const json& arr = j.at("problems");
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, path.string() + ": 'problems' must be an array");
  std::vector<ProblemSpec> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(spec_from_json(arr[i], i));
  std::set<std::string> names;
  for (const auto& p : out) {
    if (!names.insert(p.name).second) throw Error(ErrorCode::ParseError, "manifest: duplicate problem '" + p.name + "'");
  }
  return out;
}

void write_manifest(const std::vector<ProblemSpec>& manifest, std::uint64_t seed, const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& p : manifest) arr.push_back(spec_to_json(p));
  std::ofstream out = open_out(path);
  out << json{{"seed", seed}, {"problems", arr}}.dump(2) << '\n';
}

std::vector<NamedSolver> read_solver_configs(const std::filesystem::path& path) {
  const json j = read_json(path);
  const json* arr = &j;
  if (j.is_object()) {
    check_keys(j, {"solvers"}, path.string());
    if (!j.contains("solvers")) throw Error(ErrorCode::ParseError, path.string() + ": missing 'solvers'");
    arr = &j.at("solvers");
  }
  if (!arr->is_array() || arr->empty()) {
    throw Error(ErrorCode::ParseError, path.string() + ": expected a non-empty list of solvers");
  }
  std::vector<NamedSolver> out;
  for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(config_from_json((*arr)[i], i));
  std::set<std::string> names;
  for (const auto& s : out) {
    if (!names.insert(s.name).second) throw Error(ErrorCode::ParseError, "duplicate solver name '" + s.name + "'");
  }
  return out;
}

std::string solver_configs_json(const std::vector<NamedSolver>& solvers) {
  json arr = json::array();
  for (const auto& s : solvers) arr.push_back(config_to_json(s));
  return arr.dump();
}

std::vector<NamedSolver> default_solvers() {
  std::vector<NamedSolver> out;
  auto add = [&](std::string name, Method m, auto&& tweak) {
    NamedSolver s{std::move(name), SolverConfig{}};
    s.config.method = m;
    tweak(s.config);
    out.push_back(std::move(s));
  };
  add("BFGS", Method::BFGS, [](SolverConfig&) {});
  add("B-BFGS1", Method::BlockBFGS, [](SolverConfig& c) { c.filter = false; });
  add("B-BFGS2", Method::BlockBFGS, [](SolverConfig& c) { c.tau = 1e-3; });
  add("B-BFGS-q1", Method::BlockBFGS, [](SolverConfig& c) { c.q = 1; });
  add("RB-BFGS", Method::RollingBlockBFGS, [](SolverConfig& c) { c.filter = false; });
  add("GD", Method::GradientDescent, [](SolverConfig&) {});
  return out;
}

std::string format_eps(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

}  // namespace blockqn
