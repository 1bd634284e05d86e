#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "blockqn/bench.hpp"

namespace {

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size() || !(v > 0.0)) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--eps", "expected a comma-separated list of positive numbers, got '" + text + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--eps", "empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block quasi-Newton solvers and benchmark harness"};
  app.require_subcommand(1);

  blockqn::RunOptions run;
  std::string metric = "steps", eps_text = "0.2,0.1,0.01", suite_path, solvers_path, out_dir;
  bool no_traces = false;
  auto* run_cmd = app.add_subcommand("run", "Run a solver x problem grid and write costs, profiles and traces");
  run_cmd->add_option("--suite", suite_path, "Problem manifest (JSON); default suite when omitted");
  run_cmd->add_option("--solvers", solvers_path, "Solver configurations (JSON); default line-up when omitted");
  run_cmd->add_option("--metric", metric, "Cost metric")->check(CLI::IsMember({"steps", "cpu"}));
  run_cmd->add_option("--eps", eps_text, "Comma-separated success thresholds");
  run_cmd->add_option("--seed", run.seed, "Seed for the default suite");
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--parallel", run.parallel, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--no-traces", no_traces, "Skip per-run trace files");

  std::string costs_path, profile_out;
  auto* profile_cmd = app.add_subcommand("profile", "Recompute performance profiles from a saved cost matrix");
  profile_cmd->add_option("--costs", costs_path, "costs.csv")->required()->check(CLI::ExistingFile);
  profile_cmd->add_option("--out", profile_out, "Output directory")->required();

  std::string check_suite;
  std::uint64_t check_seed = 42;
  auto* check_cmd = app.add_subcommand("check", "Finite-difference derivative checks on every problem");
  check_cmd->add_option("--suite", check_suite, "Problem manifest (JSON); default suite when omitted");
  check_cmd->add_option("--seed", check_seed, "Seed for the default suite and probe directions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      run.suite = suite_path;
      run.solvers = solvers_path;
      run.out = out_dir;
      run.metric = metric == "cpu" ? blockqn::CostMetric::CpuTime : blockqn::CostMetric::Steps;
      run.eps = parse_eps_list(eps_text);
      run.write_traces = !no_traces;
      blockqn::run_command(run);
      std::cout << "wrote results to " << out_dir << '\n';
    } else if (*profile_cmd) {
      blockqn::profile_command(costs_path, profile_out);
      std::cout << "wrote profile to " << profile_out << '\n';
    } else if (*check_cmd) {
      const auto manifest =
          check_suite.empty() ? blockqn::default_manifest(check_seed) : blockqn::read_manifest(check_suite);
      const auto reports = blockqn::check_command(blockqn::build_suite(manifest), check_seed);
      int failures = 0;
      for (const auto& r : reports) {
        std::printf("%-28s grad %.2e  hess %.2e  %s\n", r.problem.c_str(), r.grad_error, r.hess_error,
                    r.passed ? "ok" : "FAIL");
        failures += r.passed ? 0 : 1;
      }
      std::printf("%d/%zu problems passed\n", int(reports.size()) - failures, reports.size());
      return failures == 0 ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const blockqn::Error& e) {
    std::cerr << "error [" << blockqn::to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
