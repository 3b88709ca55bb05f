#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cfsim/errors.hpp"
#include "cfsim/oracle.hpp"
#include "cfsim/scenario.hpp"

namespace {

void print_verdicts(const std::vector<cfsim::Verdict>& verdicts) {
  for (const cfsim::Verdict& v : verdicts)
    std::cout << (v.holds ? "PASS" : "FAIL") << "  " << v.name
              << (v.detail.empty() ? "" : "  — " + v.detail) << "\n";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cfsim::ConfigError(path + ": cannot open for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic scheduler and checker for trace-based shared objects"};
  app.require_subcommand(1);

  std::string run_config, run_report;
  std::optional<uint64_t> run_seed;
  CLI::App* cmd_run = app.add_subcommand("run", "run one scenario and check it");
  cmd_run->add_option("--config", run_config, "scenario file")->required();
  cmd_run->add_option("--seed", run_seed, "override the schedule seed");
  cmd_run->add_option("--report", run_report, "write the JSON report to this path");

  std::string x_config, x_report;
  int64_t x_depth = 12;
  int64_t x_budget = 5000000;
  CLI::App* cmd_explore =
      app.add_subcommand("explore", "enumerate every schedule up to a depth and check each");
  cmd_explore->add_option("--config", x_config, "scenario file")->required();
  cmd_explore->add_option("--depth", x_depth, "maximum schedule length (steps)");
  cmd_explore->add_option("--budget", x_budget, "maximum number of schedules");
  cmd_explore->add_option("--report", x_report, "write the JSON report to this path");

  int o_single = 5;
  int o_pairs = 8;
  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "cross-check the trace algebra against brute force");
  cmd_oracle->add_option("--max-len", o_single, "schedule length bound for unary checks");
  cmd_oracle->add_option("--pairs", o_pairs, "combined length bound for pair/set checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const cfsim::ScenarioConfig sc = cfsim::load_scenario(run_config);
      const cfsim::ScenarioOutcome out = cfsim::run_scenario(sc, run_seed);
      std::cout << "scenario: " << sc.name << "  algorithm: " << cfsim::to_string(sc.algo)
                << "  seed: " << out.record.plan.seed << "\n"
                << "steps: " << out.record.steps.size()
                << "  quiescent: " << (out.record.quiescent ? "yes" : "no") << "\n";
      print_verdicts(out.verdicts);
      if (!run_report.empty()) write_file(run_report, cfsim::report_json(sc, out));
      return out.all_hold ? 0 : 1;
    }
    if (cmd_explore->parsed()) {
      const cfsim::ScenarioConfig sc = cfsim::load_scenario(x_config);
      const cfsim::ExploreOutcome out = cfsim::explore_scenario(sc, x_depth, x_budget);
      std::cout << "scenario: " << sc.name << "  depth: " << x_depth << "\n"
                << "schedules: " << out.schedules << "  quiescent: " << out.quiescent
                << "  failures: " << out.failures << "\n";
      for (const std::string& note : out.failure_notes) std::cout << "  " << note << "\n";
      if (!x_report.empty()) write_file(x_report, cfsim::explore_report_json(sc, x_depth, out));
      return out.failures == 0 ? 0 : 1;
    }
    if (cmd_oracle->parsed()) {
      const cfsim::OracleSuiteReport rep = cfsim::oracle_suite(o_single, o_pairs);
      std::cout << "schedules: " << rep.schedules << "  classes: " << rep.classes
                << "\nunary checks: " << rep.unary_checks
                << "  pair checks: " << rep.pair_checks << "  set checks: " << rep.set_checks
                << "\nmismatches: " << rep.mismatches.size() << "\n";
      for (const std::string& m : rep.mismatches) std::cout << "  " << m << "\n";
      return rep.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
