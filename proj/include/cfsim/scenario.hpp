#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfsim/verify.hpp"

namespace cfsim {

// A parsed scenario file: which object, how many processes, which
// construction, per-process workloads, the full schedule plan, and the
// checks to run afterwards.
struct ScenarioConfig {
  std::string name;
  std::string object;
  SequentialSpecPtr spec;
  int n = 0;
  Algorithm algo = Algorithm::cf_uc;
  std::vector<WorkloadSpec> workloads;
  SchedulePlan plan;
  std::vector<ProgressQuery> progress;
  bool lin_check = true;
  size_t max_lin_ops = 10;
  int64_t progress_bound = 512;
};

// Parses the INI-style scenario format. Errors carry file:line positions.
ScenarioConfig parse_scenario(std::istream& in, const std::string& filename);
ScenarioConfig load_scenario(const std::string& path);

RunConfig to_run_config(const ScenarioConfig& sc);

struct ScenarioOutcome {
  ExecutionRecord record;
  std::vector<Verdict> verdicts;
  bool all_hold = true;
};

// One deterministic run plus the scenario's check battery.
ScenarioOutcome run_scenario(const ScenarioConfig& sc,
                             std::optional<uint64_t> seed_override = std::nullopt);

// Deterministic JSON report for a run; identical configs and seeds produce
// byte-identical output (no timestamps, no host data).
std::string report_json(const ScenarioConfig& sc, const ScenarioOutcome& out);

// Every schedule up to `depth` steps, safety checks on each. Progress
// queries are skipped (depth-truncated branches cannot adjudicate them).
struct ExploreOutcome {
  int64_t schedules = 0;
  int64_t quiescent = 0;
  int64_t failures = 0;
  std::vector<std::string> failure_notes;  // first few, with schedule digests
};
ExploreOutcome explore_scenario(const ScenarioConfig& sc, int64_t depth,
                                int64_t record_budget = 5000000);

std::string explore_report_json(const ScenarioConfig& sc, int64_t depth,
                                const ExploreOutcome& out);

}  // namespace cfsim
