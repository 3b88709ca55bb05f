#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfsim/memory.hpp"
#include "cfsim/seq_spec.hpp"
#include "cfsim/task.hpp"

namespace cfsim {

enum class Algorithm { weak_uc, cf_uc, gca_direct };
std::string to_string(Algorithm a);

enum class Policy { round_robin, random_policy, scripted };
std::string to_string(Policy p);

struct SoloWindow {
  int process = 0;
  int64_t begin = 0;
  int64_t end = 0;  // half-open [begin, end) in global steps
};

// Everything the adversary is allowed to decide, pinned up front.
struct SchedulePlan {
  Policy policy = Policy::round_robin;
  uint64_t seed = 0;
  std::vector<std::pair<int, int64_t>> crash_points;  // process -> own-step count
  std::vector<SoloWindow> solo_windows;
  int64_t phase_boundary = -1;  // global step after which workloads go conflict-free
  int64_t fairness_bound = 64;  // random policy: max consecutive starvation
  std::vector<int> script;      // scripted policy: process ids, then round-robin
  int64_t max_steps = 20000;
};

// Per-process workload: either an explicit operation list (each optionally
// gated on a global step) or a seeded generator drawing `count` operations
// from `mix` (from `post_mix` once the phase boundary has passed).
struct WorkloadItem {
  int op = 0;
  int64_t not_before = 0;
};
struct WorkloadSpec {
  std::vector<WorkloadItem> items;
  std::vector<int> mix;
  std::vector<int> post_mix;
  int count = 0;
  bool generated() const { return count > 0; }
};

struct StepRecord {
  int64_t index = 0;
  int process = 0;
  Action action;
  ActionResult result;
};

struct HistoryEvent {
  bool response = false;
  int process = 0;
  Letter cmd;   // the command of the invocation this event belongs to
  Value value;  // response payload
  int64_t step = 0;
};

struct GcaProposeRec {
  int64_t round = 0;
  int process = 0;
  Trace input;
  std::optional<GcaResult> output;
  int64_t entry_mark = -1;  // global step count when propose was entered
  int64_t exit_mark = -1;   // global step count right after it returned
};

struct CommittedWrite {
  int64_t step = 0;
  int process = 0;
  CommittedEntry entry;
};

struct OpRecord {
  int process = 0;
  Letter cmd;
  int64_t invoked_step = 0;
  std::optional<int64_t> response_step;
  std::optional<Value> response;
  int64_t rounds = 0;  // commit-adopt instances consumed by this invocation
};

struct ExecutionRecord {
  int n = 0;
  Algorithm algorithm = Algorithm::weak_uc;
  SchedulePlan plan;
  std::vector<StepRecord> steps;
  std::vector<HistoryEvent> history;
  std::vector<GcaProposeRec> gca_ledger;
  std::vector<CommittedWrite> committed_log;
  std::vector<OpRecord> op_ledger;
  std::vector<int64_t> crashed_at;  // indexed by process id; -1 = never
  bool quiescent = false;
  int64_t total_steps = 0;

  bool crashed(int process) const { return crashed_at[process] >= 0; }
  // Deterministic full serialization; equal digests == bit-identical records.
  std::string digest(const SequentialSpec& spec) const;
};

// Shared state of one run, visible to the process coroutines.
struct World {
  SequentialSpecPtr spec;
  ConflictRelationPtr rel;
  int n = 0;
  Algorithm algo = Algorithm::weak_uc;
  Memory mem;
  std::vector<int> S;  // S[i]: per-process committed-entry register (1-based)
  std::vector<int> M;  // M[i]: per-process announcement register (cf-uc only)
  ExecutionRecord rec;
  int64_t now = 0;  // performed steps so far == next step index

  struct GcaObjects {
    int A = -1;
    int B = -1;
    uint32_t proposed = 0;  // bitmask of processes that already proposed
  };
  std::map<int64_t, GcaObjects> gca;
  GcaObjects& gca_instance(int64_t round);
};

struct RunConfig {
  SequentialSpecPtr spec;
  int n = 0;
  Algorithm algo = Algorithm::weak_uc;
  std::vector<WorkloadSpec> workloads;  // size n for the universal constructions
  std::vector<Trace> gca_inputs;        // size n for gca_direct: round-1 proposals
  SchedulePlan plan;
};

// Deterministic single-"thread" interleaving run under the plan's policy.
// Identical configs produce bit-identical records.
ExecutionRecord run(const RunConfig& cfg);

// Same machinery, but every scheduling decision is delegated to `choose`,
// which receives the sorted list of runnable process ids and the step index.
// Runs for at most `depth` steps.
ExecutionRecord run_with_chooser(const RunConfig& cfg,
                                 const std::function<int(const std::vector<int>&, int64_t)>& choose,
                                 int64_t depth);

// Depth-first enumeration of every schedule up to `depth` steps (branches that
// quiesce earlier stop earlier). Calls `visit` once per maximal schedule.
// Throws ExplorationBudgetExceeded past `record_budget` records.
int64_t exhaustive_interleavings(const RunConfig& cfg, int64_t depth,
                                 const std::function<void(const ExecutionRecord&)>& visit,
                                 int64_t record_budget = 5000000);

}  // namespace cfsim
