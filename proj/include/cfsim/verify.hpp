#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfsim/seq_spec.hpp"
#include "cfsim/sim.hpp"

namespace cfsim {

// Outcome of one check: pass/fail plus a human-readable witness or summary.
struct Verdict {
  std::string name;
  bool holds = true;
  std::string detail;
};

// One operation extracted from the recorded history.
struct OpSpan {
  int process = 0;
  Letter cmd;
  size_t inv_pos = 0;                 // position of the invocation event in the history
  std::optional<size_t> resp_pos;     // position of the response event, if any
  std::optional<Value> response;
  int64_t invoked_step = 0;
  std::optional<int64_t> response_step;
};
std::vector<OpSpan> history_operations(const ExecutionRecord& rec);

// Exact linearizability decision for the recorded invocation/response
// history: completed operations must all be placed, each yielding its
// recorded response; operations without a response may be placed (with any
// legal response) or dropped. Real-time order is the event order of the
// history. Throws SearchBudgetExceeded when the history holds more than
// `max_ops` operations.
Verdict check_linearizable(const ExecutionRecord& rec, const SequentialSpec& spec,
                           size_t max_ops = 10);

// The six commit-adopt contract properties, each aggregated over every round
// of the run: validity (outputs are built from input operations), adoption
// (a committed trace prefixes every output), commitment (compatible inputs
// and full participation force a commit extending some input), convergence
// (outputs are mutually compatible), common-prefix (outputs extend the
// greatest common prefix of the inputs), and weak agreement (identical
// inputs commit everywhere).
std::vector<Verdict> check_gca_properties(const ExecutionRecord& rec);

// Once (x, committed) is returned at round r, every trace returned at any
// round r' >= r extends x.
Verdict check_round_monotonicity(const ExecutionRecord& rec);

// Every completed propose call performs exactly four shared-memory steps;
// an interrupted one performs at most four.
Verdict check_wait_free_proposals(const ExecutionRecord& rec);

// Snapshot scans of each object are totally ordered by their per-cell
// version vectors, and scans with equal versions observed equal views.
Verdict check_snapshot_containment(const ExecutionRecord& rec);

// Every committed-register write matches a committed propose output of the
// same process and round, and per-process committed rounds strictly
// increase.
Verdict check_commit_log_coherence(const ExecutionRecord& rec);

// Replays the longest committed trace: every completed operation's command
// must appear in it with the recorded response, and the trace must admit a
// representative schedule consistent with the real-time order of the
// history (dependence edges plus completion-before-invocation edges are
// acyclic).
Verdict cross_check_responses(const ExecutionRecord& rec, const SequentialSpec& spec);

// Progress obligations, each relative to a plan structure in the record.
enum class ProgressClass {
  eventually_conflict_free,  // after step tau no two pending ops conflict
  solo_suffix,               // a solo window gives one process the run of the place
  conflict_resolving,        // a solo window resolved a conflicting backlog
  conflict_forgetting        // a solo window produced a committed round
};
std::string to_string(ProgressClass c);

struct ProgressQuery {
  ProgressClass cls = ProgressClass::eventually_conflict_free;
  int64_t tau = 0;     // eventually_conflict_free: hypothesis start step
  int window = 0;      // index into plan.solo_windows for the window classes
  int64_t bound = 512; // step budget B
};

// Checks the query's completion claim under deadline bound B, falling back
// to 4B once (the verdict says which bound was met). Throws ScenarioMismatch
// when the record does not exhibit the query's hypothesis (missing window,
// run too short to adjudicate, no committed round in the window, ...).
Verdict check_progress(const ExecutionRecord& rec, const ProgressQuery& q);

// The full battery appropriate for the record's algorithm.
std::vector<Verdict> check_all(const ExecutionRecord& rec, const SequentialSpec& spec,
                               const std::vector<ProgressQuery>& progress = {},
                               size_t max_lin_ops = 10);

}  // namespace cfsim
