#pragma once

#include <vector>

#include "cfsim/sim.hpp"
#include "cfsim/task.hpp"

namespace cfsim {

// Deterministic trace over a set of pairwise-distinct commands: sort by
// (process, seq) and take the trace of that schedule.
Trace trace_of_set(std::vector<Letter> cmds, ConflictRelationPtr rel);

// Per-process client state for the universal constructions. `round` is the
// highest round this process has proposed to (persists across invocations),
// `seq` the per-process command counter.
struct UcProcessState {
  int64_t round = 0;
  int64_t seq = 0;
  Trace adopted;
  bool in_flight = false;
};

// One invocation of operation `op` against the weakly conflict-free
// construction (announce-free; a process may starve while others commit).
SimTask<Value> weak_invoke(World& w, ProcessContext& ctx, UcProcessState& st, int op);

// One invocation against the conflict-free construction (announces the
// command first and folds in everyone's announced commands each round, so
// committers help stragglers).
SimTask<Value> cf_invoke(World& w, ProcessContext& ctx, UcProcessState& st, int op);

}  // namespace cfsim
