#include "cfsim/uc.hpp"

#include <algorithm>
#include <string>

#include "cfsim/errors.hpp"
#include "cfsim/gca.hpp"

namespace cfsim {

namespace {

// Read all n committed-entry registers (one step each) and keep the entry
// with the highest round; strict comparison makes the lowest-index register
// win ties. Returns the running Task so callers co_await it.
SimTask<CommittedEntry> read_max_committed(World& w, ProcessContext& ctx) {
  CommittedEntry best{-1, Trace()};
  for (int j = 1; j <= w.n; ++j) {
    Action read{Action::Kind::reg_read, w.S[j], 0, {}};
    ActionResult r = co_await mem_step(ctx, std::move(read));
    const auto& entry = std::get<CommittedEntry>(r.value);
    if (entry.round > best.round) best = entry;
  }
  co_return best;
}

Letter fresh_command(ProcessContext& ctx, UcProcessState& st, int op) {
  if (st.in_flight)
    throw ReentrantInvocation("process " + std::to_string(ctx.id) +
                              " invoked while a previous invocation is still running");
  st.in_flight = true;
  ++st.seq;
  return Letter::command(op, ctx.id, st.seq);
}

size_t open_op_record(World& w, ProcessContext& ctx, const Letter& cmd) {
  w.rec.history.push_back(HistoryEvent{false, ctx.id, cmd, Value{}, w.now});
  OpRecord op_rec;
  op_rec.process = ctx.id;
  op_rec.cmd = cmd;
  op_rec.invoked_step = w.now;
  w.rec.op_ledger.push_back(std::move(op_rec));
  return w.rec.op_ledger.size() - 1;
}

void close_op_record(World& w, ProcessContext& ctx, UcProcessState& st, size_t idx,
                     const Letter& cmd, const Value& response, int64_t rounds) {
  w.rec.history.push_back(HistoryEvent{true, ctx.id, cmd, response, w.now});
  w.rec.op_ledger[idx].response_step = w.now;
  w.rec.op_ledger[idx].response = response;
  w.rec.op_ledger[idx].rounds = rounds;
  st.in_flight = false;
}

}  // namespace

Trace trace_of_set(std::vector<Letter> cmds, ConflictRelationPtr rel) {
  std::sort(cmds.begin(), cmds.end(), [](const Letter& a, const Letter& b) {
    return std::pair(a.process, a.seq) < std::pair(b.process, b.seq);
  });
  return Trace::of(cmds, std::move(rel));
}

SimTask<Value> weak_invoke(World& w, ProcessContext& ctx, UcProcessState& st, int op) {
  const Letter cmd = fresh_command(ctx, st, op);
  const size_t op_idx = open_op_record(w, ctx, cmd);

  SimTask<CommittedEntry> first_read = read_max_committed(w, ctx);
  CommittedEntry base = co_await std::move(first_read);
  int64_t r = base.round;
  Trace s = base.trace;
  bool c = false;
  int64_t rounds = 0;

  while (!contains(ops(s), cmd) || !c) {
    ++r;
    if (!contains(ops(s), cmd)) s = append(s, cmd);
    SimTask<GcaResult> propose = gca_propose(w, ctx, r, s);
    GcaResult g = co_await std::move(propose);
    s = g.trace;
    c = g.committed;
    ++rounds;
    st.round = std::max(st.round, r);
  }

  Action publish{Action::Kind::reg_write, w.S[ctx.id], 0, CellValue(CommittedEntry{r, s})};
  co_await mem_step(ctx, std::move(publish));
  w.rec.committed_log.push_back(CommittedWrite{w.now - 1, ctx.id, CommittedEntry{r, s}});

  st.adopted = s;
  const Value response = ret_star(*w.spec, OccurrenceRef{cmd, 1}, s);
  close_op_record(w, ctx, st, op_idx, cmd, response, rounds);
  co_return response;
}

SimTask<Value> cf_invoke(World& w, ProcessContext& ctx, UcProcessState& st, int op) {
  const Letter cmd = fresh_command(ctx, st, op);
  const size_t op_idx = open_op_record(w, ctx, cmd);

  // Announce the command so committers can fold it in on our behalf.
  Action announce{Action::Kind::reg_write, w.M[ctx.id], 0, CellValue(cmd)};
  co_await mem_step(ctx, std::move(announce));

  SimTask<CommittedEntry> first_read = read_max_committed(w, ctx);
  CommittedEntry base = co_await std::move(first_read);
  // The round counter never regresses below rounds this process already
  // proposed to in earlier invocations: an invocation can return without
  // publishing its final round (someone else's committed trace covered its
  // command), and re-proposing to such a round is forbidden.
  int64_t r = std::max(st.round, base.round);
  Trace s = base.trace;
  Trace u = Trace::empty(w.rel);
  int64_t rounds = 0;

  while (!contains(ops(u), cmd)) {
    ++r;
    std::vector<Letter> missing;
    for (int j = 1; j <= w.n; ++j) {
      Action read{Action::Kind::reg_read, w.M[j], 0, {}};
      ActionResult m = co_await mem_step(ctx, std::move(read));
      if (is_bottom(m.value)) continue;
      const Letter announced = std::get<Letter>(m.value);
      if (!contains(ops(s), announced)) missing.push_back(announced);
    }
    s = concat(s, trace_of_set(std::move(missing), w.rel));

    SimTask<GcaResult> propose = gca_propose(w, ctx, r, s);
    GcaResult g = co_await std::move(propose);
    s = g.trace;
    ++rounds;
    st.round = std::max(st.round, r);
    if (g.committed) {
      Action publish{Action::Kind::reg_write, w.S[ctx.id], 0, CellValue(CommittedEntry{r, s})};
      co_await mem_step(ctx, std::move(publish));
      w.rec.committed_log.push_back(CommittedWrite{w.now - 1, ctx.id, CommittedEntry{r, s}});
    }

    SimTask<CommittedEntry> re_read = read_max_committed(w, ctx);
    CommittedEntry latest = co_await std::move(re_read);
    u = latest.trace;
  }

  st.adopted = s;
  const Value response = ret_star(*w.spec, OccurrenceRef{cmd, 1}, u);
  close_op_record(w, ctx, st, op_idx, cmd, response, rounds);
  co_return response;
}

}  // namespace cfsim
