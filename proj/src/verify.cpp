#include "cfsim/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_set>

#include "cfsim/errors.hpp"
#include "cfsim/trace.hpp"

namespace cfsim {

namespace {

std::string cmd_label(const Letter& l) {
  std::ostringstream os;
  os << "op" << l.op << "#p" << l.process << "." << l.seq;
  return os.str();
}

std::string cmd_label(const SequentialSpec& spec, const Letter& l) {
  std::ostringstream os;
  os << spec.op_name(l.op) << "#p" << l.process << "." << l.seq;
  return os.str();
}

}  // namespace

std::vector<OpSpan> history_operations(const ExecutionRecord& rec) {
  std::vector<OpSpan> out;
  std::map<Letter, size_t> open;
  for (size_t pos = 0; pos < rec.history.size(); ++pos) {
    const HistoryEvent& e = rec.history[pos];
    if (!e.response) {
      OpSpan span;
      span.process = e.process;
      span.cmd = e.cmd;
      span.inv_pos = pos;
      span.invoked_step = e.step;
      open[e.cmd] = out.size();
      out.push_back(std::move(span));
    } else {
      auto it = open.find(e.cmd);
      if (it == open.end())
        throw UsageError("history holds a response without an invocation: " + cmd_label(e.cmd));
      OpSpan& span = out[it->second];
      span.resp_pos = pos;
      span.response = e.value;
      span.response_step = e.step;
      open.erase(it);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linearizability

namespace {

struct LinKey {
  uint32_t mask;
  Value state;
  bool operator==(const LinKey& o) const { return mask == o.mask && state == o.state; }
};
struct LinKeyHash {
  size_t operator()(const LinKey& k) const {
    return std::hash<uint32_t>()(k.mask) * 1000003u ^ ValueHash()(k.state);
  }
};

}  // namespace

Verdict check_linearizable(const ExecutionRecord& rec, const SequentialSpec& spec,
                           size_t max_ops) {
  Verdict v{"linearizable", true, ""};
  const std::vector<OpSpan> ops = history_operations(rec);
  const size_t n = ops.size();
  if (n == 0) {
    v.detail = "empty history";
    return v;
  }
  if (n > max_ops)
    throw SearchBudgetExceeded("history holds " + std::to_string(n) +
                               " operations, search bounded at " + std::to_string(max_ops));

  // precedes[j] = bitmask of operations that returned before op j was invoked.
  std::vector<uint32_t> precedes(n, 0);
  uint32_t completed_mask = 0;
  size_t completed = 0;
  for (size_t j = 0; j < n; ++j) {
    if (ops[j].response.has_value()) {
      completed_mask |= 1u << j;
      ++completed;
    }
    for (size_t i = 0; i < n; ++i)
      if (i != j && ops[i].resp_pos.has_value() && *ops[i].resp_pos < ops[j].inv_pos)
        precedes[j] |= 1u << i;
  }

  std::unordered_set<LinKey, LinKeyHash> dead;
  std::vector<size_t> order;
  std::function<bool(uint32_t, const Value&)> dfs = [&](uint32_t mask,
                                                        const Value& state) -> bool {
    if ((mask & completed_mask) == completed_mask) return true;
    if (!dead.insert(LinKey{mask, state}).second) return false;
    for (size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) continue;
      if ((precedes[i] & ~mask) != 0) continue;  // a real-time predecessor is unplaced
      auto [resp, next] = spec.apply(ops[i].cmd.op, state);
      if (ops[i].response.has_value() && !(resp == *ops[i].response)) continue;
      order.push_back(i);
      if (dfs(mask | (1u << i), next)) return true;
      order.pop_back();
    }
    return false;
  };

  if (dfs(0, spec.initial)) {
    std::ostringstream os;
    os << completed << " completed / " << n - completed << " pending; order:";
    for (size_t i : order) os << " " << cmd_label(spec, ops[i].cmd);
    v.detail = os.str();
    return v;
  }
  std::ostringstream os;
  os << "no legal order for " << completed << " completed operations (" << n - completed
     << " pending considered)";
  v.holds = false;
  v.detail = os.str();
  return v;
}

// ---------------------------------------------------------------------------
// Commit-adopt contract

namespace {

using RoundRecs = std::map<int64_t, std::vector<const GcaProposeRec*>>;

RoundRecs by_round(const ExecutionRecord& rec) {
  RoundRecs out;
  for (const GcaProposeRec& g : rec.gca_ledger) out[g.round].push_back(&g);
  return out;
}

void fail(Verdict& v, const std::string& msg) {
  v.holds = false;
  if (!v.detail.empty()) v.detail += "; ";
  if (v.detail.size() < 400) v.detail += msg;
}

}  // namespace

std::vector<Verdict> check_gca_properties(const ExecutionRecord& rec) {
  Verdict validity{"gca-validity", true, ""};
  Verdict adoption{"gca-adoption", true, ""};
  Verdict commitment{"gca-commitment", true, ""};
  Verdict convergence{"gca-convergence", true, ""};
  Verdict common_prefix{"gca-common-prefix", true, ""};
  Verdict weak_agreement{"gca-weak-agreement", true, ""};

  int64_t rounds_seen = 0;
  for (const auto& [round, recs] : by_round(rec)) {
    ++rounds_seen;
    const std::string rtag = "round " + std::to_string(round);

    std::vector<Trace> inputs;
    std::vector<const GcaProposeRec*> returned;
    for (const GcaProposeRec* g : recs) {
      inputs.push_back(g->input);
      if (g->output.has_value()) returned.push_back(g);
    }
    const bool full_participation = returned.size() == recs.size();

    // Validity: multiset of output operations bounded by the pointwise max
    // of the input multisets.
    OpsMultiset bound;
    for (const Trace& s : inputs) bound = multiset_union_max(bound, ops(s));
    for (const GcaProposeRec* g : returned)
      if (!multiset_subset(ops(g->output->trace), bound))
        fail(validity, rtag + ": p" + std::to_string(g->process) +
                           " returned operations outside the inputs");

    // Adoption: every committed output prefixes every output.
    for (const GcaProposeRec* g : returned) {
      if (!g->output->committed) continue;
      for (const GcaProposeRec* h : returned)
        if (!is_prefix(g->output->trace, h->output->trace))
          fail(adoption, rtag + ": p" + std::to_string(g->process) + " committed but p" +
                             std::to_string(h->process) + " returned a non-extension");
    }

    // Commitment: compatible inputs + full participation force some process
    // to commit an extension of its own input.
    if (full_participation && compatible(inputs)) {
      bool some = false;
      for (const GcaProposeRec* g : returned)
        if (g->output->committed && is_prefix(g->input, g->output->trace)) some = true;
      if (!some) fail(commitment, rtag + ": compatible inputs, everyone returned, nobody committed an extension of its input");
    }

    // Convergence: returned traces mutually compatible.
    {
      std::vector<Trace> outs;
      for (const GcaProposeRec* g : returned) outs.push_back(g->output->trace);
      if (!compatible(outs)) fail(convergence, rtag + ": outputs are not compatible");
    }

    // Common prefix: outputs extend the greatest common prefix of all inputs.
    if (!inputs.empty()) {
      const Trace g0 = glb(inputs);
      for (const GcaProposeRec* g : returned)
        if (!is_prefix(g0, g->output->trace))
          fail(common_prefix, rtag + ": p" + std::to_string(g->process) +
                                  " dropped part of the common input prefix");
    }

    // Weak agreement: identical inputs commit everywhere.
    bool all_equal = true;
    for (const Trace& s : inputs)
      if (s != inputs.front()) all_equal = false;
    if (all_equal) {
      for (const GcaProposeRec* g : returned)
        if (!g->output->committed)
          fail(weak_agreement,
               rtag + ": identical inputs but p" + std::to_string(g->process) + " adopted");
    }
  }

  const std::string summary = std::to_string(rounds_seen) + " round(s)";
  for (Verdict* v :
       {&validity, &adoption, &commitment, &convergence, &common_prefix, &weak_agreement})
    if (v->holds) v->detail = summary;
  return {validity, adoption, commitment, convergence, common_prefix, weak_agreement};
}

Verdict check_round_monotonicity(const ExecutionRecord& rec) {
  Verdict v{"round-monotonicity", true, ""};
  // Ascending rounds; `base` is the longest trace committed so far. The
  // committed traces must form a prefix chain, and every output must extend
  // the chain's state as of its round.
  Trace base;
  int64_t checked = 0;
  for (const auto& [round, recs] : by_round(rec)) {
    std::vector<const GcaProposeRec*> returned;
    for (const GcaProposeRec* g : recs)
      if (g->output.has_value()) returned.push_back(g);
    for (const GcaProposeRec* g : returned) {
      ++checked;
      if (!is_prefix(base, g->output->trace)) {
        fail(v, "round " + std::to_string(round) + ": p" + std::to_string(g->process) +
                    " returned a trace not extending the committed trace of an earlier round");
        return v;
      }
    }
    // Same-round committed traces against every same-round output.
    for (const GcaProposeRec* g : returned) {
      if (!g->output->committed) continue;
      for (const GcaProposeRec* h : returned)
        if (!is_prefix(g->output->trace, h->output->trace)) {
          fail(v, "round " + std::to_string(round) + ": committed trace of p" +
                      std::to_string(g->process) + " not extended by the output of p" +
                      std::to_string(h->process));
          return v;
        }
      if (is_prefix(base, g->output->trace) && g->output->trace.size() >= base.size())
        base = g->output->trace;
    }
  }
  v.detail = std::to_string(checked) + " returned propose(s)";
  return v;
}

Verdict check_wait_free_proposals(const ExecutionRecord& rec) {
  Verdict v{"wait-free-proposals", true, ""};
  std::map<int, std::vector<int64_t>> own_steps;  // process -> sorted step indices
  for (const StepRecord& s : rec.steps) own_steps[s.process].push_back(s.index);
  int64_t completed = 0;
  int64_t interrupted = 0;
  for (const GcaProposeRec& g : rec.gca_ledger) {
    const std::vector<int64_t>& idx = own_steps[g.process];
    auto lo = std::lower_bound(idx.begin(), idx.end(), g.entry_mark);
    long count;
    if (g.output.has_value()) {
      auto hi = std::lower_bound(idx.begin(), idx.end(), g.exit_mark);
      count = hi - lo;
      ++completed;
      if (count != 4)
        fail(v, "p" + std::to_string(g.process) + " round " + std::to_string(g.round) +
                    " completed a propose in " + std::to_string(count) + " steps (want 4)");
    } else {
      count = idx.end() - lo;
      ++interrupted;
      if (count > 4)
        fail(v, "p" + std::to_string(g.process) + " round " + std::to_string(g.round) +
                    " took " + std::to_string(count) + " steps without returning");
    }
  }
  if (v.holds) {
    v.detail = std::to_string(completed) + " propose(s), 4 steps each";
    if (interrupted > 0) v.detail += "; " + std::to_string(interrupted) + " interrupted";
  }
  return v;
}

Verdict check_snapshot_containment(const ExecutionRecord& rec) {
  Verdict v{"snapshot-containment", true, ""};
  std::map<int, const StepRecord*> last_scan;  // object -> previous scan
  int64_t scans = 0;
  for (const StepRecord& s : rec.steps) {
    if (s.action.kind != Action::Kind::snap_scan) continue;
    ++scans;
    auto it = last_scan.find(s.action.obj);
    if (it != last_scan.end()) {
      const StepRecord& prev = *it->second;
      bool dominates = prev.result.versions.size() == s.result.versions.size();
      bool equal = dominates;
      for (size_t c = 0; dominates && c < s.result.versions.size(); ++c) {
        if (s.result.versions[c] < prev.result.versions[c]) dominates = false;
        if (s.result.versions[c] != prev.result.versions[c]) equal = false;
      }
      if (!dominates)
        fail(v, "object " + std::to_string(s.action.obj) + ": scan at step " +
                    std::to_string(s.index) + " lost writes visible at step " +
                    std::to_string(prev.index));
      else if (equal && !(prev.result.view == s.result.view))
        fail(v, "object " + std::to_string(s.action.obj) + ": scans at steps " +
                    std::to_string(prev.index) + " and " + std::to_string(s.index) +
                    " agree on versions but not on content");
    }
    last_scan[s.action.obj] = &s;
  }
  if (v.holds) v.detail = std::to_string(scans) + " scan(s) totally ordered";
  return v;
}

Verdict check_commit_log_coherence(const ExecutionRecord& rec) {
  Verdict v{"commit-log-coherence", true, ""};
  std::map<std::pair<int, int64_t>, const GcaProposeRec*> committed;
  for (const GcaProposeRec& g : rec.gca_ledger)
    if (g.output.has_value() && g.output->committed) committed[{g.process, g.round}] = &g;

  std::map<int, int64_t> last_round;
  for (const CommittedWrite& cw : rec.committed_log) {
    auto it = committed.find({cw.process, cw.entry.round});
    if (it == committed.end()) {
      fail(v, "p" + std::to_string(cw.process) + " wrote round " +
                  std::to_string(cw.entry.round) + " without committing it");
      continue;
    }
    const GcaProposeRec& g = *it->second;
    if (!(g.output->trace == cw.entry.trace))
      fail(v, "p" + std::to_string(cw.process) + " wrote a trace differing from its round-" +
                  std::to_string(cw.entry.round) + " commit");
    if (cw.step < g.exit_mark)
      fail(v, "p" + std::to_string(cw.process) + " wrote round " +
                  std::to_string(cw.entry.round) + " before the propose returned");
    auto lr = last_round.find(cw.process);
    if (lr != last_round.end() && cw.entry.round <= lr->second)
      fail(v, "p" + std::to_string(cw.process) + " committed rounds out of order");
    last_round[cw.process] = cw.entry.round;
  }
  if (v.holds) v.detail = std::to_string(rec.committed_log.size()) + " committed write(s)";
  return v;
}

Verdict cross_check_responses(const ExecutionRecord& rec, const SequentialSpec& spec) {
  Verdict v{"response-cross-check", true, ""};
  const std::vector<OpSpan> spans = history_operations(rec);

  const CommittedWrite* longest = nullptr;
  for (const CommittedWrite& cw : rec.committed_log)
    if (!longest || cw.entry.round > longest->entry.round) longest = &cw;

  size_t completed = 0;
  for (const OpSpan& s : spans)
    if (s.response.has_value()) ++completed;

  if (!longest) {
    if (completed > 0)
      fail(v, "operations completed but nothing was ever committed");
    else
      v.detail = "no committed trace, no completed operation";
    return v;
  }
  const Trace& t = longest->entry.trace;

  // Every completed operation's command is in the longest committed trace
  // and replaying that trace reproduces the recorded response.
  const OpsMultiset t_ops = ops(t);
  for (const OpSpan& s : spans) {
    if (!s.response.has_value()) continue;
    if (!contains(t_ops, s.cmd)) {
      fail(v, cmd_label(spec, s.cmd) + " completed but is missing from the committed trace");
      continue;
    }
    const Value want = ret_star(spec, OccurrenceRef{s.cmd, 1}, t);
    if (!(want == *s.response))
      fail(v, cmd_label(spec, s.cmd) + " responded " + to_string(*s.response) +
                  " but the committed trace yields " + to_string(want));
  }

  // The committed trace admits a representative schedule respecting the
  // real-time order: dependence edges (conflicting pairs keep their trace
  // order) plus completion-before-invocation edges must be acyclic.
  const Schedule& canon = t.canonical();
  std::map<Letter, size_t> node;
  for (size_t i = 0; i < canon.size(); ++i) {
    if (node.count(canon[i])) {
      fail(v, "committed trace repeats command " + cmd_label(spec, canon[i]));
      return v;
    }
    node[canon[i]] = i;
  }
  std::vector<std::vector<size_t>> adj(canon.size());
  std::vector<int> indeg(canon.size(), 0);
  auto add_edge = [&](size_t a, size_t b) {
    adj[a].push_back(b);
    ++indeg[b];
  };
  if (!canon.empty()) {
    const ConflictRelation& crel = *t.relation();
    for (size_t i = 0; i < canon.size(); ++i)
      for (size_t j = i + 1; j < canon.size(); ++j)
        if (crel.conflicts(canon[i].op, canon[j].op)) add_edge(i, j);
  }
  for (const OpSpan& a : spans) {
    if (!a.resp_pos.has_value()) continue;
    auto na = node.find(a.cmd);
    if (na == node.end()) continue;
    for (const OpSpan& b : spans) {
      auto nb = node.find(b.cmd);
      if (nb == node.end() || na->second == nb->second) continue;
      if (*a.resp_pos < b.inv_pos) add_edge(na->second, nb->second);
    }
  }
  std::vector<size_t> queue;
  for (size_t i = 0; i < canon.size(); ++i)
    if (indeg[i] == 0) queue.push_back(i);
  size_t seen = 0;
  while (!queue.empty()) {
    const size_t x = queue.back();
    queue.pop_back();
    ++seen;
    for (size_t y : adj[x])
      if (--indeg[y] == 0) queue.push_back(y);
  }
  if (seen != canon.size())
    fail(v, "no representative of the committed trace respects the real-time order");

  if (v.holds)
    v.detail = std::to_string(completed) + " completed op(s) against a committed trace of " +
               std::to_string(t.size()) + " command(s)";
  return v;
}

// ---------------------------------------------------------------------------
// Progress

std::string to_string(ProgressClass c) {
  switch (c) {
    case ProgressClass::eventually_conflict_free: return "eventually-conflict-free";
    case ProgressClass::solo_suffix: return "solo-suffix";
    case ProgressClass::conflict_resolving: return "conflict-resolving";
    case ProgressClass::conflict_forgetting: return "conflict-forgetting";
  }
  return "?";
}

namespace {

// Does every operation of `process` (or of all correct processes when
// process == 0) complete by max(anchor, invoked) + bound?
struct ClaimOutcome {
  bool ok = true;
  std::string witness;
  int64_t latest_deadline = 0;
};

ClaimOutcome deadline_claim(const ExecutionRecord& rec, int process, int64_t anchor,
                            int64_t bound) {
  ClaimOutcome out;
  for (const OpRecord& op : rec.op_ledger) {
    if (process != 0 && op.process != process) continue;
    if (process == 0 && rec.crashed(op.process)) continue;
    const int64_t deadline = std::max(anchor, op.invoked_step) + bound;
    out.latest_deadline = std::max(out.latest_deadline, deadline);
    const bool met = op.response_step.has_value() && *op.response_step <= deadline;
    if (!met && out.ok) {
      out.ok = false;
      out.witness = cmd_label(op.cmd) + " of p" + std::to_string(op.process) +
                    (op.response_step.has_value()
                         ? " responded at step " + std::to_string(*op.response_step)
                         : " never responded") +
                    ", deadline " + std::to_string(deadline);
    }
  }
  return out;
}

// Can this record adjudicate a claim whose latest deadline is `deadline`?
bool adjudicable(const ExecutionRecord& rec, int64_t deadline) {
  return rec.quiescent || rec.total_steps > deadline;
}

}  // namespace

Verdict check_progress(const ExecutionRecord& rec, const ProgressQuery& q) {
  Verdict v{"progress-" + to_string(q.cls), true, ""};
  if (q.bound <= 0) throw ScenarioMismatch("progress bound must be positive");

  const bool window_based = q.cls != ProgressClass::eventually_conflict_free;
  SoloWindow win;
  if (window_based) {
    if (q.window < 0 || q.window >= static_cast<int>(rec.plan.solo_windows.size()))
      throw ScenarioMismatch("progress query names solo window " + std::to_string(q.window) +
                             " but the plan has " +
                             std::to_string(rec.plan.solo_windows.size()));
    win = rec.plan.solo_windows[static_cast<size_t>(q.window)];
    if (rec.crashed(win.process))
      throw ScenarioMismatch("solo-window process p" + std::to_string(win.process) +
                             " crashed; the window hypothesis needs it correct");
  }

  // Hypothesis checks that are structural rather than deadline-based.
  if (q.cls == ProgressClass::conflict_resolving) {
    int64_t in_window = 0;
    for (const OpRecord& op : rec.op_ledger)
      if (op.process == win.process && op.response_step.has_value() &&
          *op.response_step >= win.begin && *op.response_step < win.end)
        ++in_window;
    if (in_window < 2)
      throw ScenarioMismatch(
          "conflict-resolving hypothesis needs at least two operations of p" +
          std::to_string(win.process) + " completing inside the solo window, saw " +
          std::to_string(in_window));
  }
  if (q.cls == ProgressClass::conflict_forgetting) {
    bool committed_in_window = false;
    for (const CommittedWrite& cw : rec.committed_log)
      if (cw.process == win.process && cw.step >= win.begin && cw.step < win.end)
        committed_in_window = true;
    if (!committed_in_window)
      throw ScenarioMismatch("conflict-forgetting hypothesis needs a committed write by p" +
                             std::to_string(win.process) + " inside the solo window");
  }

  // Universal claims check all correct processes; existential ones look for
  // one correct process whose operations all meet the deadline.
  const auto evaluate = [&](int64_t bound) -> ClaimOutcome {
    switch (q.cls) {
      case ProgressClass::eventually_conflict_free: {
        if (rec.algorithm == Algorithm::cf_uc) return deadline_claim(rec, 0, q.tau, bound);
        // Weak guarantee: some correct process completes all of its operations.
        ClaimOutcome best;
        best.ok = false;
        best.witness = "no correct process completed all of its operations in time";
        bool any = false;
        for (int p = 1; p <= rec.n; ++p) {
          if (rec.crashed(p)) continue;
          bool has_ops = false;
          for (const OpRecord& op : rec.op_ledger)
            if (op.process == p) has_ops = true;
          if (!has_ops) continue;
          any = true;
          ClaimOutcome c = deadline_claim(rec, p, q.tau, bound);
          best.latest_deadline = std::max(best.latest_deadline, c.latest_deadline);
          if (c.ok) {
            best.ok = true;
            best.witness = "p" + std::to_string(p) + " completed all of its operations in time";
          }
        }
        if (!any)
          throw ScenarioMismatch("no correct process invoked any operation; nothing to check");
        return best;
      }
      case ProgressClass::solo_suffix:
        return deadline_claim(rec, win.process, win.begin, bound);
      case ProgressClass::conflict_resolving:
        return deadline_claim(rec, 0, win.end, bound);
      case ProgressClass::conflict_forgetting: {
        ClaimOutcome best;
        best.ok = false;
        best.witness = "no correct process completed all of its operations in time";
        bool any = false;
        for (int p = 1; p <= rec.n; ++p) {
          if (rec.crashed(p)) continue;
          bool has_ops = false;
          for (const OpRecord& op : rec.op_ledger)
            if (op.process == p) has_ops = true;
          if (!has_ops) continue;
          any = true;
          ClaimOutcome c = deadline_claim(rec, p, win.end, bound);
          best.latest_deadline = std::max(best.latest_deadline, c.latest_deadline);
          if (c.ok) {
            best.ok = true;
            best.witness = "p" + std::to_string(p) + " completed all of its operations in time";
          }
        }
        if (!any)
          throw ScenarioMismatch("no correct process invoked any operation; nothing to check");
        return best;
      }
    }
    throw std::logic_error("unreachable progress class");
  };

  ClaimOutcome first = evaluate(q.bound);
  if (!adjudicable(rec, first.latest_deadline))
    throw ScenarioMismatch("run ended at step " + std::to_string(rec.total_steps) +
                           " before the progress deadline " +
                           std::to_string(first.latest_deadline) + " and is not quiescent");
  if (first.ok) {
    v.detail = "met within bound " + std::to_string(q.bound) +
               (first.witness.empty() ? "" : "; " + first.witness);
    return v;
  }
  ClaimOutcome second = evaluate(4 * q.bound);
  if (second.ok && adjudicable(rec, second.latest_deadline)) {
    v.detail = "missed bound " + std::to_string(q.bound) + " but met 4x bound " +
               std::to_string(4 * q.bound) +
               (second.witness.empty() ? "" : "; " + second.witness);
    return v;
  }
  v.holds = false;
  v.detail = first.witness;
  return v;
}

std::vector<Verdict> check_all(const ExecutionRecord& rec, const SequentialSpec& spec,
                               const std::vector<ProgressQuery>& progress, size_t max_lin_ops) {
  std::vector<Verdict> out;
  out.push_back(check_linearizable(rec, spec, max_lin_ops));
  for (Verdict& v : check_gca_properties(rec)) out.push_back(std::move(v));
  out.push_back(check_round_monotonicity(rec));
  out.push_back(check_wait_free_proposals(rec));
  out.push_back(check_snapshot_containment(rec));
  if (rec.algorithm != Algorithm::gca_direct) {
    out.push_back(check_commit_log_coherence(rec));
    out.push_back(cross_check_responses(rec, spec));
  }
  for (const ProgressQuery& q : progress) out.push_back(check_progress(rec, q));
  return out;
}

}  // namespace cfsim
