#include "cfsim/sim.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cfsim/errors.hpp"
#include "cfsim/gca.hpp"
#include "cfsim/uc.hpp"

namespace cfsim {

// ---------------------------------------------------------------------------
// Memory

int Memory::create_register(const std::string& name, CellValue initial) {
  if (by_name_.count(name)) throw UsageError("duplicate memory object name '" + name + "'");
  Object obj;
  obj.name = name;
  obj.snapshot = false;
  obj.cells.push_back(std::move(initial));
  obj.versions.push_back(0);
  objects_.push_back(std::move(obj));
  const int id = static_cast<int>(objects_.size()) - 1;
  by_name_.emplace(name, id);
  return id;
}

int Memory::create_snapshot(const std::string& name, int cells) {
  if (by_name_.count(name)) throw UsageError("duplicate memory object name '" + name + "'");
  if (cells <= 0) throw UsageError("snapshot object needs at least one cell");
  Object obj;
  obj.name = name;
  obj.snapshot = true;
  obj.cells.assign(static_cast<size_t>(cells), CellValue{});
  obj.versions.assign(static_cast<size_t>(cells), 0);
  objects_.push_back(std::move(obj));
  const int id = static_cast<int>(objects_.size()) - 1;
  by_name_.emplace(name, id);
  return id;
}

int Memory::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

ActionResult Memory::perform(const Action& a) {
  if (a.obj < 0 || a.obj >= static_cast<int>(objects_.size()))
    throw UsageError("action names a nonexistent memory object");
  Object& obj = objects_[static_cast<size_t>(a.obj)];
  ActionResult res;
  switch (a.kind) {
    case Action::Kind::reg_read:
      if (obj.snapshot) throw UsageError("register read on snapshot object '" + obj.name + "'");
      res.value = obj.cells[0];
      break;
    case Action::Kind::reg_write:
      if (obj.snapshot) throw UsageError("register write on snapshot object '" + obj.name + "'");
      obj.cells[0] = a.value;
      ++obj.versions[0];
      break;
    case Action::Kind::snap_update: {
      if (!obj.snapshot) throw UsageError("cell update on register '" + obj.name + "'");
      if (a.cell < 0 || a.cell >= static_cast<int>(obj.cells.size()))
        throw UsageError("cell index out of range for '" + obj.name + "'");
      obj.cells[static_cast<size_t>(a.cell)] = a.value;
      ++obj.versions[static_cast<size_t>(a.cell)];
      break;
    }
    case Action::Kind::snap_scan:
      if (!obj.snapshot) throw UsageError("scan on register '" + obj.name + "'");
      res.view = obj.cells;
      res.versions = obj.versions;
      break;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Small enum helpers

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::weak_uc: return "weak-uc";
    case Algorithm::cf_uc: return "cf-uc";
    case Algorithm::gca_direct: return "gca";
  }
  return "?";
}

std::string to_string(Policy p) {
  switch (p) {
    case Policy::round_robin: return "round-robin";
    case Policy::random_policy: return "random";
    case Policy::scripted: return "scripted";
  }
  return "?";
}

World::GcaObjects& World::gca_instance(int64_t round) {
  auto it = gca.find(round);
  if (it != gca.end()) return it->second;
  GcaObjects obj;
  obj.A = mem.create_snapshot("gcaA." + std::to_string(round), n);
  obj.B = mem.create_snapshot("gcaB." + std::to_string(round), n);
  return gca.emplace(round, obj).first->second;
}

// ---------------------------------------------------------------------------
// Record digest

namespace {

void show_letter(std::ostream& os, const SequentialSpec& spec, const Letter& l) {
  os << spec.op_name(l.op);
  if (l.is_command()) os << "#p" << l.process << "." << l.seq;
}

void show_trace(std::ostream& os, const SequentialSpec& spec, const Trace& t) {
  os << "[";
  bool first = true;
  for (const Letter& l : t.canonical()) {
    if (!first) os << " ";
    first = false;
    show_letter(os, spec, l);
  }
  os << "]";
}

void show_cell(std::ostream& os, const SequentialSpec& spec, const CellValue& v) {
  if (std::holds_alternative<std::monostate>(v)) {
    os << "_";
  } else if (const Trace* t = std::get_if<Trace>(&v)) {
    show_trace(os, spec, *t);
  } else if (const BEntry* b = std::get_if<BEntry>(&v)) {
    os << "(";
    show_trace(os, spec, b->trace);
    os << "," << (b->flag ? "T" : "F") << ")";
  } else if (const CommittedEntry* c = std::get_if<CommittedEntry>(&v)) {
    os << "(r" << c->round << ",";
    show_trace(os, spec, c->trace);
    os << ")";
  } else if (const Letter* l = std::get_if<Letter>(&v)) {
    show_letter(os, spec, *l);
  }
}

const char* kind_name(Action::Kind k) {
  switch (k) {
    case Action::Kind::reg_read: return "read";
    case Action::Kind::reg_write: return "write";
    case Action::Kind::snap_update: return "update";
    case Action::Kind::snap_scan: return "scan";
  }
  return "?";
}

}  // namespace

std::string ExecutionRecord::digest(const SequentialSpec& spec) const {
  std::ostringstream os;
  os << "n=" << n << " algo=" << cfsim::to_string(algorithm)
     << " policy=" << cfsim::to_string(plan.policy) << " seed=" << plan.seed
     << " phase=" << plan.phase_boundary << " fair=" << plan.fairness_bound
     << " max=" << plan.max_steps << "\n";
  os << "crash:";
  for (const auto& [p, k] : plan.crash_points) os << " " << p << "@" << k;
  os << "\nsolo:";
  for (const SoloWindow& wdw : plan.solo_windows)
    os << " " << wdw.process << ":" << wdw.begin << "-" << wdw.end;
  os << "\nscript:";
  for (int p : plan.script) os << " " << p;
  os << "\n";
  for (const StepRecord& s : steps) {
    os << "s" << s.index << " p" << s.process << " " << kind_name(s.action.kind) << " o"
       << s.action.obj << " c" << s.action.cell << " w=";
    show_cell(os, spec, s.action.value);
    os << " r=";
    show_cell(os, spec, s.result.value);
    os << " v=[";
    for (size_t i = 0; i < s.result.view.size(); ++i) {
      if (i) os << " ";
      show_cell(os, spec, s.result.view[i]);
    }
    os << "] ver=[";
    for (size_t i = 0; i < s.result.versions.size(); ++i) {
      if (i) os << " ";
      os << s.result.versions[i];
    }
    os << "]\n";
  }
  for (const HistoryEvent& e : history) {
    os << (e.response ? "ret" : "inv") << " p" << e.process << " ";
    show_letter(os, spec, e.cmd);
    if (e.response) os << " -> " << cfsim::to_string(e.value);
    os << " @" << e.step << "\n";
  }
  for (const GcaProposeRec& g : gca_ledger) {
    os << "propose r" << g.round << " p" << g.process << " in=";
    show_trace(os, spec, g.input);
    if (g.output.has_value()) {
      os << " out=";
      show_trace(os, spec, g.output->trace);
      os << (g.output->committed ? " commit" : " adopt");
    } else {
      os << " out=?";
    }
    os << " [" << g.entry_mark << "," << g.exit_mark << ")\n";
  }
  for (const CommittedWrite& c : committed_log) {
    os << "commit s" << c.step << " p" << c.process << " r" << c.entry.round << " ";
    show_trace(os, spec, c.entry.trace);
    os << "\n";
  }
  for (const OpRecord& o : op_ledger) {
    os << "op p" << o.process << " ";
    show_letter(os, spec, o.cmd);
    os << " inv@" << o.invoked_step;
    if (o.response_step.has_value()) os << " ret@" << *o.response_step;
    if (o.response.has_value()) os << " = " << cfsim::to_string(*o.response);
    os << " rounds=" << o.rounds << "\n";
  }
  os << "crashed:";
  for (size_t i = 1; i < crashed_at.size(); ++i)
    if (crashed_at[i] >= 0) os << " p" << i << "@" << crashed_at[i];
  os << "\nquiescent=" << (quiescent ? 1 : 0) << " total=" << total_steps << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Process programs

namespace {

Fiber uc_fiber(World& w, ProcessContext& ctx, UcProcessState& st, const WorkloadSpec& ws,
               uint64_t seed) {
  if (ws.generated()) {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < ws.count; ++k) {
      const bool post = w.rec.plan.phase_boundary >= 0 && w.now >= w.rec.plan.phase_boundary &&
                        !ws.post_mix.empty();
      const std::vector<int>& mix = post ? ws.post_mix : ws.mix;
      const int op = mix[static_cast<size_t>(rng() % mix.size())];
      SimTask<Value> call = w.algo == Algorithm::weak_uc ? weak_invoke(w, ctx, st, op)
                                                         : cf_invoke(w, ctx, st, op);
      co_await std::move(call);
    }
  } else {
    for (const WorkloadItem& item : ws.items) {
      if (item.not_before > w.now) co_await GateAwait{ctx, item.not_before};
      SimTask<Value> call = w.algo == Algorithm::weak_uc ? weak_invoke(w, ctx, st, item.op)
                                                         : cf_invoke(w, ctx, st, item.op);
      co_await std::move(call);
    }
  }
}

Fiber gca_fiber(World& w, ProcessContext& ctx, Trace input) {
  SimTask<GcaResult> propose = gca_propose(w, ctx, 1, std::move(input));
  GcaResult g = co_await std::move(propose);
  (void)g;
}

struct ProcessMachine {
  ProcessContext ctx;
  UcProcessState uc;
  Fiber fiber;
  bool started = false;
  int64_t steps_taken = 0;
  int64_t crash_point = -1;  // own-step count after which the process stops; -1 = never
  bool crashed = false;
  int64_t starve = 0;
};

uint64_t seed_for(uint64_t base, int pid) {
  return base ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(pid));
}

using Chooser = std::function<int(const std::vector<int>&, int64_t)>;

class Simulation {
 public:
  explicit Simulation(const RunConfig& cfg) {
    validate(cfg);
    w_.spec = cfg.spec;
    w_.rel = cfg.spec->conflicts;
    w_.n = cfg.n;
    w_.algo = cfg.algo;
    w_.rec.n = cfg.n;
    w_.rec.algorithm = cfg.algo;
    w_.rec.plan = cfg.plan;
    w_.rec.crashed_at.assign(static_cast<size_t>(cfg.n) + 1, -1);

    w_.S.assign(static_cast<size_t>(cfg.n) + 1, -1);
    for (int i = 1; i <= cfg.n; ++i)
      w_.S[static_cast<size_t>(i)] = w_.mem.create_register(
          "S." + std::to_string(i), CellValue(CommittedEntry{0, Trace::empty(w_.rel)}));
    if (cfg.algo == Algorithm::cf_uc) {
      w_.M.assign(static_cast<size_t>(cfg.n) + 1, -1);
      for (int i = 1; i <= cfg.n; ++i)
        w_.M[static_cast<size_t>(i)] =
            w_.mem.create_register("M." + std::to_string(i), CellValue{});
    }

    procs_.reserve(static_cast<size_t>(cfg.n) + 1);
    procs_.push_back(nullptr);  // 1-based
    for (int i = 1; i <= cfg.n; ++i) {
      auto m = std::make_unique<ProcessMachine>();
      m->ctx.id = i;
      for (const auto& [p, k] : cfg.plan.crash_points)
        if (p == i) m->crash_point = k;
      if (cfg.algo == Algorithm::gca_direct)
        m->fiber = gca_fiber(w_, m->ctx, cfg.gca_inputs[static_cast<size_t>(i - 1)]);
      else
        m->fiber = uc_fiber(w_, m->ctx, m->uc, cfg.workloads[static_cast<size_t>(i - 1)],
                            seed_for(cfg.plan.seed, i));
      m->fiber.bind(m->ctx);
      if (m->crash_point == 0) {
        m->crashed = true;
        w_.rec.crashed_at[static_cast<size_t>(i)] = 0;
      }
      procs_.push_back(std::move(m));
    }
  }

  ExecutionRecord run(const Chooser* chooser, int64_t depth) {
    for (;;) {
      if (w_.now >= depth) break;
      admin_pass();
      std::vector<int> cand = candidates();
      if (cand.empty()) {
        if (all_terminal()) break;
        const int64_t gate = earliest_gate();
        if (gate < 0) throw std::logic_error("live processes but nothing runnable or gated");
        if (gate >= depth) break;
        w_.now = gate;  // idle until the earliest workload gate opens
        continue;
      }
      const int pid = pick(cand, chooser);
      step(pid);
    }
    w_.rec.quiescent = all_terminal();
    w_.rec.total_steps = w_.now;
    return std::move(w_.rec);
  }

 private:
  static void validate(const RunConfig& cfg) {
    if (!cfg.spec) throw UsageError("run config needs a sequential object");
    if (cfg.n < 1 || cfg.n > 32) throw UsageError("process count must be in [1, 32]");
    const int num_ops = static_cast<int>(cfg.spec->op_names.size());
    if (cfg.algo == Algorithm::gca_direct) {
      if (static_cast<int>(cfg.gca_inputs.size()) != cfg.n)
        throw UsageError("gca mode needs one input trace per process");
    } else {
      if (static_cast<int>(cfg.workloads.size()) != cfg.n)
        throw UsageError("need exactly one workload per process");
      for (const WorkloadSpec& ws : cfg.workloads) {
        if (ws.generated()) {
          if (ws.mix.empty()) throw UsageError("generated workload needs a non-empty mix");
          for (int op : ws.mix)
            if (op < 0 || op >= num_ops) throw UsageError("workload mix op out of range");
          for (int op : ws.post_mix)
            if (op < 0 || op >= num_ops) throw UsageError("workload post-mix op out of range");
        } else {
          for (const WorkloadItem& it : ws.items) {
            if (it.op < 0 || it.op >= num_ops) throw UsageError("workload op out of range");
            if (it.not_before < 0) throw UsageError("workload gate must be non-negative");
          }
        }
      }
    }
    for (const auto& [p, k] : cfg.plan.crash_points)
      if (p < 1 || p > cfg.n || k < 0) throw UsageError("crash point out of range");
    for (const SoloWindow& wdw : cfg.plan.solo_windows)
      if (wdw.process < 1 || wdw.process > cfg.n || wdw.begin < 0 || wdw.end < wdw.begin)
        throw UsageError("solo window out of range");
    for (int p : cfg.plan.script)
      if (p < 1 || p > cfg.n) throw UsageError("script process id out of range");
    if (cfg.plan.max_steps < 0) throw UsageError("max steps must be non-negative");
    if (cfg.plan.fairness_bound < 1) throw UsageError("fairness bound must be positive");
  }

  void after_resume(ProcessMachine& m) {
    if (m.ctx.failure) {
      std::exception_ptr f = m.ctx.failure;
      m.ctx.failure = nullptr;
      std::rethrow_exception(f);
    }
  }

  // Start not-yet-started processes and release satisfied gates, in process
  // order, until nothing changes. Runs local computation only.
  void admin_pass() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 1; i <= w_.n; ++i) {
        ProcessMachine& m = *procs_[static_cast<size_t>(i)];
        if (m.crashed || m.ctx.done) continue;
        if (!m.started) {
          m.started = true;
          m.fiber.resume();
          after_resume(m);
          changed = true;
        } else if (!m.ctx.pending && m.ctx.gate_resume && m.ctx.gate <= w_.now) {
          std::coroutine_handle<> h = m.ctx.gate_resume;
          m.ctx.gate_resume = nullptr;
          m.ctx.gate = -1;
          h.resume();
          after_resume(m);
          changed = true;
        }
      }
    }
  }

  std::vector<int> candidates() const {
    std::vector<int> cand;
    for (int i = 1; i <= w_.n; ++i) {
      const ProcessMachine& m = *procs_[static_cast<size_t>(i)];
      if (m.crashed || m.ctx.done || !m.ctx.pending) continue;
      cand.push_back(i);
    }
    if (cand.empty()) return cand;
    // The first solo window covering this step restricts scheduling to its
    // process — but only if that process can actually act.
    for (const SoloWindow& wdw : w_.rec.plan.solo_windows) {
      if (w_.now < wdw.begin || w_.now >= wdw.end) continue;
      if (std::find(cand.begin(), cand.end(), wdw.process) != cand.end()) cand = {wdw.process};
      break;
    }
    return cand;
  }

  bool all_terminal() const {
    for (int i = 1; i <= w_.n; ++i) {
      const ProcessMachine& m = *procs_[static_cast<size_t>(i)];
      if (!m.crashed && !m.ctx.done) return false;
    }
    return true;
  }

  int64_t earliest_gate() const {
    int64_t best = -1;
    for (int i = 1; i <= w_.n; ++i) {
      const ProcessMachine& m = *procs_[static_cast<size_t>(i)];
      if (m.crashed || m.ctx.done || !m.ctx.gate_resume) continue;
      if (m.ctx.gate > w_.now && (best < 0 || m.ctx.gate < best)) best = m.ctx.gate;
    }
    return best;
  }

  int pick(const std::vector<int>& cand, const Chooser* chooser) {
    int pid = -1;
    if (chooser) {
      pid = (*chooser)(cand, w_.now);
      if (std::find(cand.begin(), cand.end(), pid) == cand.end())
        throw UsageError("chooser returned a process that is not runnable");
    } else {
      switch (w_.rec.plan.policy) {
        case Policy::round_robin: pid = pick_rr(cand); break;
        case Policy::random_policy: pid = pick_random(cand); break;
        case Policy::scripted: pid = pick_scripted(cand); break;
      }
    }
    for (int i = 1; i <= w_.n; ++i) {
      ProcessMachine& m = *procs_[static_cast<size_t>(i)];
      if (i == pid)
        m.starve = 0;
      else if (m.ctx.pending && !m.crashed && !m.ctx.done)
        ++m.starve;
    }
    return pid;
  }

  int pick_rr(const std::vector<int>& cand) {
    for (int k = 1; k <= w_.n; ++k) {
      const int pid = (rr_last_ + k - 1) % w_.n + 1;
      if (std::find(cand.begin(), cand.end(), pid) != cand.end()) {
        rr_last_ = pid;
        return pid;
      }
    }
    throw std::logic_error("round-robin found no candidate");
  }

  int pick_random(const std::vector<int>& cand) {
    if (!rng_.has_value()) rng_.emplace(w_.rec.plan.seed);
    int forced = -1;
    int64_t worst = w_.rec.plan.fairness_bound - 1;
    for (int pid : cand) {
      const int64_t s = procs_[static_cast<size_t>(pid)]->starve;
      if (s > worst) {
        worst = s;
        forced = pid;
      }
    }
    if (forced != -1) return forced;
    return cand[static_cast<size_t>((*rng_)() % cand.size())];
  }

  int pick_scripted(const std::vector<int>& cand) {
    while (script_pos_ < w_.rec.plan.script.size()) {
      const int pid = w_.rec.plan.script[script_pos_++];
      if (std::find(cand.begin(), cand.end(), pid) != cand.end()) return pid;
    }
    return pick_rr(cand);
  }

  // Perform the chosen process's pending shared-memory action (its
  // linearization point), then resume it — unless this step hits its crash
  // point, in which case the action takes effect but the process never
  // observes the result.
  void step(int pid) {
    ProcessMachine& m = *procs_[static_cast<size_t>(pid)];
    ProcessContext::Request* req = m.ctx.pending;
    m.ctx.pending = nullptr;
    ActionResult res = w_.mem.perform(req->action);
    w_.rec.steps.push_back(StepRecord{w_.now, pid, req->action, res});
    req->result = std::move(res);
    ++w_.now;
    ++m.steps_taken;
    if (m.crash_point >= 0 && m.steps_taken >= m.crash_point) {
      m.crashed = true;
      w_.rec.crashed_at[static_cast<size_t>(pid)] = w_.now - 1;
      return;
    }
    req->resume.resume();
    after_resume(m);
  }

  World w_;
  std::vector<std::unique_ptr<ProcessMachine>> procs_;
  int rr_last_ = 0;
  size_t script_pos_ = 0;
  std::optional<std::mt19937_64> rng_;
};

}  // namespace

ExecutionRecord run(const RunConfig& cfg) {
  Simulation sim(cfg);
  return sim.run(nullptr, cfg.plan.max_steps);
}

ExecutionRecord run_with_chooser(const RunConfig& cfg,
                                 const std::function<int(const std::vector<int>&, int64_t)>& choose,
                                 int64_t depth) {
  Simulation sim(cfg);
  return sim.run(&choose, depth);
}

int64_t exhaustive_interleavings(const RunConfig& cfg, int64_t depth,
                                 const std::function<void(const ExecutionRecord&)>& visit,
                                 int64_t record_budget) {
  std::vector<size_t> prefix;  // ordinal chosen at each decision point of the current path
  int64_t produced = 0;
  for (;;) {
    std::vector<size_t> widths;  // candidate-set size at each decision point
    size_t pos = 0;
    const Chooser chooser = [&](const std::vector<int>& cand, int64_t) -> int {
      if (pos >= prefix.size()) prefix.push_back(0);
      widths.push_back(cand.size());
      return cand[prefix[pos++]];
    };
    Simulation sim(cfg);
    ExecutionRecord rec = sim.run(&chooser, depth);
    ++produced;
    if (produced > record_budget)
      throw ExplorationBudgetExceeded("interleaving enumeration exceeded " +
                                      std::to_string(record_budget) + " schedules");
    visit(rec);
    while (!prefix.empty() && prefix.back() + 1 >= widths[prefix.size() - 1]) {
      prefix.pop_back();
      widths.pop_back();
    }
    if (prefix.empty()) return produced;
    ++prefix.back();
  }
}

}  // namespace cfsim
