#include "cfsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "cfsim/errors.hpp"

namespace cfsim {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void cfg_err(const std::string& file, int line, const std::string& msg) {
  throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
}

int64_t parse_int(const std::string& tok, const std::string& file, int line) {
  try {
    size_t used = 0;
    const int64_t v = std::stoll(tok, &used);
    if (used != tok.size()) cfg_err(file, line, "trailing characters in number '" + tok + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    cfg_err(file, line, "expected an integer, got '" + tok + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

// Workload entries hold operation names until the object is known.
struct RawWorkload {
  std::vector<std::pair<std::string, int64_t>> items;  // (op name, not-before gate)
  std::vector<std::string> mix;
  std::vector<std::string> post_mix;
  int count = 0;
  int line = 0;  // first line of the section, for late errors
};

Algorithm parse_algorithm(const std::string& v, const std::string& file, int line) {
  if (v == "weak-uc") return Algorithm::weak_uc;
  if (v == "cf-uc") return Algorithm::cf_uc;
  if (v == "gca") return Algorithm::gca_direct;
  cfg_err(file, line, "unknown algorithm '" + v + "' (weak-uc, cf-uc, gca)");
}

Policy parse_policy(const std::string& v, const std::string& file, int line) {
  if (v == "round-robin") return Policy::round_robin;
  if (v == "random") return Policy::random_policy;
  if (v == "scripted") return Policy::scripted;
  cfg_err(file, line, "unknown policy '" + v + "' (round-robin, random, scripted)");
}

ProgressClass parse_progress_class(const std::string& v, const std::string& file, int line) {
  if (v == "eventually-conflict-free") return ProgressClass::eventually_conflict_free;
  if (v == "solo-suffix") return ProgressClass::solo_suffix;
  if (v == "conflict-resolving") return ProgressClass::conflict_resolving;
  if (v == "conflict-forgetting") return ProgressClass::conflict_forgetting;
  cfg_err(file, line, "unknown progress class '" + v + "'");
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& filename) {
  ScenarioConfig sc;
  std::map<int, RawWorkload> raw_workloads;
  struct RawProgress {
    std::string text;
    int line;
  };
  std::vector<RawProgress> raw_progress;
  std::optional<int64_t> budgets_bound;

  std::string section;
  int workload_idx = -1;
  std::string line_text;
  int line_no = 0;
  bool have_processes = false, have_object = false, have_algo = false;

  while (std::getline(in, line_text)) {
    ++line_no;
    std::string line = line_text;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') cfg_err(filename, line_no, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name == "scenario" || name == "schedule" || name == "budgets" || name == "checks") {
        section = name;
        workload_idx = -1;
      } else if (name.rfind("workload.", 0) == 0) {
        section = "workload";
        workload_idx = static_cast<int>(parse_int(name.substr(9), filename, line_no));
        if (workload_idx < 1) cfg_err(filename, line_no, "workload index must be >= 1");
        if (raw_workloads.count(workload_idx))
          cfg_err(filename, line_no, "duplicate section [" + name + "]");
        raw_workloads[workload_idx].line = line_no;
      } else {
        cfg_err(filename, line_no, "unknown section [" + name + "]");
      }
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) cfg_err(filename, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) cfg_err(filename, line_no, "empty key");
    if (section.empty()) cfg_err(filename, line_no, "'" + key + "' appears before any section");

    if (section == "scenario") {
      if (key == "name") {
        sc.name = val;
      } else if (key == "object") {
        sc.object = val;
        have_object = true;
      } else if (key == "processes") {
        sc.n = static_cast<int>(parse_int(val, filename, line_no));
        have_processes = true;
      } else if (key == "algorithm") {
        sc.algo = parse_algorithm(val, filename, line_no);
        have_algo = true;
      } else {
        cfg_err(filename, line_no, "unknown key '" + key + "' in [scenario]");
      }
    } else if (section == "workload") {
      RawWorkload& rw = raw_workloads[workload_idx];
      if (key == "ops") {
        for (const std::string& item : split(val, ',')) {
          const size_t at = item.find('@');
          std::string op = trim(at == std::string::npos ? item : item.substr(0, at));
          int64_t gate = 0;
          if (at != std::string::npos) gate = parse_int(trim(item.substr(at + 1)), filename, line_no);
          if (op.empty()) cfg_err(filename, line_no, "empty operation name in ops list");
          if (gate < 0) cfg_err(filename, line_no, "gate must be non-negative");
          rw.items.emplace_back(op, gate);
        }
      } else if (key == "mix") {
        rw.mix = split(val, ',');
        if (rw.mix.empty()) cfg_err(filename, line_no, "mix needs at least one operation");
      } else if (key == "post_mix") {
        rw.post_mix = split(val, ',');
      } else if (key == "count") {
        rw.count = static_cast<int>(parse_int(val, filename, line_no));
        if (rw.count < 1) cfg_err(filename, line_no, "count must be >= 1");
      } else {
        cfg_err(filename, line_no, "unknown key '" + key + "' in [workload.N]");
      }
    } else if (section == "schedule") {
      if (key == "policy") {
        sc.plan.policy = parse_policy(val, filename, line_no);
      } else if (key == "seed") {
        sc.plan.seed = static_cast<uint64_t>(parse_int(val, filename, line_no));
      } else if (key == "crash") {
        for (const std::string& item : split(val, ',')) {
          const size_t colon = item.find(':');
          if (colon == std::string::npos)
            cfg_err(filename, line_no, "crash entries look like process:own-step");
          sc.plan.crash_points.emplace_back(
              static_cast<int>(parse_int(trim(item.substr(0, colon)), filename, line_no)),
              parse_int(trim(item.substr(colon + 1)), filename, line_no));
        }
      } else if (key == "solo") {
        for (const std::string& item : split(val, ',')) {
          const size_t colon = item.find(':');
          const size_t dash = item.find('-', colon == std::string::npos ? 0 : colon);
          if (colon == std::string::npos || dash == std::string::npos || dash < colon)
            cfg_err(filename, line_no, "solo entries look like process:begin-end");
          SoloWindow w;
          w.process = static_cast<int>(parse_int(trim(item.substr(0, colon)), filename, line_no));
          w.begin = parse_int(trim(item.substr(colon + 1, dash - colon - 1)), filename, line_no);
          w.end = parse_int(trim(item.substr(dash + 1)), filename, line_no);
          sc.plan.solo_windows.push_back(w);
        }
      } else if (key == "phase_boundary") {
        sc.plan.phase_boundary = parse_int(val, filename, line_no);
      } else if (key == "fairness_bound") {
        sc.plan.fairness_bound = parse_int(val, filename, line_no);
      } else if (key == "script") {
        for (const std::string& item : split(val, ','))
          sc.plan.script.push_back(static_cast<int>(parse_int(item, filename, line_no)));
      } else if (key == "max_steps") {
        sc.plan.max_steps = parse_int(val, filename, line_no);
      } else {
        cfg_err(filename, line_no, "unknown key '" + key + "' in [schedule]");
      }
    } else if (section == "budgets") {
      if (key == "progress_bound") {
        budgets_bound = parse_int(val, filename, line_no);
        if (*budgets_bound < 1) cfg_err(filename, line_no, "progress_bound must be positive");
      } else if (key == "max_lin_ops") {
        const int64_t v = parse_int(val, filename, line_no);
        if (v < 1 || v > 20) cfg_err(filename, line_no, "max_lin_ops must be in [1, 20]");
        sc.max_lin_ops = static_cast<size_t>(v);
      } else {
        cfg_err(filename, line_no, "unknown key '" + key + "' in [budgets]");
      }
    } else if (section == "checks") {
      if (key == "progress") {
        raw_progress.push_back({val, line_no});
      } else if (key == "linearizable") {
        if (val == "on")
          sc.lin_check = true;
        else if (val == "off")
          sc.lin_check = false;
        else
          cfg_err(filename, line_no, "linearizable must be 'on' or 'off'");
      } else {
        cfg_err(filename, line_no, "unknown key '" + key + "' in [checks]");
      }
    }
  }

  if (!have_object) cfg_err(filename, line_no, "missing 'object' in [scenario]");
  if (!have_processes) cfg_err(filename, line_no, "missing 'processes' in [scenario]");
  if (!have_algo) cfg_err(filename, line_no, "missing 'algorithm' in [scenario]");
  if (sc.n < 1 || sc.n > 32) cfg_err(filename, line_no, "processes must be in [1, 32]");
  if (sc.name.empty()) sc.name = sc.object;
  if (budgets_bound.has_value()) sc.progress_bound = *budgets_bound;

  try {
    sc.spec = spec_by_name(sc.object);
  } catch (const SpecError& e) {
    cfg_err(filename, line_no, e.what());
  }

  // Resolve workload operation names against the object.
  sc.workloads.assign(static_cast<size_t>(sc.n), WorkloadSpec{});
  for (const auto& [idx, rw] : raw_workloads) {
    if (idx > sc.n)
      cfg_err(filename, rw.line,
              "[workload." + std::to_string(idx) + "] but only " + std::to_string(sc.n) +
                  " processes");
    WorkloadSpec& ws = sc.workloads[static_cast<size_t>(idx - 1)];
    auto resolve = [&](const std::string& op_name) {
      try {
        return sc.spec->op_id(op_name);
      } catch (const SpecError& e) {
        cfg_err(filename, rw.line, e.what());
      }
    };
    for (const auto& [op_name, gate] : rw.items) ws.items.push_back({resolve(op_name), gate});
    for (const std::string& m : rw.mix) ws.mix.push_back(resolve(m));
    for (const std::string& m : rw.post_mix) ws.post_mix.push_back(resolve(m));
    ws.count = rw.count;
    if (ws.generated() && ws.mix.empty())
      cfg_err(filename, rw.line, "count given without a mix");
    if (!ws.items.empty() && ws.count > 0)
      cfg_err(filename, rw.line, "a workload is either an ops list or a mix/count, not both");
  }

  // Progress queries, defaulting the bound from [budgets].
  for (const RawProgress& rp : raw_progress) {
    std::istringstream ss(rp.text);
    std::string cls_tok;
    ss >> cls_tok;
    ProgressQuery q;
    q.cls = parse_progress_class(cls_tok, filename, rp.line);
    q.bound = sc.progress_bound;
    std::string tok;
    while (ss >> tok) {
      const size_t eq2 = tok.find('=');
      if (eq2 == std::string::npos)
        cfg_err(filename, rp.line, "progress options look like key=value, got '" + tok + "'");
      const std::string k = tok.substr(0, eq2);
      const int64_t v = parse_int(tok.substr(eq2 + 1), filename, rp.line);
      if (k == "tau")
        q.tau = v;
      else if (k == "window")
        q.window = static_cast<int>(v);
      else if (k == "bound")
        q.bound = v;
      else
        cfg_err(filename, rp.line, "unknown progress option '" + k + "'");
    }
    sc.progress.push_back(q);
  }

  if (sc.algo == Algorithm::gca_direct)
    cfg_err(filename, line_no, "scenario files drive the universal constructions; 'gca' is test-only");
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  return parse_scenario(in, path);
}

RunConfig to_run_config(const ScenarioConfig& sc) {
  RunConfig rc;
  rc.spec = sc.spec;
  rc.n = sc.n;
  rc.algo = sc.algo;
  rc.workloads = sc.workloads;
  rc.plan = sc.plan;
  return rc;
}

ScenarioOutcome run_scenario(const ScenarioConfig& sc, std::optional<uint64_t> seed_override) {
  RunConfig rc = to_run_config(sc);
  if (seed_override.has_value()) rc.plan.seed = *seed_override;
  ScenarioOutcome out;
  out.record = run(rc);
  std::vector<Verdict> all =
      check_all(out.record, *sc.spec, sc.progress, sc.max_lin_ops);
  for (Verdict& v : all) {
    if (!sc.lin_check && v.name == "linearizable") continue;
    out.verdicts.push_back(std::move(v));
  }
  out.all_hold = true;
  for (const Verdict& v : out.verdicts)
    if (!v.holds) out.all_hold = false;
  return out;
}

namespace {

using o_json = nlohmann::ordered_json;

std::string cmd_text(const SequentialSpec& spec, const Letter& l) {
  std::ostringstream os;
  os << spec.op_name(l.op);
  if (l.is_command()) os << "#p" << l.process << "." << l.seq;
  return os.str();
}

o_json value_json(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return nullptr;
  if (const int64_t* i = std::get_if<int64_t>(&v)) return *i;
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  const auto& vec = std::get<std::vector<int64_t>>(v);
  return o_json(vec);
}

o_json trace_json(const SequentialSpec& spec, const Trace& t) {
  o_json arr = o_json::array();
  for (const Letter& l : t.canonical()) arr.push_back(cmd_text(spec, l));
  return arr;
}

o_json verdicts_json(const std::vector<Verdict>& verdicts) {
  o_json arr = o_json::array();
  for (const Verdict& v : verdicts)
    arr.push_back(o_json{{"name", v.name}, {"holds", v.holds}, {"detail", v.detail}});
  return arr;
}

o_json header_json(const ScenarioConfig& sc, uint64_t seed) {
  o_json j;
  j["schema"] = "cfsim-report-v1";
  j["scenario"] = sc.name;
  j["object"] = sc.object;
  j["algorithm"] = to_string(sc.algo);
  j["processes"] = sc.n;
  j["policy"] = to_string(sc.plan.policy);
  j["seed"] = seed;
  j["prng"] = "mt19937_64";
  return j;
}

}  // namespace

std::string report_json(const ScenarioConfig& sc, const ScenarioOutcome& out) {
  const ExecutionRecord& rec = out.record;
  const SequentialSpec& spec = *sc.spec;
  o_json j = header_json(sc, rec.plan.seed);
  j["quiescent"] = rec.quiescent;
  j["total_steps"] = rec.total_steps;
  j["memory_steps"] = rec.steps.size();
  j["rounds_used"] = rec.gca_ledger.empty()
                         ? 0
                         : std::max_element(rec.gca_ledger.begin(), rec.gca_ledger.end(),
                                            [](const GcaProposeRec& a, const GcaProposeRec& b) {
                                              return a.round < b.round;
                                            })->round;

  o_json crashed = o_json::object();
  for (size_t p = 1; p < rec.crashed_at.size(); ++p)
    if (rec.crashed_at[p] >= 0) crashed[std::to_string(p)] = rec.crashed_at[p];
  j["crashed"] = crashed;

  o_json ops_arr = o_json::array();
  for (const OpRecord& op : rec.op_ledger) {
    o_json e;
    e["process"] = op.process;
    e["op"] = spec.op_name(op.cmd.op);
    e["seq"] = op.cmd.seq;
    e["invoked"] = op.invoked_step;
    e["responded"] = op.response_step.has_value() ? o_json(*op.response_step) : o_json(nullptr);
    e["response"] = op.response.has_value() ? value_json(*op.response) : o_json(nullptr);
    e["rounds"] = op.rounds;
    ops_arr.push_back(std::move(e));
  }
  j["operations"] = ops_arr;

  o_json commits = o_json::array();
  for (const CommittedWrite& cw : rec.committed_log)
    commits.push_back(o_json{{"step", cw.step},
                             {"process", cw.process},
                             {"round", cw.entry.round},
                             {"trace", trace_json(spec, cw.entry.trace)}});
  j["committed"] = commits;

  j["verdicts"] = verdicts_json(out.verdicts);
  j["all_hold"] = out.all_hold;
  return j.dump(2) + "\n";
}

ExploreOutcome explore_scenario(const ScenarioConfig& sc, int64_t depth, int64_t record_budget) {
  const RunConfig rc = to_run_config(sc);
  ExploreOutcome out;
  exhaustive_interleavings(
      rc, depth,
      [&](const ExecutionRecord& rec) {
        ++out.schedules;
        if (rec.quiescent) ++out.quiescent;
        std::vector<Verdict> verdicts = check_all(rec, *sc.spec, {}, sc.max_lin_ops);
        for (const Verdict& v : verdicts) {
          if (!sc.lin_check && v.name == "linearizable") continue;
          if (v.holds) continue;
          ++out.failures;
          if (out.failure_notes.size() < 8)
            out.failure_notes.push_back("schedule " + std::to_string(out.schedules) + ": " +
                                        v.name + ": " + v.detail);
        }
      },
      record_budget);
  return out;
}

std::string explore_report_json(const ScenarioConfig& sc, int64_t depth,
                                const ExploreOutcome& out) {
  o_json j = header_json(sc, sc.plan.seed);
  j["schema"] = "cfsim-explore-v1";
  j["depth"] = depth;
  j["schedules"] = out.schedules;
  j["quiescent"] = out.quiescent;
  j["failures"] = out.failures;
  j["failure_notes"] = out.failure_notes;
  return j.dump(2) + "\n";
}

}  // namespace cfsim
