#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cfsim/errors.hpp"
#include "cfsim/scenario.hpp"
#include "doctest.h"

using namespace cfsim;

namespace {

ScenarioConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "test.scn");
}

// Asserts that parsing fails and that the message pins the given line.
void expect_error(const std::string& text, int line, const std::string& needle) {
  try {
    (void)parse_text(text);
    FAIL("expected ConfigError (", needle, ")");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    INFO("message: ", msg);
    const std::string pos = "test.scn:" + std::to_string(line) + ":";
    CHECK(msg.find(pos) == 0);
    CHECK(msg.find(needle) != std::string::npos);
  }
}

const std::string kMinimal =
    "[scenario]\n"
    "object = counter\n"
    "processes = 2\n"
    "algorithm = cf-uc\n";

std::string fixture(const std::string& name) {
  return std::string(CFSIM_SCENARIO_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("a minimal scenario parses with defaults") {
  ScenarioConfig sc = parse_text(kMinimal);
  CHECK(sc.name == "counter");  // name falls back to the object
  CHECK(sc.object == "counter");
  CHECK(sc.spec->name == "counter");
  CHECK(sc.n == 2);
  CHECK(sc.algo == Algorithm::cf_uc);
  CHECK(sc.workloads.size() == 2);
  CHECK(sc.workloads[0].items.empty());
  CHECK(sc.plan.policy == Policy::round_robin);
  CHECK(sc.lin_check);
  CHECK(sc.max_lin_ops == 10);
  CHECK(sc.progress_bound == 512);
  CHECK(sc.progress.empty());
}

TEST_CASE("every section and key round-trips") {
  ScenarioConfig sc = parse_text(
      "[scenario]\n"
      "name = kitchen-sink\n"
      "object = counter\n"
      "processes = 3\n"
      "algorithm = weak-uc\n"
      "\n"
      "[workload.1]\n"
      "ops = inc @0, read @30\n"
      "\n"
      "[workload.2]\n"
      "mix = inc, dec\n"
      "post_mix = read\n"
      "count = 4\n"
      "\n"
      "[schedule]\n"
      "policy = scripted\n"
      "script = 1, 2, 1\n"
      "seed = 99\n"
      "crash = 2:5, 3:0\n"
      "solo = 1:10-20\n"
      "phase_boundary = 16\n"
      "fairness_bound = 8\n"
      "max_steps = 4096\n"
      "\n"
      "[budgets]\n"
      "progress_bound = 64\n"
      "max_lin_ops = 12\n"
      "\n"
      "[checks]\n"
      "linearizable = off\n"
      "progress = eventually-conflict-free tau=16\n"
      "progress = solo-suffix window=0 bound=100\n");
  CHECK(sc.name == "kitchen-sink");
  CHECK(sc.n == 3);
  CHECK(sc.algo == Algorithm::weak_uc);

  REQUIRE(sc.workloads.size() == 3);
  REQUIRE(sc.workloads[0].items.size() == 2);
  CHECK(sc.workloads[0].items[0].op == sc.spec->op_id("inc"));
  CHECK(sc.workloads[0].items[1].op == sc.spec->op_id("read"));
  CHECK(sc.workloads[0].items[1].not_before == 30);
  CHECK(sc.workloads[1].mix == std::vector<int>{sc.spec->op_id("inc"), sc.spec->op_id("dec")});
  CHECK(sc.workloads[1].post_mix == std::vector<int>{sc.spec->op_id("read")});
  CHECK(sc.workloads[1].count == 4);
  CHECK(sc.workloads[2].items.empty());

  CHECK(sc.plan.policy == Policy::scripted);
  CHECK(sc.plan.script == std::vector<int>{1, 2, 1});
  CHECK(sc.plan.seed == 99);
  REQUIRE(sc.plan.crash_points.size() == 2);
  CHECK(sc.plan.crash_points[0] == std::pair<int, int64_t>{2, 5});
  CHECK(sc.plan.crash_points[1] == std::pair<int, int64_t>{3, 0});
  REQUIRE(sc.plan.solo_windows.size() == 1);
  CHECK(sc.plan.solo_windows[0].process == 1);
  CHECK(sc.plan.solo_windows[0].begin == 10);
  CHECK(sc.plan.solo_windows[0].end == 20);
  CHECK(sc.plan.phase_boundary == 16);
  CHECK(sc.plan.fairness_bound == 8);
  CHECK(sc.plan.max_steps == 4096);

  CHECK(sc.progress_bound == 64);
  CHECK(sc.max_lin_ops == 12);
  CHECK(!sc.lin_check);

  REQUIRE(sc.progress.size() == 2);
  CHECK(sc.progress[0].cls == ProgressClass::eventually_conflict_free);
  CHECK(sc.progress[0].tau == 16);
  CHECK(sc.progress[0].bound == 64);  // inherits [budgets]
  CHECK(sc.progress[1].cls == ProgressClass::solo_suffix);
  CHECK(sc.progress[1].window == 0);
  CHECK(sc.progress[1].bound == 100);  // explicit override wins
}

TEST_CASE("comments and blank lines are ignored; budgets may follow checks") {
  ScenarioConfig sc = parse_text(
      "# leading comment\n"
      "\n"
      "[scenario]\n"
      "object = counter   # trailing comment\n"
      "processes = 1\n"
      "algorithm = cf-uc\n"
      "[checks]\n"
      "progress = eventually-conflict-free\n"
      "[budgets]\n"
      "progress_bound = 33\n");
  CHECK(sc.object == "counter");
  REQUIRE(sc.progress.size() == 1);
  CHECK(sc.progress[0].bound == 33);  // the default applies even when [budgets] comes last
}

TEST_CASE("parse errors carry file and line") {
  SUBCASE("section syntax") {
    expect_error("[scenario\n", 1, "unterminated section header");
    expect_error("[mystery]\n", 1, "unknown section");
    expect_error("object = counter\n", 1, "before any section");
    expect_error("[scenario]\nobject counter\n", 2, "expected 'key = value'");
    expect_error("[scenario]\n= counter\n", 2, "empty key");
  }
  SUBCASE("unknown keys per section") {
    expect_error("[scenario]\ncolour = red\n", 2, "unknown key 'colour' in [scenario]");
    expect_error(kMinimal + "[workload.1]\nspeed = 9\n", 6, "unknown key 'speed' in [workload.N]");
    expect_error(kMinimal + "[schedule]\nquantum = 9\n", 6, "unknown key 'quantum' in [schedule]");
    expect_error(kMinimal + "[budgets]\nfuel = 9\n", 6, "unknown key 'fuel' in [budgets]");
    expect_error(kMinimal + "[checks]\nvibes = on\n", 6, "unknown key 'vibes' in [checks]");
  }
  SUBCASE("numbers") {
    expect_error("[scenario]\nprocesses = many\n", 2, "expected an integer");
    expect_error("[scenario]\nprocesses = 3x\n", 2, "trailing characters");
  }
  SUBCASE("enumerations") {
    expect_error("[scenario]\nalgorithm = quantum\n", 2, "unknown algorithm");
    expect_error(kMinimal + "[schedule]\npolicy = fifo\n", 6, "unknown policy");
    expect_error(kMinimal + "[checks]\nprogress = someday\n", 6, "unknown progress class");
    expect_error(kMinimal + "[checks]\nlinearizable = maybe\n", 6, "must be 'on' or 'off'");
  }
  SUBCASE("workload shape") {
    expect_error(kMinimal + "[workload.0]\n", 5, "workload index must be >= 1");
    expect_error(kMinimal + "[workload.1]\nops = inc\n[workload.1]\nops = inc\n", 7,
                 "duplicate section");
    expect_error(kMinimal + "[workload.3]\nops = inc\n", 5, "[workload.3] but only 2 processes");
    expect_error(kMinimal + "[workload.1]\nops = inc @-1\n", 6, "gate must be non-negative");
    expect_error(kMinimal + "[workload.1]\nops = , inc\n", 6, "empty operation name");
    expect_error(kMinimal + "[workload.1]\nmix =\n", 6, "mix needs at least one operation");
    expect_error(kMinimal + "[workload.1]\ncount = 0\n", 6, "count must be >= 1");
    expect_error(kMinimal + "[workload.1]\ncount = 3\n", 5, "count given without a mix");
    expect_error(kMinimal + "[workload.1]\nops = inc\nmix = inc\ncount = 2\n", 5,
                 "either an ops list or a mix/count, not both");
    expect_error(kMinimal + "[workload.1]\nops = fly\n", 5, "has no operation 'fly'");
  }
  SUBCASE("schedule shape") {
    expect_error(kMinimal + "[schedule]\ncrash = 1\n", 6, "crash entries look like");
    expect_error(kMinimal + "[schedule]\nsolo = 1:5\n", 6, "solo entries look like");
  }
  SUBCASE("budgets") {
    expect_error(kMinimal + "[budgets]\nprogress_bound = 0\n", 6, "must be positive");
    expect_error(kMinimal + "[budgets]\nmax_lin_ops = 21\n", 6, "max_lin_ops must be in [1, 20]");
  }
  SUBCASE("progress options") {
    expect_error(kMinimal + "[checks]\nprogress = solo-suffix wat\n", 6,
                 "progress options look like key=value");
    expect_error(kMinimal + "[checks]\nprogress = solo-suffix depth=3\n", 6,
                 "unknown progress option");
  }
  SUBCASE("whole-file requirements") {
    expect_error("[scenario]\nprocesses = 2\nalgorithm = cf-uc\n", 3, "missing 'object'");
    expect_error("[scenario]\nobject = counter\nalgorithm = cf-uc\n", 3, "missing 'processes'");
    expect_error("[scenario]\nobject = counter\nprocesses = 2\n", 3, "missing 'algorithm'");
    expect_error("[scenario]\nobject = counter\nprocesses = 0\nalgorithm = cf-uc\n", 4,
                 "processes must be in [1, 32]");
    expect_error("[scenario]\nobject = counter\nprocesses = 33\nalgorithm = cf-uc\n", 4,
                 "processes must be in [1, 32]");
    expect_error("[scenario]\nobject = abacus\nprocesses = 2\nalgorithm = cf-uc\n", 4,
                 "unknown object 'abacus'");
    expect_error(
        "[scenario]\nobject = counter\nprocesses = 2\nalgorithm = gca\n[workload.1]\nops = inc\n",
        6, "'gca' is test-only");
  }
}

TEST_CASE("load_scenario reports unopenable files") {
  CHECK_THROWS_WITH_AS((void)load_scenario("/nonexistent/nowhere.scn"),
                       "/nonexistent/nowhere.scn: cannot open scenario file", ConfigError);
}

TEST_CASE("the bundled scenarios parse, run, and pass their checks") {
  const char* names[] = {"fig1a.scn",       "fig1b.scn",
                         "fig2a.scn",       "fig2b.scn",
                         "solo-suffix.scn", "degenerate-no-conflict.scn",
                         "degenerate-total-conflict.scn"};
  for (const char* name : names) {
    CAPTURE(name);
    ScenarioConfig sc = load_scenario(fixture(name));
    ScenarioOutcome out = run_scenario(sc);
    for (const Verdict& v : out.verdicts) {
      INFO(name, " / ", v.name, ": ", v.detail);
      CHECK(v.holds);
    }
    CHECK(out.all_hold);
  }
}

TEST_CASE("seed overrides thread through run and report") {
  ScenarioConfig sc = load_scenario(fixture("degenerate-no-conflict.scn"));
  REQUIRE(sc.plan.seed == 12345);
  ScenarioOutcome out = run_scenario(sc, 42);
  CHECK(out.record.plan.seed == 42);
  const std::string report = report_json(sc, out);
  CHECK(report.find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("reports are deterministic and machine-readable") {
  ScenarioConfig sc = load_scenario(fixture("degenerate-no-conflict.scn"));
  ScenarioOutcome a = run_scenario(sc);
  ScenarioOutcome b = run_scenario(sc);
  const std::string ra = report_json(sc, a);
  const std::string rb = report_json(sc, b);
  CHECK(ra == rb);

  // A different seed changes the schedule, hence the report.
  ScenarioOutcome c = run_scenario(sc, 777);
  CHECK(ra != report_json(sc, c));

  const nlohmann::json j = nlohmann::json::parse(ra);
  CHECK(j["schema"] == "cfsim-report-v1");
  CHECK(j["scenario"] == "degenerate-no-conflict");
  CHECK(j["object"] == "counter-updates-only");
  CHECK(j["algorithm"] == "cf-uc");
  CHECK(j["processes"] == 3);
  CHECK(j["policy"] == "random");
  CHECK(j["prng"] == "mt19937_64");
  CHECK(j["quiescent"] == true);
  CHECK(j["all_hold"] == true);
  CHECK(j["operations"].size() == 9);  // three processes, three updates each
  for (const auto& op : j["operations"]) {
    CHECK(op["response"] == "ok");
    CHECK(op["responded"].is_number());
  }
  CHECK(j["verdicts"].is_array());
  CHECK(!j["committed"].empty());
}

TEST_CASE("exhaustive exploration of a scenario is deterministic and bounded") {
  std::istringstream in(
      "[scenario]\n"
      "object = counter\n"
      "processes = 2\n"
      "algorithm = weak-uc\n"
      "[workload.1]\n"
      "ops = read\n"
      "[workload.2]\n"
      "ops = inc\n");
  ScenarioConfig sc = parse_scenario(in, "inline.scn");

  ExploreOutcome out = explore_scenario(sc, 10);
  CHECK(out.schedules > 100);
  CHECK(out.failures == 0);
  CHECK(out.failure_notes.empty());
  // Ten steps cannot complete both operations (one alone costs six).
  CHECK(out.quiescent == 0);

  ExploreOutcome again = explore_scenario(sc, 10);
  CHECK(again.schedules == out.schedules);
  const std::string ra = explore_report_json(sc, 10, out);
  CHECK(ra == explore_report_json(sc, 10, again));
  const nlohmann::json j = nlohmann::json::parse(ra);
  CHECK(j["schema"] == "cfsim-explore-v1");
  CHECK(j["depth"] == 10);
  CHECK(j["schedules"] == out.schedules);

  CHECK_THROWS_AS((void)explore_scenario(sc, 10, 5), ExplorationBudgetExceeded);
}

TEST_CASE("to_run_config copies the run-relevant fields") {
  ScenarioConfig sc = load_scenario(fixture("fig2a.scn"));
  RunConfig rc = to_run_config(sc);
  CHECK(rc.spec == sc.spec);
  CHECK(rc.n == 4);
  CHECK(rc.algo == Algorithm::cf_uc);
  CHECK(rc.workloads.size() == 4);
  CHECK(rc.plan.crash_points.size() == 1);
  CHECK(rc.plan.solo_windows.size() == 1);
}
