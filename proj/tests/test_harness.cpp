// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "tfcp/harness.hpp"
#include "tfcp/report.hpp"

using namespace tfcp;
using harness::RunResult;
using harness::Scenario;

TEST_CASE("scenario text round trips through serialize and parse") {
  Scenario sc = harness::happy_path_scenario(42);
  std::string text = sc.to_text();
  Scenario back = Scenario::from_text(text);
  CHECK(back.to_text() == text);
  CHECK(back.name == sc.name);
  CHECK(back.seed == sc.seed);
  CHECK(back.actors.size() == sc.actors.size());
  CHECK(back.schedule.size() == sc.schedule.size());
}

TEST_CASE("parse errors carry line and column") {
  std::string text = "tfcp-scenario v1\nname x\nseed 1\nbogus_keyword 3\n";
  try {
    Scenario::from_text(text);
    FAIL("expected a parse failure");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }

  CHECK_THROWS_AS(Scenario::from_text("not a scenario"), ConfigError);
}

TEST_CASE("unknown actors in the schedule fail validation") {
  Scenario sc = harness::happy_path_scenario(42);
  sc.schedule.push_back({50, "phantom", "move", {}});
  CHECK_THROWS_AS(sc.validate(), ConfigError);
}

TEST_CASE("an empty schedule runs to completion with no instances") {
  Scenario sc;
  sc.name = "empty";
  sc.seed = 1;
  sc.run_blocks = 10;
  RunResult res = harness::run_scenario(sc);
  CHECK(res.instances.empty());
  CHECK(res.acknowledgments.empty());
  CHECK(harness::check_invariants(res).empty());
}

TEST_CASE("identical seed and scenario produce byte-identical traces") {
  Scenario sc = harness::happy_path_scenario(42);
  RunResult a = harness::run_scenario(sc);
  RunResult b = harness::run_scenario(sc);
  CHECK(a.trace_text() == b.trace_text());
  CHECK(a.final_ledger_state == b.final_ledger_state);

  Scenario other = harness::happy_path_scenario(43);
  RunResult c = harness::run_scenario(other);
  CHECK(a.trace_text() != c.trace_text());
}

TEST_CASE("happy path ends in exactly one acknowledgment with ordered steps") {
  RunResult res = harness::run_scenario(harness::happy_path_scenario(42));
  REQUIRE(res.acknowledgments.size() == 1);
  REQUIRE(res.instances.size() == 1);
  CHECK(res.instances[0].phase == harness::Phase::Acknowledged);
  CHECK(harness::check_invariants(res).empty());

  auto steps = report::scheme_steps(res.trace_lines);
  CHECK(steps.complete_and_ordered());
}

TEST_CASE("false signal forfeits the witness antes") {
  RunResult res = harness::run_scenario(harness::false_signal_scenario(45, 3));
  REQUIRE(res.instances.size() == 1);
  CHECK(res.instances[0].phase == harness::Phase::Aborted);
  CHECK(res.acknowledgments.empty());
  CHECK(harness::check_invariants(res).empty());

  ledger::Coin forfeit = 0, refund = 0;
  for (const auto& e : res.payouts) {
    if (e.kind == incentives::PayoutKind::AnteForfeit) forfeit += e.amount;
    if (e.kind == incentives::PayoutKind::AnteRefund) refund += e.amount;
  }
  CHECK(forfeit == 100);
  CHECK(refund == 0);
}

TEST_CASE("witness balances move with the verdict") {
  // Honest death: the witness gains its fee. False signal: it loses the ante.
  RunResult honest = harness::run_scenario(harness::happy_path_scenario(42));
  RunResult false_sig = harness::run_scenario(harness::false_signal_scenario(45, 3));

  auto ante_delta = [](const RunResult& res) {
    ledger::Coin in = 0, out = 0;
    for (const auto& e : res.payouts) {
      if (e.kind == incentives::PayoutKind::WitnessFee) in += e.amount;
      if (e.kind == incentives::PayoutKind::AnteForfeit) out += e.amount;
    }
    return std::pair{in, out};
  };
  auto [honest_fees, honest_forfeits] = ante_delta(honest);
  CHECK(honest_fees > 0);
  CHECK(honest_forfeits == 0);
  auto [false_fees, false_forfeits] = ante_delta(false_sig);
  CHECK(false_fees == 0);
  CHECK(false_forfeits > 0);
}

TEST_CASE("supersession pays earlier instances nothing beyond immediate fees") {
  RunResult res = harness::run_scenario(harness::supersession_scenario(46));
  REQUIRE(res.instances.size() == 3);
  CHECK(res.instances[0].phase == harness::Phase::Superseded);
  CHECK(res.instances[1].phase == harness::Phase::Superseded);
  CHECK(res.instances[2].phase == harness::Phase::Acknowledged);
  REQUIRE(res.acknowledgments.size() == 1);
  CHECK(res.acknowledgments[0].instance == res.instances[2].id);
  CHECK(harness::check_invariants(res).empty());

  for (int i = 0; i < 2; ++i) {
    for (const auto& e : res.payouts) {
      if (e.instance != res.instances[i].id) continue;
      CHECK(e.kind == incentives::PayoutKind::RegistrarFeeImmediate);
    }
  }
}

TEST_CASE("supply is conserved across every builtin scenario") {
  for (const auto& [name, sc] : harness::builtin_scenarios()) {
    CAPTURE(name);
    RunResult res = harness::run_scenario(sc);
    CHECK(res.initial_supply == res.final_supply);
    auto violations = harness::check_invariants(res);
    CHECK_MESSAGE(violations.empty(), name, ": ",
                  violations.empty() ? "" : violations.front());
  }
}

TEST_CASE("the analyzer sees only what a trace replay reconstructs") {
  Scenario sc = harness::anonymity_scenario(3, 77);
  RunResult res = harness::run_scenario(sc);

  ledger::Trace replay_trace;
  ledger::Ledger replayed = ledger::Ledger::replay(res.trace_lines, replay_trace);
  CHECK(replayed.serialize_state() == res.final_ledger_state);

  analyzer::LedgerView view(replayed);
  auto guesses = analyzer::linkage_analyzer(view, sc.seed);
  CHECK(guesses.size() == 3);
  // Post-run (post-acknowledgment) the replayed public record names every
  // donor exactly.
  for (const auto& g : guesses) {
    REQUIRE(g.guessed_donor.has_value());
    CHECK(g.confidence == analyzer::Rational{1, 1});
    CHECK(res.ground_truth.at(g.security_deposit) == *g.guessed_donor);
  }
}

TEST_CASE("careless deposit funding links the donor before any reveal") {
  RunResult careless = harness::run_scenario(harness::anonymity_scenario(2, 49, true, false));
  RunResult careful = harness::run_scenario(harness::anonymity_scenario(2, 49, false, false));
  CHECK(careless.guess_rate("pre") == 1.0);
  CHECK(careful.guess_rate("pre") < 1.0);
}

TEST_CASE("reports regenerate byte-identically from a written trace") {
  RunResult res = harness::run_scenario(harness::happy_path_scenario(42));
  auto direct = report::RunReport::from_trace(res.trace_lines);

  std::string path = "trace_roundtrip.tmp";
  report::write_lines(path, res.trace_lines);
  auto reread = report::RunReport::from_trace(report::read_lines(path));
  std::remove(path.c_str());

  CHECK(direct.render_machine() == reread.render_machine());
  CHECK(direct.render_human() == reread.render_human());
  CHECK(direct.scenario_name == "happy_path");
  CHECK(direct.seed == 42);
  CHECK(direct.acknowledgments.size() == 1);
}

TEST_CASE("meta lines carry the scenario name and seed") {
  RunResult res = harness::run_scenario(harness::happy_path_scenario(77));
  auto find = [&](const std::string& line) {
    return std::find(res.trace_lines.begin(), res.trace_lines.end(), line);
  };
  auto scenario_it = find("META scenario happy_path");
  auto seed_it = find("META seed 77");
  REQUIRE(scenario_it != res.trace_lines.end());
  REQUIRE(seed_it != res.trace_lines.end());
  CHECK(scenario_it < seed_it);
}
