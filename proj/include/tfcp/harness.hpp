// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "tfcp/analyzer.hpp"
#include "tfcp/engine.hpp"
#include "tfcp/scenario.hpp"

namespace tfcp::harness {

using engine::InstanceId;
using engine::Phase;

struct Measurement {
  std::string label;
  ledger::BlockHeight block = 0;
  ledger::AccountId deposit;
  std::optional<ledger::AccountId> guess;
  analyzer::Rational confidence;
  bool correct = false;
};

struct InstanceSummary {
  InstanceId id{};
  Phase phase = Phase::Recruiting;
  engine::AbortReason abort_reason = engine::AbortReason::None;
  ledger::AccountId donor;
  ledger::AccountId deposit;
  ledger::Coin registrar_fee = 0;
};

struct RunResult {
  std::string scenario_name;
  std::uint64_t seed = 0;
  std::vector<std::string> trace_lines;
  std::vector<InstanceSummary> instances;
  std::vector<engine::AcknowledgmentRecord> acknowledgments;
  std::vector<engine::PhaseTransition> transitions;
  std::vector<incentives::PayoutEntry> payouts;
  std::vector<Measurement> measurements;
  std::map<ledger::AccountId, ledger::AccountId> ground_truth;  // deposit -> donor
  ledger::Coin initial_supply = 0;
  ledger::Coin final_supply = 0;
  Bytes final_ledger_state;

  double guess_rate(const std::string& label) const;  // fraction of correct guesses
  std::string trace_text() const;
};

RunResult run_scenario(const Scenario& scenario);

// Post-run audit of the protocol's accounting identities. Returns one
// human-readable string per violated invariant; empty means clean.
std::vector<std::string> check_invariants(const RunResult& result);

}  // namespace tfcp::harness
