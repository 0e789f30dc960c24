// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tfcp/incentives.hpp"

namespace tfcp::harness {

using ledger::BlockHeight;
using ledger::Coin;

enum class Role { Donor, Registrar, Witness, AttackerKeyTransfer, AttackerWhale, Observer };

const char* role_name(Role r);
std::optional<Role> role_from_name(const std::string& name);

struct ActorSpec {
  Role role = Role::Observer;
  std::string name;
  Coin initial_balance = 0;
  std::map<std::string, std::string> params;

  std::string param(const std::string& key, const std::string& fallback = "") const;
  std::uint64_t param_u64(const std::string& key, std::uint64_t fallback) const;
};

struct ScheduleEntry {
  BlockHeight block = 0;
  std::string actor;
  std::string action;
  std::map<std::string, std::string> args;

  std::string arg(const std::string& key, const std::string& fallback = "") const;
  std::uint64_t arg_u64(const std::string& key, std::uint64_t fallback) const;
};

// Deterministic scenario: same seed + same scenario text, byte-identical
// trace. File schema carries the versioned header line `tfcp-scenario v1`.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  BlockHeight run_blocks = 100;
  incentives::NetworkParams network;
  std::vector<ActorSpec> actors;
  std::vector<ScheduleEntry> schedule;

  std::string to_text() const;
  static Scenario from_text(const std::string& text);

  const ActorSpec* find_actor(const std::string& name) const;
  void validate() const;  // throws ConfigError with a line-free diagnosis
};

// Built-in scenario catalog.
Scenario happy_path_scenario(std::uint64_t seed = 42);
// Alice dead, Bob holds her donor key. move_block relative placement inside
// or after the window via after_deadline.
Scenario key_transfer_attack_scenario(std::uint64_t seed = 43, BlockHeight deliberation_time = 10,
                                      bool move_after_deadline = false);
Scenario whale_attack_scenario(std::uint64_t seed = 44, std::uint32_t min_witnesses = 2,
                               bool donor_moves = true);
// K donors, hygiene-funded deposits, witnesses ante everywhere; analyzer
// sampled pre- and post-acknowledgment.
Scenario anonymity_scenario(std::uint32_t donors, std::uint64_t seed, bool careless_funding = false,
                            bool run_to_acknowledgment = true);
Scenario false_signal_scenario(std::uint64_t seed = 45, BlockHeight move_offset = 3);
Scenario supersession_scenario(std::uint64_t seed = 46);
Scenario silent_registrar_scenario(std::uint64_t seed = 47);

std::vector<std::pair<std::string, Scenario>> builtin_scenarios();

}  // namespace tfcp::harness
