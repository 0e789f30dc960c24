// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tfcp/documents.hpp"
#include "tfcp/incentives.hpp"
#include "tfcp/ledger.hpp"

namespace tfcp::engine {

using ledger::AccountId;
using ledger::BlockHeight;
using ledger::Coin;
using incentives::InstanceId;

enum class Phase {
  Recruiting,
  SharesDistributed,
  Active,
  Deliberating,
  Acknowledged,
  Aborted,
  Superseded,
};

const char* phase_name(Phase p);

enum class AbortReason { None, DonorAlive, RevealShortfall, InvalidSignature };

struct InstanceParams {
  std::uint32_t threshold_t = 2;
  std::optional<std::vector<AccountId>> acceptable_registrars;
  Coin registrar_fee = 0;
  Coin witness_fees = 0;
  Coin threshold_amount = 0;
  BlockHeight deliberation_time = 0;
  std::uint32_t min_distinct_witnesses = 2;  // x: separate transactions required
  BlockHeight min_signaling_span = 0;
  docs::CivilIdentity civil_identity;
  Bytes heritage;
};

struct Instance {
  InstanceId id{};
  Phase phase = Phase::Recruiting;
  AbortReason abort_reason = AbortReason::None;
  AccountId donor;
  AccountId deposit;
  InstanceParams params;
  BlockHeight pre_wills_block = 0;
  std::optional<BlockHeight> wills_block;
  std::optional<BlockHeight> announcement_block;
  std::vector<AccountId> accepted_registrars;
  std::map<AccountId, crypto::Share> shares_delivered;  // private channel, off-ledger
  std::map<AccountId, crypto::Share> reveals;
  std::vector<incentives::AnteRecord> antes;
  std::optional<BlockHeight> deliberation_deadline;
  bool reveal_open = false;
  std::optional<BlockHeight> reveal_deadline;
  docs::PreWills pre_wills;
  docs::Wills wills;
  std::optional<docs::PublicWills> public_wills;

  Coin ante_total() const;
  std::size_t distinct_witnesses() const;
};

struct AcknowledgmentRecord {
  AccountId donor;
  InstanceId instance{};
  BlockHeight block = 0;
  docs::PublicWills public_wills;
};

struct PhaseTransition {
  InstanceId instance{};
  Phase from = Phase::Recruiting;
  Phase to = Phase::Recruiting;
  BlockHeight block = 0;
};

// The TFCP instance state machine. One engine per simulated world; all
// transitions run on the ledger's serialized command stream.
class Engine {
 public:
  Engine(ledger::Ledger& ledger, incentives::Incentives& incentives, crypto::Rng& rng,
         ledger::Trace& trace);

  InstanceId open_instance(const crypto::KeyPair& donor_keys,
                           const crypto::KeyPair& deposit_keys, InstanceParams params);
  void registrar_accept(const InstanceId& id, const crypto::KeyPair& registrar_keys);
  void distribute_shares(const InstanceId& id);
  void finalize_setup(const InstanceId& id);
  void record_ante(const InstanceId& id, const crypto::KeyPair& witness_keys, Coin amount);
  void donor_liveness_move(const InstanceId& id, const crypto::KeyPair& donor_keys);
  void submit_share_reveal(const InstanceId& id, const crypto::KeyPair& registrar_keys,
                           const crypto::Share& share);
  std::optional<InstanceId> latest_valid_instance(const AccountId& donor_or_deposit) const;

  const Instance& get(const InstanceId& id) const;
  std::vector<InstanceId> instance_ids() const;
  const std::vector<AcknowledgmentRecord>& acknowledgments() const { return acks_; }
  const std::vector<PhaseTransition>& transitions() const { return transitions_; }

  // Delivered share for one registrar, over the private channel. Used by
  // actor scripts; never readable through the public ledger view.
  const crypto::Share& delivered_share(const InstanceId& id, const AccountId& registrar) const;

 private:
  Instance& require(const InstanceId& id);
  void set_phase(Instance& inst, Phase next);
  void evaluate_threshold(Instance& inst);
  void open_reveal_round(Instance& inst);
  void close_reveal_round(const InstanceId& id);
  void enact_acknowledgment(Instance& inst, const crypto::KeyPair& last_revealer);
  void abort_instance(Instance& inst, AbortReason reason);
  void supersede_prior(const AccountId& donor, BlockHeight now);
  void on_ledger_transfer(const ledger::Transfer& t);
  std::vector<AccountId> revealers_of(const Instance& inst) const;
  void clear_all_obligations(Instance& inst);

  ledger::Ledger& ledger_;
  incentives::Incentives& incentives_;
  crypto::Rng& rng_;
  ledger::Trace& trace_;
  std::map<InstanceId, Instance> instances_;
  std::vector<InstanceId> creation_order_;
  // Off-ledger secrets, keyed by instance.
  std::map<InstanceId, crypto::SharedKey> shared_keys_;
  std::map<InstanceId, crypto::KeyPair> deposit_keys_;
  std::vector<AcknowledgmentRecord> acks_;
  std::vector<PhaseTransition> transitions_;
};

}  // namespace tfcp::engine
