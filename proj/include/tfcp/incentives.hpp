// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tfcp/ledger.hpp"

namespace tfcp::incentives {

using ledger::AccountId;
using ledger::BlockHeight;
using ledger::Coin;

using InstanceId = crypto::Digest;

enum class BailStatus { Staked, Released, Slashed };

struct BailCommitment {
  std::uint64_t id = 0;
  AccountId registrar;
  Coin amount = 0;
  BlockHeight expiry = 0;
  BailStatus status = BailStatus::Staked;
};

enum class PayoutKind {
  AnteEscrow,
  AnteRefund,
  AnteForfeit,
  WitnessFee,
  RegistrarFeeImmediate,
  RegistrarFeeFinal,
  BailStake,
  BailRelease,
  BailSlash,
};

const char* payout_kind_name(PayoutKind k);

struct PayoutEntry {
  BlockHeight block = 0;
  PayoutKind kind = PayoutKind::AnteEscrow;
  AccountId from;
  AccountId to;
  Coin amount = 0;
  InstanceId instance{};  // all-zero for instance-independent bail motion
};

struct AnteRecord {
  AccountId witness;
  Coin amount = 0;
  BlockHeight block = 0;
  bool fee_eligible = true;
};

struct NetworkParams {
  Coin min_bail = 100;
  std::uint32_t fee_fraction_num = 1;  // immediate registrar fee fraction
  std::uint32_t fee_fraction_den = 4;
  std::uint32_t default_min_witnesses = 2;
  BlockHeight default_min_span = 2;
  Coin min_registrar_fee = 0;
};

// Splits `total` across `ids` (sorted by account id); the first total%k
// recipients get the extra unit.
std::vector<std::pair<AccountId, Coin>> split_equally(Coin total, std::vector<AccountId> ids);

// All coin-motion policy: bails, antes, fees. Every payout entry mirrors a
// ledger transfer (forfeits mirror the original escrow transfer, which the
// settlement makes permanent).
class Incentives {
 public:
  Incentives(ledger::Ledger& ledger, ledger::Trace& trace, NetworkParams params);

  const NetworkParams& params() const { return params_; }
  AccountId bail_vault() const { return vault_; }

  // --- bails ---
  std::uint64_t stake_bail(const crypto::KeyPair& registrar, Coin amount, BlockHeight expiry);
  void release_bail(std::uint64_t id);
  void slash_bail(std::uint64_t id, const std::string& reason,
                  const std::vector<AccountId>& recipients, const InstanceId& instance);
  bool has_active_bail(const AccountId& registrar) const;
  std::vector<std::uint64_t> bails_of(const AccountId& registrar) const;
  const BailCommitment& bail(std::uint64_t id) const;

  // --- reveal obligations (tracked here so release_bail can refuse) ---
  void add_obligation(const AccountId& registrar, const InstanceId& instance);
  void clear_obligation(const AccountId& registrar, const InstanceId& instance);
  bool has_pending_obligation(const AccountId& registrar) const;

  // --- recorded violations; slashing requires one ---
  void record_violation(const AccountId& registrar, const InstanceId& instance,
                        const std::string& reason);
  bool has_violation(const AccountId& registrar, const InstanceId& instance) const;

  // --- instance flows, driven by the protocol engine ---
  void note_ante_escrow(const InstanceId& instance, const AccountId& witness,
                        const AccountId& deposit, Coin amount);
  std::vector<PayoutEntry> pay_immediate_registrar_fee(const InstanceId& instance,
                                                       const AccountId& deposit,
                                                       const std::vector<AccountId>& registrars,
                                                       Coin registrar_fee);
  std::vector<PayoutEntry> settle_on_acknowledgment(const InstanceId& instance,
                                                    const AccountId& deposit, Coin registrar_fee,
                                                    const std::vector<AccountId>& revealers,
                                                    Coin witness_fees,
                                                    const std::vector<AnteRecord>& antes);
  std::vector<PayoutEntry> settle_on_abort(const InstanceId& instance, const AccountId& deposit,
                                           const std::vector<AnteRecord>& antes);
  // Used when the instance dies without a verdict on the witnesses (reveal
  // shortfall, invalid donor signature): antes go back, no fees move.
  std::vector<PayoutEntry> refund_antes_without_fees(const InstanceId& instance,
                                                     const AccountId& deposit,
                                                     const std::vector<AnteRecord>& antes);

  Coin immediate_fee_total(Coin registrar_fee) const;
  Coin immediate_paid(const InstanceId& instance) const;
  const std::vector<PayoutEntry>& entries() const { return entries_; }
  std::vector<PayoutEntry> entries_for(const InstanceId& instance) const;

 private:
  PayoutEntry& record(PayoutKind kind, const AccountId& from, const AccountId& to, Coin amount,
                      const InstanceId& instance);
  void transfer_and_record(PayoutKind kind, const AccountId& from, const AccountId& to,
                           Coin amount, const InstanceId& instance, const char* tag);

  ledger::Ledger& ledger_;
  ledger::Trace& trace_;
  NetworkParams params_;
  AccountId vault_;
  std::vector<BailCommitment> bails_;
  std::vector<PayoutEntry> entries_;
  std::map<AccountId, std::set<InstanceId>> obligations_;
  std::map<std::pair<AccountId, InstanceId>, std::string> violations_;
  std::map<InstanceId, Coin> immediate_paid_;
};

}  // namespace tfcp::incentives
