// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/incentives.hpp"

#include <algorithm>
#include <sstream>

namespace tfcp::incentives {

const char* payout_kind_name(PayoutKind k) {
  switch (k) {
    case PayoutKind::AnteEscrow: return "ante_escrow";
    case PayoutKind::AnteRefund: return "ante_refund";
    case PayoutKind::AnteForfeit: return "ante_forfeit";
    case PayoutKind::WitnessFee: return "witness_fee";
    case PayoutKind::RegistrarFeeImmediate: return "registrar_fee_immediate";
    case PayoutKind::RegistrarFeeFinal: return "registrar_fee_final";
    case PayoutKind::BailStake: return "bail_stake";
    case PayoutKind::BailRelease: return "bail_release";
    case PayoutKind::BailSlash: return "bail_slash";
  }
  return "?";
}

std::vector<std::pair<AccountId, Coin>> split_equally(Coin total, std::vector<AccountId> ids) {
  if (ids.empty()) throw ParamError("split_equally over empty recipient set");
  std::sort(ids.begin(), ids.end());
  Coin base = total / ids.size();
  Coin rem = total % ids.size();
  std::vector<std::pair<AccountId, Coin>> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.emplace_back(ids[i], base + (i < rem ? 1 : 0));
  }
  return out;
}

Incentives::Incentives(ledger::Ledger& ledger, ledger::Trace& trace, NetworkParams params)
    : ledger_(ledger), trace_(trace), params_(params) {
  if (params_.fee_fraction_den == 0) throw ParamError("fee fraction denominator is zero");
  if (params_.fee_fraction_num > params_.fee_fraction_den)
    throw ParamError("immediate fee fraction exceeds 1");
  // The bail vault is a protocol account; no one holds its key.
  Bytes seed(32, 0);
  Bytes tag = to_bytes("tfcp-bail-vault");
  std::copy(tag.begin(), tag.end(), seed.begin());
  vault_ = ledger_.create_account(crypto::keygen(seed), 0);
}

PayoutEntry& Incentives::record(PayoutKind kind, const AccountId& from, const AccountId& to,
                                Coin amount, const InstanceId& instance) {
  PayoutEntry e;
  e.block = ledger_.height();
  e.kind = kind;
  e.from = from;
  e.to = to;
  e.amount = amount;
  e.instance = instance;
  entries_.push_back(e);
  std::ostringstream os;
  os << e.block << "|payout|" << payout_kind_name(kind) << '|' << from.hex() << '|' << to.hex()
     << '|' << amount;
  trace_.emit(os.str());
  return entries_.back();
}

void Incentives::transfer_and_record(PayoutKind kind, const AccountId& from, const AccountId& to,
                                     Coin amount, const InstanceId& instance, const char* tag) {
  ledger_.protocol_transfer(from, to, amount, tag);
  record(kind, from, to, amount, instance);
}

// ---------------------------------------------------------------------------
// Bails

std::uint64_t Incentives::stake_bail(const crypto::KeyPair& registrar, Coin amount,
                                     BlockHeight expiry) {
  if (amount < params_.min_bail) throw ParamError("bail below network minimum");
  if (expiry <= ledger_.height()) throw ParamError("bail expiry must be in the future");
  AccountId reg = ledger::account_id_for(registrar.public_key);
  ledger_.submit_transfer(reg, vault_, amount, registrar.secret_key);

  BailCommitment c;
  c.id = bails_.size();
  c.registrar = reg;
  c.amount = amount;
  c.expiry = expiry;
  c.status = BailStatus::Staked;
  bails_.push_back(c);

  // Publish the commitment so donors can pick registrars by bail horizon.
  ByteWriter w;
  w.u8(1);
  w.raw(reg.span());
  w.u64(amount);
  w.u64(expiry);
  ledger_.publish_document(reg, ledger::DocKind::BailCommitment, w.take(), registrar.secret_key);
  record(PayoutKind::BailStake, reg, vault_, amount, InstanceId{});
  return c.id;
}

const BailCommitment& Incentives::bail(std::uint64_t id) const {
  if (id >= bails_.size()) throw ParamError("unknown bail id");
  return bails_[id];
}

void Incentives::release_bail(std::uint64_t id) {
  if (id >= bails_.size()) throw ParamError("unknown bail id");
  BailCommitment& c = bails_[id];
  if (c.status != BailStatus::Staked) throw PhaseError("bail is not staked");
  if (ledger_.height() < c.expiry) throw PhaseError("bail released before expiry");
  if (has_pending_obligation(c.registrar))
    throw PhaseError("registrar has pending reveal obligations");
  c.status = BailStatus::Released;
  transfer_and_record(PayoutKind::BailRelease, vault_, c.registrar, c.amount, InstanceId{},
                      "bail-release");
}

void Incentives::slash_bail(std::uint64_t id, const std::string& reason,
                            const std::vector<AccountId>& recipients, const InstanceId& instance) {
  if (id >= bails_.size()) throw ParamError("unknown bail id");
  BailCommitment& c = bails_[id];
  if (c.status == BailStatus::Slashed) throw PhaseError("bail already slashed");
  if (c.status != BailStatus::Staked) throw PhaseError("bail is not staked");
  if (!has_violation(c.registrar, instance))
    throw PhaseError("no recorded violation for registrar: " + reason);
  c.status = BailStatus::Slashed;
  if (recipients.empty()) {
    // No one left to compensate; the stake stays in the vault but the slash
    // is still recorded against it.
    record(PayoutKind::BailSlash, vault_, vault_, c.amount, instance);
    return;
  }
  for (const auto& [to, amt] : split_equally(c.amount, recipients)) {
    if (amt == 0) continue;
    transfer_and_record(PayoutKind::BailSlash, vault_, to, amt, instance, "bail-slash");
  }
}

bool Incentives::has_active_bail(const AccountId& registrar) const {
  for (const auto& c : bails_) {
    if (c.registrar == registrar && c.status == BailStatus::Staked && c.expiry > ledger_.height())
      return true;
  }
  return false;
}

std::vector<std::uint64_t> Incentives::bails_of(const AccountId& registrar) const {
  std::vector<std::uint64_t> out;
  for (const auto& c : bails_)
    if (c.registrar == registrar) out.push_back(c.id);
  return out;
}

void Incentives::add_obligation(const AccountId& registrar, const InstanceId& instance) {
  obligations_[registrar].insert(instance);
}

void Incentives::clear_obligation(const AccountId& registrar, const InstanceId& instance) {
  auto it = obligations_.find(registrar);
  if (it != obligations_.end()) it->second.erase(instance);
}

bool Incentives::has_pending_obligation(const AccountId& registrar) const {
  auto it = obligations_.find(registrar);
  return it != obligations_.end() && !it->second.empty();
}

void Incentives::record_violation(const AccountId& registrar, const InstanceId& instance,
                                  const std::string& reason) {
  violations_[{registrar, instance}] = reason;
}

bool Incentives::has_violation(const AccountId& registrar, const InstanceId& instance) const {
  return violations_.count({registrar, instance}) > 0;
}

// ---------------------------------------------------------------------------
// Instance flows

void Incentives::note_ante_escrow(const InstanceId& instance, const AccountId& witness,
                                  const AccountId& deposit, Coin amount) {
  record(PayoutKind::AnteEscrow, witness, deposit, amount, instance);
}

Coin Incentives::immediate_fee_total(Coin registrar_fee) const {
  return registrar_fee * params_.fee_fraction_num / params_.fee_fraction_den;
}

Coin Incentives::immediate_paid(const InstanceId& instance) const {
  auto it = immediate_paid_.find(instance);
  return it == immediate_paid_.end() ? 0 : it->second;
}

std::vector<PayoutEntry> Incentives::pay_immediate_registrar_fee(
    const InstanceId& instance, const AccountId& deposit,
    const std::vector<AccountId>& registrars, Coin registrar_fee) {
  Coin total = immediate_fee_total(registrar_fee);
  std::vector<PayoutEntry> out;
  if (total == 0 || registrars.empty()) return out;
  if (ledger_.balance_of(deposit) < total)
    throw LedgerError("security deposit cannot cover immediate registrar fee");
  for (const auto& [to, amt] : split_equally(total, registrars)) {
    if (amt == 0) continue;
    transfer_and_record(PayoutKind::RegistrarFeeImmediate, deposit, to, amt, instance,
                        "fee-immediate");
    out.push_back(entries_.back());
  }
  immediate_paid_[instance] = total;
  return out;
}

std::vector<PayoutEntry> Incentives::settle_on_acknowledgment(
    const InstanceId& instance, const AccountId& deposit, Coin registrar_fee,
    const std::vector<AccountId>& revealers, Coin witness_fees,
    const std::vector<AnteRecord>& antes) {
  std::size_t before = entries_.size();

  Coin remaining = registrar_fee - immediate_paid(instance);
  if (remaining > 0 && !revealers.empty()) {
    for (const auto& [to, amt] : split_equally(remaining, revealers)) {
      if (amt == 0) continue;
      transfer_and_record(PayoutKind::RegistrarFeeFinal, deposit, to, amt, instance, "fee-final");
    }
  }

  // Witness fees pro-rata by ante amount over the fee-eligible antes;
  // remainder goes to the lowest witness ids.
  std::map<AccountId, Coin> eligible;
  Coin eligible_total = 0;
  for (const auto& a : antes) {
    if (!a.fee_eligible) continue;
    eligible[a.witness] += a.amount;
    eligible_total += a.amount;
  }
  if (witness_fees > 0 && eligible_total > 0) {
    Coin assigned = 0;
    std::vector<std::pair<AccountId, Coin>> fees;
    for (const auto& [wit, amt] : eligible) {
      Coin f = witness_fees * amt / eligible_total;
      fees.emplace_back(wit, f);
      assigned += f;
    }
    Coin rem = witness_fees - assigned;
    for (auto& [wit, f] : fees) {  // map order: lowest account id first
      if (rem == 0) break;
      f += 1;
      rem -= 1;
    }
    for (const auto& [wit, f] : fees) {
      if (f == 0) continue;
      transfer_and_record(PayoutKind::WitnessFee, deposit, wit, f, instance, "witness-fee");
    }
  }

  // Full refunds, late antes included (they just earned no fees).
  for (const auto& a : antes) {
    transfer_and_record(PayoutKind::AnteRefund, deposit, a.witness, a.amount, instance,
                        "ante-refund");
  }
  return std::vector<PayoutEntry>(entries_.begin() + static_cast<std::ptrdiff_t>(before),
                                  entries_.end());
}

std::vector<PayoutEntry> Incentives::settle_on_abort(const InstanceId& instance,
                                                     const AccountId& deposit,
                                                     const std::vector<AnteRecord>& antes) {
  if (antes.empty()) throw InvariantViolation("abort settlement with no antes is unreachable");
  std::size_t before = entries_.size();
  // The bet on honesty is lost: escrowed antes become the deposit's. No
  // coins move; the escrow transfer is made permanent.
  for (const auto& a : antes) {
    record(PayoutKind::AnteForfeit, a.witness, deposit, a.amount, instance);
  }
  return std::vector<PayoutEntry>(entries_.begin() + static_cast<std::ptrdiff_t>(before),
                                  entries_.end());
}

std::vector<PayoutEntry> Incentives::refund_antes_without_fees(const InstanceId& instance,
                                                               const AccountId& deposit,
                                                               const std::vector<AnteRecord>& antes) {
  std::size_t before = entries_.size();
  for (const auto& a : antes) {
    transfer_and_record(PayoutKind::AnteRefund, deposit, a.witness, a.amount, instance,
                        "ante-refund");
  }
  return std::vector<PayoutEntry>(entries_.begin() + static_cast<std::ptrdiff_t>(before),
                                  entries_.end());
}

std::vector<PayoutEntry> Incentives::entries_for(const InstanceId& instance) const {
  std::vector<PayoutEntry> out;
  for (const auto& e : entries_)
    if (e.instance == instance) out.push_back(e);
  return out;
}

}  // namespace tfcp::incentives
