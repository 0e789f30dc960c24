// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/engine.hpp"

#include <algorithm>
#include <sstream>

namespace tfcp::engine {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Recruiting: return "Recruiting";
    case Phase::SharesDistributed: return "SharesDistributed";
    case Phase::Active: return "Active";
    case Phase::Deliberating: return "Deliberating";
    case Phase::Acknowledged: return "Acknowledged";
    case Phase::Aborted: return "Aborted";
    case Phase::Superseded: return "Superseded";
  }
  return "?";
}

Coin Instance::ante_total() const {
  Coin total = 0;
  for (const auto& a : antes) total += a.amount;
  return total;
}

std::size_t Instance::distinct_witnesses() const {
  std::vector<AccountId> ids;
  for (const auto& a : antes) ids.push_back(a.witness);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids.size();
}

static std::string short_id(const InstanceId& id) {
  return to_hex(ByteSpan(id.data(), 8));
}

Engine::Engine(ledger::Ledger& ledger, incentives::Incentives& incentives, crypto::Rng& rng,
               ledger::Trace& trace)
    : ledger_(ledger), incentives_(incentives), rng_(rng), trace_(trace) {
  ledger_.on_signed_transfer([this](const ledger::Transfer& t) { on_ledger_transfer(t); });
}

Instance& Engine::require(const InstanceId& id) {
  auto it = instances_.find(id);
  if (it == instances_.end()) throw ParamError("unknown instance");
  return it->second;
}

const Instance& Engine::get(const InstanceId& id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) throw ParamError("unknown instance");
  return it->second;
}

std::vector<InstanceId> Engine::instance_ids() const {
  return creation_order_;
}

void Engine::set_phase(Instance& inst, Phase next) {
  Phase prev = inst.phase;
  inst.phase = next;
  transitions_.push_back({inst.id, prev, next, ledger_.height()});
  std::ostringstream os;
  os << "PHASE " << short_id(inst.id) << ' ' << phase_name(prev) << ' ' << phase_name(next) << ' '
     << ledger_.height();
  trace_.emit(os.str());
}

void Engine::clear_all_obligations(Instance& inst) {
  for (const auto& [reg, _] : inst.shares_delivered) incentives_.clear_obligation(reg, inst.id);
}

void Engine::supersede_prior(const AccountId& donor, BlockHeight) {
  for (auto& [id, inst] : instances_) {
    if (inst.donor != donor) continue;
    switch (inst.phase) {
      case Phase::Recruiting:
      case Phase::SharesDistributed:
      case Phase::Active:
      case Phase::Deliberating:
        if (inst.phase == Phase::Deliberating) ledger_.unfreeze_account(inst.deposit);
        set_phase(inst, Phase::Superseded);
        clear_all_obligations(inst);
        trace_.emit("SUPERSEDE " + short_id(inst.id) + ' ' + std::to_string(ledger_.height()));
        break;
      case Phase::Acknowledged:
        throw PhaseError("donor already acknowledged dead; no further instances");
      default:
        break;
    }
  }
}

InstanceId Engine::open_instance(const crypto::KeyPair& donor_keys,
                                 const crypto::KeyPair& deposit_keys, InstanceParams params) {
  AccountId donor = ledger::account_id_for(donor_keys.public_key);
  AccountId deposit = ledger::account_id_for(deposit_keys.public_key);
  if (!ledger_.account_exists(donor)) throw LedgerError("donor account does not exist");
  if (!ledger_.account_exists(deposit)) throw LedgerError("deposit account does not exist");
  supersede_prior(donor, ledger_.height());

  crypto::SharedKey key = crypto::random_shared_key(rng_);
  docs::PreWills pre = docs::build_pre_wills(donor_keys, deposit, key, params.threshold_t,
                                             params.acceptable_registrars, params.registrar_fee,
                                             params.heritage);
  auto receipt = ledger_.publish_document(deposit, ledger::DocKind::PreWills, pre.serialize(),
                                          deposit_keys.secret_key);

  ByteWriter w;
  w.raw(deposit.span());
  w.u64(receipt.block);
  w.u64(receipt.seq);
  InstanceId id = crypto::hash(w.bytes());

  Instance inst;
  inst.id = id;
  inst.donor = donor;
  inst.deposit = deposit;
  inst.params = std::move(params);
  inst.pre_wills_block = receipt.block;
  inst.pre_wills = std::move(pre);
  instances_[id] = std::move(inst);
  creation_order_.push_back(id);
  shared_keys_[id] = key;
  deposit_keys_[id] = deposit_keys;
  trace_.emit("OPEN " + short_id(id) + ' ' + std::to_string(ledger_.height()));
  return id;
}

void Engine::registrar_accept(const InstanceId& id, const crypto::KeyPair& registrar_keys) {
  Instance& inst = require(id);
  if (inst.phase != Phase::Recruiting) throw PhaseError("acceptance outside Recruiting phase");
  AccountId reg = ledger::account_id_for(registrar_keys.public_key);
  if (!incentives_.has_active_bail(reg)) throw PhaseError("registrar has no active bail");
  if (inst.params.acceptable_registrars) {
    const auto& list = *inst.params.acceptable_registrars;
    if (std::find(list.begin(), list.end(), reg) == list.end())
      throw ParamError("registrar not on the acceptable list");
  }
  if (std::find(inst.accepted_registrars.begin(), inst.accepted_registrars.end(), reg) !=
      inst.accepted_registrars.end())
    throw PhaseError("registrar already accepted");

  ByteWriter w;
  w.u8(1);
  w.raw(ByteSpan(id.data(), id.size()));
  w.raw(inst.deposit.span());
  ledger_.publish_document(reg, ledger::DocKind::RegistrarAcceptance, w.take(),
                           registrar_keys.secret_key);
  inst.accepted_registrars.push_back(reg);
  trace_.emit("ACCEPT " + short_id(id) + ' ' + reg.hex().substr(0, 16) + ' ' +
              std::to_string(ledger_.height()));
}

void Engine::distribute_shares(const InstanceId& id) {
  Instance& inst = require(id);
  if (inst.phase != Phase::Recruiting) throw PhaseError("shares already distributed or instance closed");
  if (inst.accepted_registrars.size() < inst.params.threshold_t)
    throw PhaseError("not enough registrar acceptances");

  const crypto::SharedKey& key = shared_keys_.at(id);
  auto shares = crypto::split_secret(ByteSpan(key.data(), key.size()), inst.params.threshold_t,
                                     static_cast<unsigned>(inst.accepted_registrars.size()), rng_);
  for (std::size_t i = 0; i < inst.accepted_registrars.size(); ++i) {
    const AccountId& reg = inst.accepted_registrars[i];
    inst.shares_delivered[reg] = shares[i];
    incentives_.add_obligation(reg, id);
  }
  set_phase(inst, Phase::SharesDistributed);
  trace_.emit("SHARES " + short_id(id) + ' ' + std::to_string(inst.accepted_registrars.size()) +
              ' ' + std::to_string(ledger_.height()));
}

void Engine::finalize_setup(const InstanceId& id) {
  Instance& inst = require(id);
  if (inst.phase != Phase::SharesDistributed) throw PhaseError("setup not ready to finalize");
  const crypto::KeyPair& dk = deposit_keys_.at(id);

  // Atomicity: the immediate fee must be payable before anything publishes.
  Coin immediate = incentives_.immediate_fee_total(inst.params.registrar_fee);
  if (ledger_.balance_of(inst.deposit) < immediate)
    throw LedgerError("security deposit cannot cover immediate registrar fee");

  inst.wills = docs::strip_to_wills(inst.pre_wills);
  auto wills_receipt =
      ledger_.publish_document(inst.deposit, ledger::DocKind::Wills, inst.wills.serialize(),
                               dk.secret_key);
  inst.wills_block = wills_receipt.block;

  docs::Announcement ann;
  ann.civil_identity = inst.params.civil_identity;
  ann.wills_reference = wills_receipt.block;
  ann.security_deposit = inst.deposit;
  ann.witness_fees = inst.params.witness_fees;
  ann.deliberation_time = inst.params.deliberation_time;
  ann.threshold_amount = inst.params.threshold_amount;
  auto ann_receipt = ledger_.publish_document(inst.deposit, ledger::DocKind::Announcement,
                                              ann.serialize(), dk.secret_key);
  inst.announcement_block = ann_receipt.block;

  incentives_.pay_immediate_registrar_fee(id, inst.deposit, inst.accepted_registrars,
                                          inst.params.registrar_fee);
  set_phase(inst, Phase::Active);
}

void Engine::record_ante(const InstanceId& id, const crypto::KeyPair& witness_keys, Coin amount) {
  Instance& inst = require(id);
  if (inst.phase != Phase::Active && inst.phase != Phase::Deliberating)
    throw PhaseError("antes accepted only while Active or Deliberating");
  AccountId witness = ledger::account_id_for(witness_keys.public_key);
  ledger_.submit_transfer(witness, inst.deposit, amount, witness_keys.secret_key);

  incentives::AnteRecord rec;
  rec.witness = witness;
  rec.amount = amount;
  rec.block = ledger_.height();
  rec.fee_eligible = inst.phase == Phase::Active;  // late antes earn no fees
  inst.antes.push_back(rec);
  incentives_.note_ante_escrow(id, witness, inst.deposit, amount);
  trace_.emit("ANTE " + short_id(id) + ' ' + witness.hex().substr(0, 16) + ' ' +
              std::to_string(amount) + ' ' + std::to_string(ledger_.height()));

  if (inst.phase == Phase::Active) evaluate_threshold(inst);
}

void Engine::evaluate_threshold(Instance& inst) {
  if (inst.ante_total() < inst.params.threshold_amount) return;
  if (inst.distinct_witnesses() < inst.params.min_distinct_witnesses) return;
  BlockHeight first = inst.antes.front().block;
  BlockHeight last = inst.antes.back().block;
  if (last - first < inst.params.min_signaling_span) return;

  set_phase(inst, Phase::Deliberating);
  inst.deliberation_deadline = ledger_.height() + inst.params.deliberation_time;
  ledger_.freeze_account(inst.deposit);
  trace_.emit("DELIBERATE " + short_id(inst.id) + ' ' +
              std::to_string(*inst.deliberation_deadline) + ' ' + std::to_string(ledger_.height()));
  InstanceId id = inst.id;
  if (*inst.deliberation_deadline <= ledger_.height()) {
    open_reveal_round(inst);
  } else {
    ledger_.at_height(*inst.deliberation_deadline, [this, id]() {
      auto it = instances_.find(id);
      if (it == instances_.end()) return;
      Instance& i = it->second;
      if (i.phase == Phase::Deliberating && !i.reveal_open) open_reveal_round(i);
    });
  }
}

void Engine::on_ledger_transfer(const ledger::Transfer& t) {
  // Any donor-signed move strictly inside the deliberation window proves
  // liveness and halts the instance.
  for (auto& [id, inst] : instances_) {
    if (inst.phase != Phase::Deliberating || inst.reveal_open) continue;
    if (t.from != inst.donor) continue;
    if (ledger_.height() >= *inst.deliberation_deadline) continue;
    abort_instance(inst, AbortReason::DonorAlive);
  }
}

void Engine::donor_liveness_move(const InstanceId& id, const crypto::KeyPair& donor_keys) {
  Instance& inst = require(id);
  if (inst.phase != Phase::Deliberating || inst.reveal_open)
    throw PhaseError("no deliberation in progress");
  if (ledger_.height() >= *inst.deliberation_deadline)
    throw PhaseError("deliberation deadline passed; acknowledgment proceeds");
  AccountId donor = ledger::account_id_for(donor_keys.public_key);
  if (donor != inst.donor) throw ParamError("keys do not match the instance donor");
  // A zero self-transfer is the cheapest fresh signed move; the transfer
  // observer performs the abort.
  ledger_.submit_transfer(donor, donor, 0, donor_keys.secret_key);
}

void Engine::abort_instance(Instance& inst, AbortReason reason) {
  inst.abort_reason = reason;
  if (ledger_.is_frozen(inst.deposit) && reason == AbortReason::DonorAlive)
    ledger_.unfreeze_account(inst.deposit);
  set_phase(inst, Phase::Aborted);
  clear_all_obligations(inst);
  switch (reason) {
    case AbortReason::DonorAlive:
      if (!inst.antes.empty()) incentives_.settle_on_abort(inst.id, inst.deposit, inst.antes);
      break;
    case AbortReason::RevealShortfall:
    case AbortReason::InvalidSignature:
      // The witnesses were not refuted; give the antes back without fees.
      incentives_.refund_antes_without_fees(inst.id, inst.deposit, inst.antes);
      break;
    case AbortReason::None:
      break;
  }
  const char* tag = reason == AbortReason::DonorAlive      ? "donor-alive"
                    : reason == AbortReason::RevealShortfall ? "reveal-shortfall"
                    : reason == AbortReason::InvalidSignature ? "invalid-signature"
                                                              : "none";
  trace_.emit(std::string("ABORT ") + short_id(inst.id) + ' ' + tag + ' ' +
              std::to_string(ledger_.height()));
}

void Engine::open_reveal_round(Instance& inst) {
  inst.reveal_open = true;
  BlockHeight window = std::max<BlockHeight>(1, inst.params.deliberation_time);
  inst.reveal_deadline = ledger_.height() + window;
  trace_.emit("REVEAL_OPEN " + short_id(inst.id) + ' ' + std::to_string(*inst.reveal_deadline) +
              ' ' + std::to_string(ledger_.height()));
  InstanceId id = inst.id;
  ledger_.at_height(*inst.reveal_deadline, [this, id]() { close_reveal_round(id); });
}

std::vector<AccountId> Engine::revealers_of(const Instance& inst) const {
  std::vector<AccountId> out;
  for (const auto& [reg, _] : inst.reveals) out.push_back(reg);
  return out;
}

void Engine::submit_share_reveal(const InstanceId& id, const crypto::KeyPair& registrar_keys,
                                 const crypto::Share& share) {
  Instance& inst = require(id);
  // Late reveals inside the window still count (they dodge the slash) even
  // when the acknowledgment already landed on earlier shares.
  bool open = inst.reveal_open &&
              (inst.phase == Phase::Deliberating || inst.phase == Phase::Acknowledged);
  if (!open) throw PhaseError("reveal round is not open");
  AccountId reg = ledger::account_id_for(registrar_keys.public_key);
  auto it = inst.shares_delivered.find(reg);
  if (it == inst.shares_delivered.end()) throw ParamError("registrar holds no share here");
  if (!(it->second == share)) throw CryptoError("share mismatch: reveal differs from delivery");
  if (inst.reveals.count(reg)) return;  // idempotent

  inst.reveals[reg] = share;
  incentives_.clear_obligation(reg, id);
  trace_.emit("REVEAL " + short_id(id) + ' ' + reg.hex().substr(0, 16) + ' ' +
              std::to_string(ledger_.height()));
  if (inst.phase == Phase::Deliberating && inst.reveals.size() >= inst.params.threshold_t) {
    enact_acknowledgment(inst, registrar_keys);
  }
}

void Engine::enact_acknowledgment(Instance& inst, const crypto::KeyPair& last_revealer) {
  std::vector<crypto::Share> shares;
  for (const auto& [_, s] : inst.reveals) shares.push_back(s);
  Bytes key_bytes = crypto::reconstruct_secret(shares, inst.params.threshold_t);
  crypto::SharedKey key{};
  std::copy(key_bytes.begin(), key_bytes.end(), key.begin());

  auto donor_plain = crypto::decrypt(key, inst.wills.encrypted_donor_address,
                                     to_bytes(docs::kDonorAddressContext));
  if (!donor_plain || donor_plain->size() != crypto::kDigestLen) {
    abort_instance(inst, AbortReason::InvalidSignature);
    return;
  }
  AccountId donor;
  std::copy(donor_plain->begin(), donor_plain->end(), donor.value.begin());

  crypto::Digest h = docs::wills_hash(inst.wills);
  bool sig_ok = ledger_.account_exists(donor) &&
                crypto::verify(ledger_.public_key_of(donor), ByteSpan(h.data(), h.size()),
                               inst.wills.donor_signature);
  if (!sig_ok) {
    abort_instance(inst, AbortReason::InvalidSignature);
    return;
  }

  docs::PublicWills pw;
  pw.donor = donor;
  pw.original_wills_block = *inst.wills_block;
  pw.revealing_registrars = revealers_of(inst);
  ledger_.publish_document(ledger::account_id_for(last_revealer.public_key),
                           ledger::DocKind::PublicWills, pw.serialize(),
                           last_revealer.secret_key);
  inst.public_wills = pw;

  set_phase(inst, Phase::Acknowledged);
  for (const auto& rec : acks_) {
    if (rec.donor == donor)
      throw InvariantViolation("second acknowledgment for one donor");
  }
  acks_.push_back({donor, inst.id, ledger_.height(), pw});
  trace_.emit("ACK " + short_id(inst.id) + ' ' + donor.hex().substr(0, 16) + ' ' +
              std::to_string(ledger_.height()));
  incentives_.settle_on_acknowledgment(inst.id, inst.deposit, inst.params.registrar_fee,
                                       pw.revealing_registrars, inst.params.witness_fees,
                                       inst.antes);
  // The deposit stays frozen: terminal escrow until succession logic (out of
  // scope here) takes over.
}

void Engine::close_reveal_round(const InstanceId& id) {
  auto it = instances_.find(id);
  if (it == instances_.end()) return;
  Instance& inst = it->second;
  if (inst.phase != Phase::Deliberating && inst.phase != Phase::Acknowledged) return;
  inst.reveal_open = false;

  // Silence through the window is the slashable offence.
  for (const auto& [reg, _] : inst.shares_delivered) {
    if (inst.reveals.count(reg)) continue;
    incentives_.record_violation(reg, id, "no reveal within window");
    incentives_.clear_obligation(reg, id);
    std::vector<AccountId> recipients = revealers_of(inst);
    for (const auto& a : inst.antes)
      if (a.fee_eligible) recipients.push_back(a.witness);
    std::sort(recipients.begin(), recipients.end());
    recipients.erase(std::unique(recipients.begin(), recipients.end()), recipients.end());
    for (std::uint64_t bail_id : incentives_.bails_of(reg)) {
      if (incentives_.bail(bail_id).status == incentives::BailStatus::Staked) {
        incentives_.slash_bail(bail_id, "no reveal within window", recipients, id);
      }
    }
    trace_.emit("SLASH " + short_id(id) + ' ' + reg.hex().substr(0, 16) + ' ' +
                std::to_string(ledger_.height()));
  }
  if (inst.phase == Phase::Deliberating && inst.reveals.size() < inst.params.threshold_t) {
    abort_instance(inst, AbortReason::RevealShortfall);
  }
}

std::optional<InstanceId> Engine::latest_valid_instance(const AccountId& donor_or_deposit) const {
  std::optional<InstanceId> best;
  BlockHeight best_block = 0;
  for (const InstanceId& id : creation_order_) {
    const Instance& inst = instances_.at(id);
    if (inst.donor != donor_or_deposit && inst.deposit != donor_or_deposit) continue;
    if (inst.phase == Phase::Superseded) continue;
    BlockHeight b = inst.wills_block.value_or(inst.pre_wills_block);
    if (!best || b >= best_block) {
      best = id;
      best_block = b;
    }
  }
  return best;
}

const crypto::Share& Engine::delivered_share(const InstanceId& id,
                                             const AccountId& registrar) const {
  const Instance& inst = get(id);
  auto it = inst.shares_delivered.find(registrar);
  if (it == inst.shares_delivered.end()) throw ParamError("no share delivered to this registrar");
  return it->second;
}

}  // namespace tfcp::engine
