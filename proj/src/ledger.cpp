// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/ledger.hpp"

#include <algorithm>
#include <sstream>

namespace tfcp::ledger {

AccountId account_id_for(ByteSpan public_key) {
  ByteWriter w;
  w.str("tfcp-acct");
  w.var_bytes(public_key);
  return AccountId{crypto::hash(w.bytes())};
}

const char* doc_kind_name(DocKind k) {
  switch (k) {
    case DocKind::PreWills: return "prewills";
    case DocKind::Wills: return "wills";
    case DocKind::Announcement: return "announcement";
    case DocKind::PublicWills: return "publicwills";
    case DocKind::RegistrarAcceptance: return "acceptance";
    case DocKind::BailCommitment: return "bail";
  }
  return "?";
}

std::optional<DocKind> doc_kind_from_name(const std::string& name) {
  for (DocKind k : {DocKind::PreWills, DocKind::Wills, DocKind::Announcement, DocKind::PublicWills,
                    DocKind::RegistrarAcceptance, DocKind::BailCommitment}) {
    if (name == doc_kind_name(k)) return k;
  }
  return std::nullopt;
}

std::string Trace::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

Bytes transfer_signing_bytes(const AccountId& from, const AccountId& to, Coin amount,
                             std::uint64_t nonce) {
  ByteWriter w;
  w.str("tfcp-transfer");
  w.raw(from.span());
  w.raw(to.span());
  w.u64(amount);
  w.u64(nonce);
  return w.take();
}

Bytes document_signing_bytes(const AccountId& publisher, DocKind kind, ByteSpan payload) {
  ByteWriter w;
  w.str("tfcp-doc");
  w.raw(publisher.span());
  w.u8(static_cast<std::uint8_t>(kind));
  w.var_bytes(payload);
  return w.take();
}

Ledger::Ledger(Trace& trace) : trace_(trace) {}

Ledger::Account& Ledger::require_account(const AccountId& id) {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) throw LedgerError("unknown account " + id.hex());
  return it->second;
}

const Ledger::Account& Ledger::require_account(const AccountId& id) const {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) throw LedgerError("unknown account " + id.hex());
  return it->second;
}

void Ledger::log_event(BlockHeight block, const std::string& kind, const std::string& actor,
                       ByteSpan payload, ByteSpan sig) {
  std::ostringstream os;
  os << block << '|' << kind << '|' << actor << '|' << to_hex(payload) << '|' << to_hex(sig);
  trace_.emit(os.str());
}

AccountId Ledger::create_account(const crypto::KeyPair& keys, Coin initial_balance) {
  AccountId id = account_id_for(keys.public_key);
  if (accounts_.count(id)) throw LedgerError("account already exists");
  accounts_[id] = Account{keys.public_key, initial_balance, 0, false};
  supply_ += initial_balance;
  ByteWriter w;
  w.var_bytes(keys.public_key);
  w.u64(initial_balance);
  log_event(height_, "create", id.hex(), w.bytes(), {});
  return id;
}

void Ledger::apply_transfer(Transfer t) {
  Account& from = require_account(t.from);
  require_account(t.to);
  if (from.balance < t.amount) throw LedgerError("insufficient balance");
  from.balance -= t.amount;
  accounts_[t.to].balance += t.amount;
  transfers_.push_back(std::move(t));
}

Transfer Ledger::submit_transfer(const AccountId& from, const AccountId& to, Coin amount,
                                 ByteSpan secret_key) {
  const Account& sender = require_account(from);
  require_account(to);
  if (sender.frozen) throw LedgerError("account is frozen");
  Bytes body = transfer_signing_bytes(from, to, amount, sender.nonce);
  Bytes sig = crypto::sign(secret_key, body);
  if (!crypto::verify(sender.public_key, body, sig)) throw LedgerError("bad transfer signature");
  if (sender.balance < amount) throw LedgerError("insufficient balance");

  Transfer t;
  t.from = from;
  t.to = to;
  t.amount = amount;
  t.nonce = sender.nonce;
  t.signature = sig;
  t.block = height_;
  t.protocol = false;
  apply_transfer(t);
  accounts_[from].nonce += 1;

  ByteWriter w;
  w.raw(to.span());
  w.u64(amount);
  w.u64(t.nonce);
  log_event(height_, "transfer", from.hex(), w.bytes(), sig);
  for (const auto& obs : transfer_observers_) obs(transfers_.back());
  return transfers_.back();
}

Transfer Ledger::protocol_transfer(const AccountId& from, const AccountId& to, Coin amount,
                                   const std::string& tag) {
  require_account(from);
  require_account(to);
  Transfer t;
  t.from = from;
  t.to = to;
  t.amount = amount;
  t.tag = tag;
  t.block = height_;
  t.protocol = true;
  apply_transfer(t);

  ByteWriter w;
  w.raw(to.span());
  w.u64(amount);
  w.str(tag);
  log_event(height_, "ptransfer", from.hex(), w.bytes(), {});
  return transfers_.back();
}

PublishedDocument Ledger::publish_document(const AccountId& publisher, DocKind kind, Bytes payload,
                                           ByteSpan secret_key) {
  const Account& acct = require_account(publisher);
  Bytes body = document_signing_bytes(publisher, kind, payload);
  Bytes sig = crypto::sign(secret_key, body);
  if (!crypto::verify(acct.public_key, body, sig)) throw LedgerError("bad document signature");

  PublishedDocument doc;
  doc.publisher = publisher;
  doc.kind = kind;
  doc.payload = std::move(payload);
  doc.signature = sig;
  doc.block = height_;
  doc.seq = doc_seq_++;
  documents_.push_back(doc);
  log_event(height_, doc_kind_name(kind), publisher.hex(), doc.payload, sig);
  return doc;
}

BlockHeight Ledger::advance_block(std::uint64_t n) {
  if (n < 1) throw ParamError("advance_block requires n >= 1");
  BlockHeight target = height_ + n;
  while (height_ < target) {
    height_ += 1;
    log_event(height_, "advance", "", {}, {});
    // Fire due callbacks in (height, registration order); a callback may
    // register further callbacks for later heights.
    for (std::size_t i = 0; i < pending_callbacks_.size();) {
      if (pending_callbacks_[i].first <= height_) {
        auto cb = std::move(pending_callbacks_[i].second);
        pending_callbacks_.erase(pending_callbacks_.begin() + static_cast<std::ptrdiff_t>(i));
        cb();
      } else {
        ++i;
      }
    }
  }
  return height_;
}

void Ledger::freeze_account(const AccountId& account) {
  require_account(account).frozen = true;
  log_event(height_, "freeze", account.hex(), {}, {});
}

void Ledger::unfreeze_account(const AccountId& account) {
  require_account(account).frozen = false;
  log_event(height_, "unfreeze", account.hex(), {}, {});
}

bool Ledger::is_frozen(const AccountId& account) const {
  return require_account(account).frozen;
}

Coin Ledger::balance_of(const AccountId& account) const {
  return require_account(account).balance;
}

bool Ledger::account_exists(const AccountId& account) const {
  return accounts_.count(account) > 0;
}

const Bytes& Ledger::public_key_of(const AccountId& account) const {
  return require_account(account).public_key;
}

std::vector<AccountId> Ledger::account_ids() const {
  std::vector<AccountId> ids;
  ids.reserve(accounts_.size());
  for (const auto& [id, _] : accounts_) ids.push_back(id);
  return ids;
}

std::vector<PublishedDocument> Ledger::documents_by_kind(DocKind kind) const {
  std::vector<PublishedDocument> out;
  for (const auto& d : documents_)
    if (d.kind == kind) out.push_back(d);
  return out;
}

std::vector<PublishedDocument> Ledger::documents_by_publisher(const AccountId& publisher) const {
  std::vector<PublishedDocument> out;
  for (const auto& d : documents_)
    if (d.publisher == publisher) out.push_back(d);
  return out;
}

std::vector<PublishedDocument> Ledger::documents_in_range(BlockHeight from, BlockHeight to) const {
  std::vector<PublishedDocument> out;
  for (const auto& d : documents_)
    if (d.block >= from && d.block <= to) out.push_back(d);
  return out;
}

void Ledger::at_height(BlockHeight height, std::function<void()> callback) {
  if (height <= height_) {
    callback();
    return;
  }
  pending_callbacks_.emplace_back(height, std::move(callback));
}

void Ledger::on_signed_transfer(std::function<void(const Transfer&)> observer) {
  transfer_observers_.push_back(std::move(observer));
}

Bytes Ledger::serialize_state() const {
  ByteWriter w;
  w.u64(height_);
  w.u64(supply_);
  w.u32(static_cast<std::uint32_t>(accounts_.size()));
  for (const auto& [id, a] : accounts_) {  // std::map: sorted by id
    w.raw(id.span());
    w.var_bytes(a.public_key);
    w.u64(a.balance);
    w.u64(a.nonce);
    w.u8(a.frozen ? 1 : 0);
  }
  w.u32(static_cast<std::uint32_t>(transfers_.size()));
  for (const auto& t : transfers_) {
    w.raw(t.from.span());
    w.raw(t.to.span());
    w.u64(t.amount);
    w.u64(t.nonce);
    w.var_bytes(t.signature);
    w.str(t.tag);
    w.u64(t.block);
    w.u8(t.protocol ? 1 : 0);
  }
  w.u32(static_cast<std::uint32_t>(documents_.size()));
  for (const auto& d : documents_) {
    w.raw(d.publisher.span());
    w.u8(static_cast<std::uint8_t>(d.kind));
    w.var_bytes(d.payload);
    w.var_bytes(d.signature);
    w.u64(d.block);
    w.u64(d.seq);
  }
  return w.take();
}

static std::vector<std::string> split_pipes(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '|') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

Ledger Ledger::replay(const std::vector<std::string>& lines, Trace& trace) {
  Ledger lg(trace);
  for (const auto& line : lines) {
    auto f = split_pipes(line);
    if (f.size() != 5) continue;  // engine/harness trace line, not a ledger event
    BlockHeight block;
    try {
      block = std::stoull(f[0]);
    } catch (...) {
      continue;
    }
    const std::string& kind = f[1];
    const std::string& actor = f[2];
    Bytes payload = from_hex(f[3]);
    Bytes sig = from_hex(f[4]);
    if (kind == "advance") {
      lg.height_ = block;
      lg.log_event(block, "advance", "", {}, {});
      continue;
    }
    if (kind == "create") {
      ByteReader r(payload);
      crypto::KeyPair kp;
      kp.public_key = r.var_bytes();
      Coin balance = r.u64();
      lg.create_account(kp, balance);
      continue;
    }
    AccountId actor_id;
    Bytes actor_bytes = from_hex(actor);
    if (actor_bytes.size() != crypto::kDigestLen) throw LedgerError("malformed actor in event log");
    std::copy(actor_bytes.begin(), actor_bytes.end(), actor_id.value.begin());
    if (kind == "transfer" || kind == "ptransfer") {
      ByteReader r(payload);
      AccountId to;
      Bytes to_bytes_ = r.raw(crypto::kDigestLen);
      std::copy(to_bytes_.begin(), to_bytes_.end(), to.value.begin());
      Coin amount = r.u64();
      Transfer t;
      t.from = actor_id;
      t.to = to;
      t.amount = amount;
      t.block = block;
      if (kind == "transfer") {
        t.nonce = r.u64();
        t.signature = sig;
        lg.accounts_[actor_id].nonce = t.nonce + 1;
      } else {
        t.tag = r.str();
        t.protocol = true;
      }
      lg.apply_transfer(t);
      lg.log_event(block, kind, actor, payload, sig);
      continue;
    }
    if (kind == "freeze") {
      lg.require_account(actor_id).frozen = true;
      lg.log_event(block, kind, actor, payload, sig);
      continue;
    }
    if (kind == "unfreeze") {
      lg.require_account(actor_id).frozen = false;
      lg.log_event(block, kind, actor, payload, sig);
      continue;
    }
    if (auto dk = doc_kind_from_name(kind)) {
      PublishedDocument doc;
      doc.publisher = actor_id;
      doc.kind = *dk;
      doc.payload = payload;
      doc.signature = sig;
      doc.block = block;
      doc.seq = lg.doc_seq_++;
      lg.documents_.push_back(doc);
      lg.log_event(block, kind, actor, payload, sig);
      continue;
    }
  }
  return lg;
}

}  // namespace tfcp::ledger
