// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfcp/bytes.hpp"
#include "tfcp/crypto.hpp"

namespace tfcp::ledger {

using Coin = std::uint64_t;
using BlockHeight = std::uint64_t;

struct AccountId {
  crypto::Digest value{};

  auto operator<=>(const AccountId&) const = default;
  std::string hex() const { return to_hex(ByteSpan(value.data(), value.size())); }
  ByteSpan span() const { return ByteSpan(value.data(), value.size()); }
};

AccountId account_id_for(ByteSpan public_key);

enum class DocKind {
  PreWills,
  Wills,
  Announcement,
  PublicWills,
  RegistrarAcceptance,
  BailCommitment,
};

const char* doc_kind_name(DocKind k);
std::optional<DocKind> doc_kind_from_name(const std::string& name);

struct Transfer {
  AccountId from;
  AccountId to;
  Coin amount = 0;
  std::uint64_t nonce = 0;
  Bytes signature;      // empty for protocol-enacted settlements
  std::string tag;      // protocol transfers carry a settlement tag
  BlockHeight block = 0;
  bool protocol = false;
};

struct PublishedDocument {
  AccountId publisher;
  DocKind kind = DocKind::PreWills;
  Bytes payload;
  Bytes signature;
  BlockHeight block = 0;
  std::uint64_t seq = 0;  // submission order within the whole run
};

// Append-only line stream shared by the ledger, the engine and the harness.
// Identical (seed, scenario) pairs must produce byte-identical traces.
class Trace {
 public:
  void emit(std::string line) { lines_.push_back(std::move(line)); }
  const std::vector<std::string>& lines() const { return lines_; }
  std::string text() const;

 private:
  std::vector<std::string> lines_;
};

// Minimal account-based ledger with discrete block time. Single-owner state
// machine; every mutation runs on one serialized command stream.
class Ledger {
 public:
  explicit Ledger(Trace& trace);

  AccountId create_account(const crypto::KeyPair& keys, Coin initial_balance);
  Transfer submit_transfer(const AccountId& from, const AccountId& to, Coin amount,
                           ByteSpan secret_key);
  // Settlement moves enacted by protocol rule, not by an account signature.
  // Balance checks still apply; freezes do not.
  Transfer protocol_transfer(const AccountId& from, const AccountId& to, Coin amount,
                             const std::string& tag);
  PublishedDocument publish_document(const AccountId& publisher, DocKind kind, Bytes payload,
                                     ByteSpan secret_key);
  BlockHeight advance_block(std::uint64_t n);

  void freeze_account(const AccountId& account);
  void unfreeze_account(const AccountId& account);
  bool is_frozen(const AccountId& account) const;

  Coin balance_of(const AccountId& account) const;
  Coin total_supply() const { return supply_; }
  BlockHeight height() const { return height_; }
  bool account_exists(const AccountId& account) const;
  const Bytes& public_key_of(const AccountId& account) const;
  std::vector<AccountId> account_ids() const;

  std::vector<PublishedDocument> documents_by_kind(DocKind kind) const;
  std::vector<PublishedDocument> documents_by_publisher(const AccountId& publisher) const;
  std::vector<PublishedDocument> documents_in_range(BlockHeight from, BlockHeight to) const;
  const std::vector<PublishedDocument>& documents() const { return documents_; }
  const std::vector<Transfer>& transfers() const { return transfers_; }

  // Callback fires exactly once, during the advance that first reaches
  // `height`. Registering at or below the current height fires immediately.
  void at_height(BlockHeight height, std::function<void()> callback);
  // Observers see signed transfers only, after they are applied.
  void on_signed_transfer(std::function<void(const Transfer&)> observer);

  Bytes serialize_state() const;
  // Rebuilds ledger state from the ledger-shaped lines of an event log.
  // Non-ledger trace lines are skipped.
  static Ledger replay(const std::vector<std::string>& lines, Trace& trace);

 private:
  struct Account {
    Bytes public_key;
    Coin balance = 0;
    std::uint64_t nonce = 0;
    bool frozen = false;
  };

  Account& require_account(const AccountId& id);
  const Account& require_account(const AccountId& id) const;
  void log_event(BlockHeight block, const std::string& kind, const std::string& actor,
                 ByteSpan payload, ByteSpan sig);
  void apply_transfer(Transfer t);

  Trace& trace_;
  BlockHeight height_ = 0;
  Coin supply_ = 0;
  std::uint64_t doc_seq_ = 0;
  std::map<AccountId, Account> accounts_;
  std::vector<Transfer> transfers_;
  std::vector<PublishedDocument> documents_;
  std::vector<std::pair<BlockHeight, std::function<void()>>> pending_callbacks_;
  std::vector<std::function<void(const Transfer&)>> transfer_observers_;
};

Bytes transfer_signing_bytes(const AccountId& from, const AccountId& to, Coin amount,
                             std::uint64_t nonce);
Bytes document_signing_bytes(const AccountId& publisher, DocKind kind, ByteSpan payload);

}  // namespace tfcp::ledger
