// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfcp/crypto.hpp"
#include "tfcp/ledger.hpp"

namespace tfcp::docs {

using ledger::AccountId;
using ledger::BlockHeight;
using ledger::Coin;

// Free-text civil identity; the simulation only ever compares for equality.
struct CivilIdentity {
  std::string name;
  std::string birth_date;
  std::string birth_place;
  std::vector<std::string> extra_ids;

  bool operator==(const CivilIdentity&) const = default;
};

struct Wills;

struct PreWills {
  crypto::Ciphertext encrypted_donor_address;  // donor AccountId under the shared key
  AccountId security_deposit;
  std::uint32_t threshold_t = 0;
  std::optional<std::vector<AccountId>> acceptable_registrars;
  Coin registrar_fee = 0;
  Bytes donor_signature;  // over hash of the stripped Wills, checkable post-reveal only
  crypto::Ciphertext encrypted_heritage;  // opaque beneficiary instructions

  Bytes serialize() const;
  static PreWills parse(ByteSpan data);
  bool operator==(const PreWills&) const = default;
};

struct Wills {
  crypto::Ciphertext encrypted_donor_address;
  AccountId security_deposit;
  std::uint32_t threshold_t = 0;
  Coin registrar_fee = 0;
  Bytes donor_signature;
  crypto::Ciphertext encrypted_heritage;

  Bytes serialize() const;
  static Wills parse(ByteSpan data);
  bool operator==(const Wills&) const = default;
};

struct Announcement {
  CivilIdentity civil_identity;
  BlockHeight wills_reference = 0;  // block of the Wills publication
  AccountId security_deposit;
  Coin witness_fees = 0;
  BlockHeight deliberation_time = 0;
  Coin threshold_amount = 0;

  Bytes serialize() const;
  static Announcement parse(ByteSpan data);
  bool operator==(const Announcement&) const = default;
};

struct PublicWills {
  AccountId donor;
  BlockHeight original_wills_block = 0;
  std::vector<AccountId> revealing_registrars;

  Bytes serialize() const;
  static PublicWills parse(ByteSpan data);
  bool operator==(const PublicWills&) const = default;
};

inline const char* kDonorAddressContext = "TFCP-donor";
inline const char* kHeritageContext = "TFCP-heritage";

// The donor signs the hash of the Wills before the Wills exists on the
// ledger; the hash therefore covers the canonical Wills serialization with
// the signature field itself excluded.
Bytes wills_signing_bytes(const Wills& wills);
crypto::Digest wills_hash(const Wills& wills);

Wills strip_to_wills(const PreWills& pre);

PreWills build_pre_wills(const crypto::KeyPair& donor_keys, const AccountId& security_deposit,
                         const crypto::SharedKey& shared_key, std::uint32_t threshold_t,
                         std::optional<std::vector<AccountId>> acceptable_registrars,
                         Coin registrar_fee, ByteSpan heritage_plaintext);

enum class CheckStatus { Pass, Fail, Uncheckable };

struct ValidationReport {
  struct Check {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;
  };
  std::vector<Check> checks;
  std::vector<std::string> flags;

  bool valid() const;
  const Check* find(const std::string& name) const;
};

ValidationReport validate_pre_wills(const ledger::PublishedDocument& doc,
                                    const ledger::Ledger& ledger, Coin min_registrar_fee = 0);
ValidationReport validate_announcement(const ledger::PublishedDocument& doc,
                                       const ledger::Ledger& ledger);

bool verify_public_wills(const PublicWills& pw, const Wills& wills, ByteSpan donor_public_key,
                         const crypto::SharedKey& reconstructed_key);

}  // namespace tfcp::docs
