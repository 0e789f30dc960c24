// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/documents.hpp"

#include <algorithm>

namespace tfcp::docs {

static constexpr std::uint8_t kDocVersion = 1;

static void write_account(ByteWriter& w, const AccountId& id) {
  w.raw(id.span());
}

static AccountId read_account(ByteReader& r) {
  Bytes b = r.raw(crypto::kDigestLen);
  AccountId id;
  std::copy(b.begin(), b.end(), id.value.begin());
  return id;
}

static void write_ciphertext(ByteWriter& w, const crypto::Ciphertext& ct) {
  w.var_bytes(ct.serialize());
}

static crypto::Ciphertext read_ciphertext(ByteReader& r) {
  return crypto::Ciphertext::parse(r.var_bytes());
}

// ---------------------------------------------------------------------------
// PreWills

Bytes PreWills::serialize() const {
  ByteWriter w;
  w.u8(kDocVersion);
  write_ciphertext(w, encrypted_donor_address);
  write_account(w, security_deposit);
  w.u32(threshold_t);
  w.u8(acceptable_registrars ? 1 : 0);
  if (acceptable_registrars) {
    w.u32(static_cast<std::uint32_t>(acceptable_registrars->size()));
    for (const auto& r : *acceptable_registrars) write_account(w, r);
  }
  w.u64(registrar_fee);
  w.var_bytes(donor_signature);
  write_ciphertext(w, encrypted_heritage);
  return w.take();
}

PreWills PreWills::parse(ByteSpan data) {
  ByteReader r(data);
  if (r.u8() != kDocVersion) throw Error("unknown pre-wills version");
  PreWills p;
  p.encrypted_donor_address = read_ciphertext(r);
  p.security_deposit = read_account(r);
  p.threshold_t = r.u32();
  if (r.u8()) {
    std::uint32_t n = r.u32();
    std::vector<AccountId> regs;
    regs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) regs.push_back(read_account(r));
    p.acceptable_registrars = std::move(regs);
  }
  p.registrar_fee = r.u64();
  p.donor_signature = r.var_bytes();
  p.encrypted_heritage = read_ciphertext(r);
  r.expect_done();
  return p;
}

// ---------------------------------------------------------------------------
// Wills

Bytes Wills::serialize() const {
  ByteWriter w;
  w.u8(kDocVersion);
  write_ciphertext(w, encrypted_donor_address);
  write_account(w, security_deposit);
  w.u32(threshold_t);
  w.u64(registrar_fee);
  w.var_bytes(donor_signature);
  write_ciphertext(w, encrypted_heritage);
  return w.take();
}

Wills Wills::parse(ByteSpan data) {
  ByteReader r(data);
  if (r.u8() != kDocVersion) throw Error("unknown wills version");
  Wills d;
  d.encrypted_donor_address = read_ciphertext(r);
  d.security_deposit = read_account(r);
  d.threshold_t = r.u32();
  d.registrar_fee = r.u64();
  d.donor_signature = r.var_bytes();
  d.encrypted_heritage = read_ciphertext(r);
  r.expect_done();
  return d;
}

Bytes wills_signing_bytes(const Wills& wills) {
  Wills unsigned_copy = wills;
  unsigned_copy.donor_signature.clear();
  ByteWriter w;
  w.str("tfcp-wills-hash");
  w.var_bytes(unsigned_copy.serialize());
  return w.take();
}

crypto::Digest wills_hash(const Wills& wills) {
  return crypto::hash(wills_signing_bytes(wills));
}

Wills strip_to_wills(const PreWills& pre) {
  Wills w;
  w.encrypted_donor_address = pre.encrypted_donor_address;
  w.security_deposit = pre.security_deposit;
  w.threshold_t = pre.threshold_t;
  w.registrar_fee = pre.registrar_fee;
  w.donor_signature = pre.donor_signature;
  w.encrypted_heritage = pre.encrypted_heritage;
  return w;
}

PreWills build_pre_wills(const crypto::KeyPair& donor_keys, const AccountId& security_deposit,
                         const crypto::SharedKey& shared_key, std::uint32_t threshold_t,
                         std::optional<std::vector<AccountId>> acceptable_registrars,
                         Coin registrar_fee, ByteSpan heritage_plaintext) {
  if (threshold_t < 1) throw ParamError("threshold_t must be >= 1");
  if (acceptable_registrars && acceptable_registrars->empty())
    throw ParamError("acceptable registrar list, when present, must be non-empty");
  PreWills p;
  AccountId donor = ledger::account_id_for(donor_keys.public_key);
  p.encrypted_donor_address = crypto::encrypt(shared_key, donor.span(), to_bytes(kDonorAddressContext));
  p.security_deposit = security_deposit;
  p.threshold_t = threshold_t;
  p.acceptable_registrars = std::move(acceptable_registrars);
  p.registrar_fee = registrar_fee;
  p.encrypted_heritage = crypto::encrypt(shared_key, heritage_plaintext, to_bytes(kHeritageContext));
  // Sign the hash of the Wills this pre-Wills will become after stripping.
  Wills future = strip_to_wills(p);
  crypto::Digest h = wills_hash(future);
  p.donor_signature = crypto::sign(donor_keys.secret_key, ByteSpan(h.data(), h.size()));
  return p;
}

// ---------------------------------------------------------------------------
// Announcement

Bytes Announcement::serialize() const {
  ByteWriter w;
  w.u8(kDocVersion);
  w.str(civil_identity.name);
  w.str(civil_identity.birth_date);
  w.str(civil_identity.birth_place);
  w.u32(static_cast<std::uint32_t>(civil_identity.extra_ids.size()));
  for (const auto& s : civil_identity.extra_ids) w.str(s);
  w.u64(wills_reference);
  write_account(w, security_deposit);
  w.u64(witness_fees);
  w.u64(deliberation_time);
  w.u64(threshold_amount);
  return w.take();
}

Announcement Announcement::parse(ByteSpan data) {
  ByteReader r(data);
  if (r.u8() != kDocVersion) throw Error("unknown announcement version");
  Announcement a;
  a.civil_identity.name = r.str();
  a.civil_identity.birth_date = r.str();
  a.civil_identity.birth_place = r.str();
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) a.civil_identity.extra_ids.push_back(r.str());
  a.wills_reference = r.u64();
  a.security_deposit = read_account(r);
  a.witness_fees = r.u64();
  a.deliberation_time = r.u64();
  a.threshold_amount = r.u64();
  r.expect_done();
  return a;
}

// ---------------------------------------------------------------------------
// PublicWills

Bytes PublicWills::serialize() const {
  ByteWriter w;
  w.u8(kDocVersion);
  write_account(w, donor);
  w.u64(original_wills_block);
  w.u32(static_cast<std::uint32_t>(revealing_registrars.size()));
  for (const auto& r : revealing_registrars) write_account(w, r);
  return w.take();
}

PublicWills PublicWills::parse(ByteSpan data) {
  ByteReader r(data);
  if (r.u8() != kDocVersion) throw Error("unknown public-wills version");
  PublicWills p;
  p.donor = read_account(r);
  p.original_wills_block = r.u64();
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) p.revealing_registrars.push_back(read_account(r));
  r.expect_done();
  return p;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::valid() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const Check& c) { return c.status == CheckStatus::Fail; });
}

const ValidationReport::Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

static void add_check(ValidationReport& rep, std::string name, bool ok, std::string detail = {}) {
  rep.checks.push_back({std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail,
                        std::move(detail)});
}

ValidationReport validate_pre_wills(const ledger::PublishedDocument& doc,
                                    const ledger::Ledger& ledger, Coin min_registrar_fee) {
  ValidationReport rep;
  PreWills p;
  try {
    p = PreWills::parse(doc.payload);
  } catch (const Error& e) {
    rep.checks.push_back({"parse", CheckStatus::Fail, e.what()});
    return rep;
  }
  add_check(rep, "parse", true);

  bool sig_ok = false;
  if (ledger.account_exists(doc.publisher)) {
    Bytes body = ledger::document_signing_bytes(doc.publisher, doc.kind, doc.payload);
    sig_ok = crypto::verify(ledger.public_key_of(doc.publisher), body, doc.signature);
  }
  add_check(rep, "security_deposit_signature", sig_ok);
  add_check(rep, "publisher_is_security_deposit", doc.publisher == p.security_deposit);
  add_check(rep, "threshold_sane", p.threshold_t >= 1);
  add_check(rep, "registrar_fee_minimum", p.registrar_fee >= min_registrar_fee);
  bool list_ok = !p.acceptable_registrars || !p.acceptable_registrars->empty();
  add_check(rep, "registrar_list_well_formed", list_ok);
  // The donor's signature binds the pre-Wills to a donor account, but no
  // registrar can check it before the reveal.
  rep.checks.push_back({"donor_signature", CheckStatus::Uncheckable,
                        "checkable only after the Acknowledgment reveal"});
  return rep;
}

ValidationReport validate_announcement(const ledger::PublishedDocument& doc,
                                       const ledger::Ledger& ledger) {
  ValidationReport rep;
  Announcement a;
  try {
    a = Announcement::parse(doc.payload);
  } catch (const Error& e) {
    rep.checks.push_back({"parse", CheckStatus::Fail, e.what()});
    return rep;
  }
  add_check(rep, "parse", true);

  bool sig_ok = false;
  if (ledger.account_exists(doc.publisher)) {
    Bytes body = ledger::document_signing_bytes(doc.publisher, doc.kind, doc.payload);
    sig_ok = crypto::verify(ledger.public_key_of(doc.publisher), body, doc.signature);
  }
  add_check(rep, "security_deposit_signature", sig_ok);
  add_check(rep, "announcement_matches_deposit", doc.publisher == a.security_deposit);
  add_check(rep, "threshold_amount_positive", a.threshold_amount > 0);

  bool wills_found = false;
  for (const auto& d : ledger.documents_in_range(a.wills_reference, a.wills_reference)) {
    if (d.kind == ledger::DocKind::Wills && d.publisher == a.security_deposit) {
      wills_found = true;
      break;
    }
  }
  add_check(rep, "wills_reference_resolves", wills_found);
  if (a.deliberation_time == 0) rep.flags.push_back("null-deliberation-time");
  return rep;
}

bool verify_public_wills(const PublicWills& pw, const Wills& wills, ByteSpan donor_public_key,
                         const crypto::SharedKey& reconstructed_key) {
  crypto::Digest h = wills_hash(wills);
  if (!crypto::verify(donor_public_key, ByteSpan(h.data(), h.size()), wills.donor_signature))
    return false;
  auto plain = crypto::decrypt(reconstructed_key, wills.encrypted_donor_address,
                               to_bytes(kDonorAddressContext));
  if (!plain || plain->size() != crypto::kDigestLen) return false;
  AccountId decrypted;
  std::copy(plain->begin(), plain->end(), decrypted.value.begin());
  return decrypted == pw.donor;
}

}  // namespace tfcp::docs
