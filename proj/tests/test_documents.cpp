// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "tfcp/documents.hpp"

using namespace tfcp;
using docs::PreWills;
using docs::Wills;
using ledger::AccountId;

namespace {

crypto::KeyPair keys(const char* name) { return crypto::keygen(crypto::hash(to_bytes(name))); }

struct Fixture {
  crypto::Rng rng{21};
  crypto::KeyPair donor = keys("donor");
  crypto::KeyPair deposit = keys("deposit");
  AccountId donor_id = ledger::account_id_for(donor.public_key);
  AccountId deposit_id = ledger::account_id_for(deposit.public_key);
  crypto::SharedKey key = crypto::random_shared_key(rng);
  std::vector<AccountId> regs = {ledger::account_id_for(keys("r1").public_key),
                                 ledger::account_id_for(keys("r2").public_key)};

  PreWills make() {
    return docs::build_pre_wills(donor, deposit_id, key, 2, regs, 100, to_bytes("heritage"));
  }
};

}  // namespace

TEST_CASE("pre-wills build encrypts the donor address recoverably") {
  Fixture f;
  PreWills pre = f.make();
  CHECK(pre.security_deposit == f.deposit_id);
  CHECK(pre.threshold_t == 2);
  REQUIRE(pre.acceptable_registrars.has_value());
  CHECK(*pre.acceptable_registrars == f.regs);

  auto plain = crypto::decrypt(f.key, pre.encrypted_donor_address,
                               to_bytes(docs::kDonorAddressContext));
  REQUIRE(plain.has_value());
  CHECK(*plain == Bytes(f.donor_id.value.begin(), f.donor_id.value.end()));

  auto heritage = crypto::decrypt(f.key, pre.encrypted_heritage, to_bytes(docs::kHeritageContext));
  REQUIRE(heritage.has_value());
  CHECK(*heritage == to_bytes("heritage"));
}

TEST_CASE("donor account id never appears in plaintext in any serialization") {
  Fixture f;
  PreWills pre = f.make();
  Wills wills = docs::strip_to_wills(pre);
  docs::Announcement ann;
  ann.security_deposit = f.deposit_id;
  ann.wills_reference = 9;

  for (const Bytes& blob : {pre.serialize(), wills.serialize(), ann.serialize()}) {
    auto needle = f.donor_id.span();
    bool found = std::search(blob.begin(), blob.end(), needle.begin(), needle.end()) != blob.end();
    CHECK_FALSE(found);
  }
}

TEST_CASE("stripping removes exactly the registrar list") {
  Fixture f;
  PreWills pre = f.make();
  Wills wills = docs::strip_to_wills(pre);
  CHECK(wills.encrypted_donor_address == pre.encrypted_donor_address);
  CHECK(wills.security_deposit == pre.security_deposit);
  CHECK(wills.threshold_t == pre.threshold_t);
  CHECK(wills.registrar_fee == pre.registrar_fee);
  CHECK(wills.donor_signature == pre.donor_signature);
  CHECK(wills.encrypted_heritage == pre.encrypted_heritage);
}

TEST_CASE("canonical serializations round trip and are stable") {
  Fixture f;
  PreWills pre = f.make();
  CHECK(PreWills::parse(pre.serialize()) == pre);
  CHECK(pre.serialize() == pre.serialize());

  Wills wills = docs::strip_to_wills(pre);
  CHECK(Wills::parse(wills.serialize()) == wills);

  docs::Announcement ann;
  ann.civil_identity = {"Alice Doe", "1970-01-01", "Paris", {"passport:123"}};
  ann.wills_reference = 12;
  ann.security_deposit = f.deposit_id;
  ann.witness_fees = 10;
  ann.deliberation_time = 20;
  ann.threshold_amount = 100;
  CHECK(docs::Announcement::parse(ann.serialize()) == ann);

  docs::PublicWills pw;
  pw.donor = f.donor_id;
  pw.original_wills_block = 12;
  pw.revealing_registrars = f.regs;
  CHECK(docs::PublicWills::parse(pw.serialize()) == pw);

  CHECK_THROWS_AS(PreWills::parse(to_bytes("junk")), Error);
}

TEST_CASE("wills hash excludes the signature field") {
  Fixture f;
  Wills a = docs::strip_to_wills(f.make());
  Wills b = a;
  b.donor_signature = to_bytes("different");
  CHECK(docs::wills_hash(a) == docs::wills_hash(b));
  b.registrar_fee += 1;
  CHECK(docs::wills_hash(a) != docs::wills_hash(b));
}

TEST_CASE("the donor signature over the stripped wills verifies post-reveal") {
  Fixture f;
  PreWills pre = f.make();
  Wills wills = docs::strip_to_wills(pre);
  crypto::Digest h = docs::wills_hash(wills);
  CHECK(crypto::verify(f.donor.public_key, ByteSpan(h.data(), h.size()), wills.donor_signature));

  docs::PublicWills pw;
  pw.donor = f.donor_id;
  pw.original_wills_block = 3;
  CHECK(docs::verify_public_wills(pw, wills, f.donor.public_key, f.key));

  docs::PublicWills wrong = pw;
  wrong.donor = f.deposit_id;
  CHECK_FALSE(docs::verify_public_wills(wrong, wills, f.donor.public_key, f.key));
}

TEST_CASE("pre-wills validation reports and the uncheckable signature") {
  Fixture f;
  ledger::Trace trace;
  ledger::Ledger led(trace);
  led.create_account(f.deposit, 500);
  PreWills pre = f.make();
  auto doc = led.publish_document(f.deposit_id, ledger::DocKind::PreWills, pre.serialize(),
                                  f.deposit.secret_key);

  auto report = docs::validate_pre_wills(doc, led);
  CHECK(report.valid());
  const auto* sig_check = report.find("donor_signature");
  REQUIRE(sig_check != nullptr);
  CHECK(sig_check->status == docs::CheckStatus::Uncheckable);

  // A fee below the network floor fails validation.
  auto strict = docs::validate_pre_wills(doc, led, 1000);
  CHECK_FALSE(strict.valid());
}

TEST_CASE("announcement validation flags a null deliberation time") {
  Fixture f;
  ledger::Trace trace;
  ledger::Ledger led(trace);
  led.create_account(f.deposit, 500);

  docs::Announcement ann;
  ann.civil_identity = {"Alice Doe", "1970-01-01", "Paris", {}};
  ann.security_deposit = f.deposit_id;
  ann.threshold_amount = 100;
  ann.deliberation_time = 0;
  auto doc = led.publish_document(f.deposit_id, ledger::DocKind::Announcement, ann.serialize(),
                                  f.deposit.secret_key);

  auto report = docs::validate_announcement(doc, led);
  CHECK(std::find(report.flags.begin(), report.flags.end(), "null-deliberation-time") !=
        report.flags.end());

  ann.deliberation_time = 10;
  auto doc2 = led.publish_document(f.deposit_id, ledger::DocKind::Announcement, ann.serialize(),
                                   f.deposit.secret_key);
  CHECK(docs::validate_announcement(doc2, led).flags.empty());
}

TEST_CASE("no registrar list means open recruitment") {
  Fixture f;
  PreWills pre = docs::build_pre_wills(f.donor, f.deposit_id, f.key, 2, std::nullopt, 50,
                                       to_bytes("h"));
  CHECK_FALSE(pre.acceptable_registrars.has_value());
  CHECK(PreWills::parse(pre.serialize()) == pre);
}
