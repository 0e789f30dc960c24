// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tfcp/ledger.hpp"

using namespace tfcp;
using ledger::AccountId;
using ledger::DocKind;
using ledger::Ledger;
using ledger::Trace;

namespace {

crypto::KeyPair keys(const char* name) { return crypto::keygen(crypto::hash(to_bytes(name))); }

}  // namespace

TEST_CASE("account creation, duplicates and supply bookkeeping") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  AccountId id = led.create_account(a, 0);
  CHECK(led.balance_of(id) == 0);
  CHECK(led.total_supply() == 0);
  CHECK_THROWS_AS(led.create_account(a, 5), LedgerError);

  auto b = keys("bob");
  led.create_account(b, 100);
  CHECK(led.total_supply() == 100);
}

TEST_CASE("transfer boundaries, rejection and nonces") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  auto b = keys("bob");
  AccountId ai = led.create_account(a, 10);
  AccountId bi = led.create_account(b, 0);

  SUBCASE("exact balance drains to zero") {
    led.submit_transfer(ai, bi, 10, a.secret_key);
    CHECK(led.balance_of(ai) == 0);
    CHECK(led.balance_of(bi) == 10);
  }
  SUBCASE("overdraft is rejected without state change") {
    CHECK_THROWS_AS(led.submit_transfer(ai, bi, 11, a.secret_key), LedgerError);
    CHECK(led.balance_of(ai) == 10);
    CHECK(led.balance_of(bi) == 0);
  }
  SUBCASE("wrong signing key is rejected") {
    CHECK_THROWS_AS(led.submit_transfer(ai, bi, 1, b.secret_key), LedgerError);
    CHECK(led.balance_of(ai) == 10);
  }
  SUBCASE("nonce increments per accepted transfer") {
    auto t1 = led.submit_transfer(ai, bi, 1, a.secret_key);
    auto t2 = led.submit_transfer(ai, bi, 1, a.secret_key);
    CHECK(t2.nonce == t1.nonce + 1);
  }
}

TEST_CASE("document publication, queries and ordering") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  AccountId ai = led.create_account(a, 0);
  led.advance_block(3);

  led.publish_document(ai, DocKind::Announcement, to_bytes("first"), a.secret_key);
  led.publish_document(ai, DocKind::Announcement, to_bytes("second"), a.secret_key);

  auto mine = led.documents_by_publisher(ai);
  REQUIRE(mine.size() == 2);
  CHECK(mine[0].payload == to_bytes("first"));
  CHECK(mine[1].payload == to_bytes("second"));
  CHECK(mine[0].seq < mine[1].seq);
  CHECK(mine[0].block == 3);

  CHECK(led.documents_in_range(0, 2).empty());
  CHECK(led.documents_in_range(3, 3).size() == 2);
  CHECK(led.documents_by_kind(DocKind::Wills).empty());
}

TEST_CASE("block advancement and single-fire callbacks") {
  Trace trace;
  Ledger led(trace);
  CHECK(led.height() == 0);
  CHECK(led.advance_block(5) == 5);
  CHECK_THROWS_AS(led.advance_block(0), ParamError);

  int fired = 0;
  led.at_height(7, [&] { fired++; });
  led.advance_block(5);
  CHECK(led.height() == 10);
  CHECK(fired == 1);
  led.advance_block(5);
  CHECK(fired == 1);

  // Registering at or below the current height fires immediately.
  led.at_height(4, [&] { fired += 10; });
  CHECK(fired == 11);
}

TEST_CASE("callbacks at one height fire in registration order") {
  Trace trace;
  Ledger led(trace);
  std::vector<int> order;
  led.at_height(2, [&] { order.push_back(1); });
  led.at_height(1, [&] { order.push_back(0); });
  led.at_height(2, [&] { order.push_back(2); });
  led.advance_block(4);
  CHECK(order == std::vector<int>{0, 1, 2});
}

TEST_CASE("freeze blocks outgoing but not incoming transfers") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  auto b = keys("bob");
  AccountId ai = led.create_account(a, 50);
  AccountId bi = led.create_account(b, 50);

  led.freeze_account(ai);
  led.freeze_account(ai);  // idempotent
  CHECK(led.is_frozen(ai));
  CHECK_THROWS_AS(led.submit_transfer(ai, bi, 1, a.secret_key), LedgerError);
  led.submit_transfer(bi, ai, 5, b.secret_key);
  CHECK(led.balance_of(ai) == 55);

  led.unfreeze_account(ai);
  led.submit_transfer(ai, bi, 1, a.secret_key);
  CHECK(led.balance_of(ai) == 54);
}

TEST_CASE("protocol transfers bypass freezes but not balances") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  auto b = keys("bob");
  AccountId ai = led.create_account(a, 50);
  AccountId bi = led.create_account(b, 0);

  led.freeze_account(ai);
  auto t = led.protocol_transfer(ai, bi, 20, "settlement");
  CHECK(t.protocol);
  CHECK(led.balance_of(bi) == 20);
  CHECK_THROWS_AS(led.protocol_transfer(ai, bi, 31, "settlement"), LedgerError);
}

TEST_CASE("coin conservation across arbitrary activity") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  auto b = keys("bob");
  auto c = keys("carol");
  AccountId ai = led.create_account(a, 300);
  AccountId bi = led.create_account(b, 200);
  AccountId ci = led.create_account(c, 0);
  ledger::Coin supply = led.total_supply();

  led.submit_transfer(ai, bi, 120, a.secret_key);
  led.advance_block(2);
  led.submit_transfer(bi, ci, 300, b.secret_key);
  led.protocol_transfer(ci, ai, 10, "fee");

  CHECK(led.balance_of(ai) + led.balance_of(bi) + led.balance_of(ci) == supply);
  CHECK(led.total_supply() == supply);
}

TEST_CASE("replaying the event log reproduces byte-equal state") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  auto b = keys("bob");
  AccountId ai = led.create_account(a, 300);
  AccountId bi = led.create_account(b, 200);
  led.advance_block(4);
  led.submit_transfer(ai, bi, 77, a.secret_key);
  led.publish_document(bi, DocKind::BailCommitment, to_bytes("doc"), b.secret_key);
  led.protocol_transfer(bi, ai, 5, "refund");
  led.advance_block(1);

  Trace replay_trace;
  Ledger replayed = Ledger::replay(trace.lines(), replay_trace);
  CHECK(replayed.serialize_state() == led.serialize_state());
  CHECK(replayed.height() == led.height());
  CHECK(replayed.balance_of(bi) == led.balance_of(bi));
}

TEST_CASE("queries on unknown accounts are errors") {
  Trace trace;
  Ledger led(trace);
  AccountId ghost;
  ghost.value[0] = 9;
  CHECK_THROWS_AS(led.balance_of(ghost), LedgerError);
  CHECK_FALSE(led.account_exists(ghost));
}

TEST_CASE("signed-transfer observers see applied transfers only") {
  Trace trace;
  Ledger led(trace);
  auto a = keys("alice");
  auto b = keys("bob");
  AccountId ai = led.create_account(a, 50);
  AccountId bi = led.create_account(b, 0);

  std::vector<ledger::Coin> seen;
  led.on_signed_transfer([&](const ledger::Transfer& t) { seen.push_back(t.amount); });
  led.submit_transfer(ai, bi, 7, a.secret_key);
  led.protocol_transfer(ai, bi, 3, "settlement");
  CHECK_THROWS_AS(led.submit_transfer(ai, bi, 999, a.secret_key), LedgerError);
  CHECK(seen == std::vector<ledger::Coin>{7});
}
