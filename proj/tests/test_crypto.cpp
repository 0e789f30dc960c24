// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "tfcp/crypto.hpp"

using namespace tfcp;
using crypto::Share;

// Independent GF(256) oracle, written from the field definition alone:
// Russian-peasant multiplication and brute-force inversion. Nothing here is
// shared with the library implementation.
namespace oracle {

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & 1) p ^= a;
    bool hi = a & 0x80;
    a = static_cast<std::uint8_t>(a << 1);
    if (hi) a ^= 0x1b;
    b >>= 1;
  }
  return p;
}

std::uint8_t inv(std::uint8_t a) {
  REQUIRE(a != 0);
  for (int x = 1; x < 256; ++x) {
    if (mul(a, static_cast<std::uint8_t>(x)) == 1) return static_cast<std::uint8_t>(x);
  }
  FAIL("no inverse found");
  return 0;
}

// Lagrange interpolation at x=0 over the oracle field.
std::uint8_t interpolate_at_zero(const std::vector<std::pair<std::uint8_t, std::uint8_t>>& pts) {
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::uint8_t num = 1, den = 1;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      num = mul(num, pts[j].first);
      den = mul(den, static_cast<std::uint8_t>(pts[i].first ^ pts[j].first));
    }
    acc ^= mul(pts[i].second, mul(num, inv(den)));
  }
  return acc;
}

}  // namespace oracle

TEST_CASE("library field matches the oracle exhaustively") {
  for (int a = 0; a < 256; ++a)
    for (int b = 0; b < 256; ++b)
      REQUIRE(crypto::gf256::mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) ==
              oracle::mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)));
  for (int a = 1; a < 256; ++a)
    CHECK(crypto::gf256::inv(static_cast<std::uint8_t>(a)) ==
          oracle::inv(static_cast<std::uint8_t>(a)));
}

TEST_CASE("hash is deterministic and input sensitive") {
  Bytes m = to_bytes("the quick brown fox");
  CHECK(crypto::hash(m) == crypto::hash(m));
  Bytes m2 = m;
  m2[0] ^= 1;
  CHECK(crypto::hash(m) != crypto::hash(m2));
  CHECK(crypto::hash(Bytes{}) != crypto::hash(to_bytes("x")));
}

TEST_CASE("signature round trip, tamper and wrong key") {
  auto kp = crypto::keygen(crypto::hash(to_bytes("seed-one")));
  auto other = crypto::keygen(crypto::hash(to_bytes("seed-two")));
  Bytes m = to_bytes("message");
  auto sig = crypto::sign(kp.secret_key, m);
  CHECK(crypto::verify(kp.public_key, m, sig));
  Bytes tampered = m;
  tampered.back() ^= 0x01;
  CHECK_FALSE(crypto::verify(kp.public_key, tampered, sig));
  CHECK_FALSE(crypto::verify(other.public_key, m, sig));
  CHECK(crypto::derive_public_key(kp.secret_key) == kp.public_key);
}

TEST_CASE("keygen is deterministic in its seed") {
  auto a = crypto::keygen(crypto::hash(to_bytes("same")));
  auto b = crypto::keygen(crypto::hash(to_bytes("same")));
  CHECK(a.public_key == b.public_key);
  CHECK(a.secret_key == b.secret_key);
  CHECK(crypto::keygen(crypto::hash(to_bytes("else"))).public_key != a.public_key);
}

TEST_CASE("aead round trip including empty plaintext") {
  crypto::Rng rng(7);
  auto key = crypto::random_shared_key(rng);
  Bytes ad = to_bytes("context");

  auto ct = crypto::encrypt(key, Bytes{}, ad);
  auto pt = crypto::decrypt(key, ct, ad);
  REQUIRE(pt.has_value());
  CHECK(pt->empty());

  Bytes msg = to_bytes("attack at dawn");
  auto ct2 = crypto::encrypt(key, msg, ad);
  auto pt2 = crypto::decrypt(key, ct2, ad);
  REQUIRE(pt2.has_value());
  CHECK(*pt2 == msg);
}

TEST_CASE("aead rejects tampering, wrong key, wrong associated data") {
  crypto::Rng rng(8);
  auto key = crypto::random_shared_key(rng);
  auto key2 = crypto::random_shared_key(rng);
  Bytes ad = to_bytes("ad");
  Bytes msg = to_bytes("secret payload");
  auto ct = crypto::encrypt(key, msg, ad);

  auto flipped = ct;
  flipped.body[0] ^= 0x80;
  CHECK_FALSE(crypto::decrypt(key, flipped, ad).has_value());

  auto bad_tag = ct;
  bad_tag.tag[0] ^= 1;
  CHECK_FALSE(crypto::decrypt(key, bad_tag, ad).has_value());

  CHECK_FALSE(crypto::decrypt(key2, ct, ad).has_value());
  CHECK_FALSE(crypto::decrypt(key, ct, to_bytes("other ad")).has_value());
}

TEST_CASE("share and ciphertext serialization round trips") {
  crypto::Rng rng(9);
  auto key = crypto::random_shared_key(rng);
  auto ct = crypto::encrypt(key, to_bytes("payload"), to_bytes("ad"));
  auto ct2 = crypto::Ciphertext::parse(ct.serialize());
  CHECK(ct == ct2);

  Share s{3, to_bytes("\x01\x02\x03")};
  CHECK(Share::parse(s.serialize()) == s);

  Bytes garbage = to_bytes("zz");
  CHECK_THROWS_AS(Share::parse(garbage), Error);
}

TEST_CASE("t=1 sharing is the degenerate copy") {
  crypto::Rng rng(10);
  Bytes secret = to_bytes("degenerate");
  auto shares = crypto::split_secret(secret, 1, 3, rng);
  REQUIRE(shares.size() == 3);
  for (const auto& s : shares) CHECK(s.value == secret);
  CHECK(crypto::reconstruct_secret({shares[1]}, 1) == secret);
}

TEST_CASE("full-set round trip t=3 m=3") {
  crypto::Rng rng(11);
  Bytes secret = to_bytes("full set secret");
  auto shares = crypto::split_secret(secret, 3, 3, rng);
  CHECK(crypto::reconstruct_secret(shares, 3) == secret);
}

TEST_CASE("byte 0x2A with t=2 m=3 reconstructs via every pair, against the oracle") {
  crypto::Rng rng(12);
  Bytes secret{0x2A};
  auto shares = crypto::split_secret(secret, 2, 3, rng);
  REQUIRE(shares.size() == 3);
  std::vector<std::uint8_t> xs{shares[0].index, shares[1].index, shares[2].index};
  std::sort(xs.begin(), xs.end());
  CHECK(xs == std::vector<std::uint8_t>{1, 2, 3});

  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      auto lib = crypto::reconstruct_secret({shares[i], shares[j]}, 2);
      REQUIRE(lib.size() == 1);
      CHECK(lib[0] == 0x2A);
      std::uint8_t ind = oracle::interpolate_at_zero(
          {{shares[i].index, shares[i].value[0]}, {shares[j].index, shares[j].value[0]}});
      CHECK(ind == 0x2A);
    }
  }
}

namespace {

void for_each_subset(std::size_t m, std::size_t k,
                     const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (idx[i] != i + m - k) break;
      if (i == 0) return;
    }
    ++idx[i];
    for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

TEST_CASE("every t-subset reconstructs, exhaustive over 1 <= t <= m <= 5") {
  crypto::Rng rng(13);
  for (unsigned m = 1; m <= 5; ++m) {
    for (unsigned t = 1; t <= m; ++t) {
      Bytes secret(32);
      for (auto& b : secret) b = static_cast<std::uint8_t>(rng());
      auto shares = crypto::split_secret(secret, t, m, rng);
      for_each_subset(m, t, [&](const std::vector<std::size_t>& pick) {
        std::vector<Share> subset;
        for (std::size_t p : pick) subset.push_back(shares[p]);
        REQUIRE(crypto::reconstruct_secret(subset, t) == secret);
      });
    }
  }
}

TEST_CASE("a single share of a t=2 sharing is consistent with all 256 secrets") {
  crypto::Rng rng(14);
  Bytes secret{0x5C};
  auto shares = crypto::split_secret(secret, 2, 3, rng);
  for (const auto& s : shares) {
    // Brute force over every degree-1 polynomial through the share point:
    // the secrets they imply at x=0 must cover all 256 candidates.
    std::vector<bool> reachable(256, false);
    for (int slope = 0; slope < 256; ++slope) {
      std::uint8_t c = static_cast<std::uint8_t>(
          s.value[0] ^ oracle::mul(static_cast<std::uint8_t>(slope), s.index));
      reachable[c] = true;
    }
    CHECK(std::all_of(reachable.begin(), reachable.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("sharing parameter and reconstruction errors") {
  crypto::Rng rng(15);
  Bytes secret = to_bytes("s");
  CHECK_THROWS_AS(crypto::split_secret(secret, 3, 2, rng), ParamError);
  CHECK_THROWS_AS(crypto::split_secret(secret, 0, 2, rng), ParamError);

  auto shares = crypto::split_secret(secret, 2, 3, rng);
  CHECK_THROWS_AS(crypto::reconstruct_secret({shares[0]}, 2), Error);
  CHECK_THROWS_AS(crypto::reconstruct_secret({shares[0], shares[0]}, 2), Error);
}
