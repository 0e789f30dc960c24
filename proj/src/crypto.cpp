// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/crypto.hpp"

#include <algorithm>
#include <cstring>
#include <set>

namespace tfcp::crypto {

// ---------------------------------------------------------------------------
// Hash: a 4-lane splitmix sponge. Fixed 32-byte output, explicit
// little-endian, no platform dependence.

static std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

static std::uint64_t rotl(std::uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

Digest hash(ByteSpan data) {
  std::uint64_t s[4] = {
      0x6a09e667f3bcc908ull ^ static_cast<std::uint64_t>(data.size()),
      0xbb67ae8584caa73bull,
      0x3c6ef372fe94f82bull,
      0xa54ff53a5f1d36f1ull,
  };
  std::size_t lane = 0;
  std::size_t i = 0;
  while (i < data.size()) {
    std::uint64_t w = 0;
    std::size_t n = std::min<std::size_t>(8, data.size() - i);
    for (std::size_t j = 0; j < n; ++j) w |= static_cast<std::uint64_t>(data[i + j]) << (8 * j);
    i += n;
    s[lane] = mix64(s[lane] ^ w);
    s[(lane + 1) % 4] += rotl(s[lane], 17);
    lane = (lane + 1) % 4;
  }
  for (int round = 0; round < 4; ++round) {
    for (int l = 0; l < 4; ++l) {
      s[l] = mix64(s[l] ^ rotl(s[(l + 1) % 4], 13) ^ s[(l + 3) % 4]);
    }
  }
  Digest out{};
  for (int l = 0; l < 4; ++l) {
    for (int j = 0; j < 8; ++j) out[l * 8 + j] = static_cast<std::uint8_t>(s[l] >> (8 * j));
  }
  return out;
}

static Digest hash_cat(std::initializer_list<ByteSpan> parts) {
  Bytes buf;
  for (ByteSpan p : parts) buf.insert(buf.end(), p.begin(), p.end());
  return hash(buf);
}

static ByteSpan span_of(const Digest& d) {
  return ByteSpan(d.data(), d.size());
}

static Bytes bytes_of(const Digest& d) {
  return Bytes(d.begin(), d.end());
}

// ---------------------------------------------------------------------------
// Signatures. pk = H(sk || "pk"); sig = H(pk || "sig" || m). Round trip and
// tamper rejection hold; unforgeability is explicitly not claimed.

static const Bytes kPkTag = to_bytes("tfcp-pk");
static const Bytes kSigTag = to_bytes("tfcp-sig");
static const Bytes kSkTag = to_bytes("tfcp-sk");

Bytes derive_public_key(ByteSpan secret_key) {
  return bytes_of(hash_cat({secret_key, kPkTag}));
}

KeyPair keygen(ByteSpan seed) {
  if (seed.size() != 32) throw ParamError("keygen seed must be exactly 32 bytes");
  KeyPair kp;
  kp.secret_key = bytes_of(hash_cat({seed, kSkTag}));
  kp.public_key = derive_public_key(kp.secret_key);
  return kp;
}

Signature sign(ByteSpan secret_key, ByteSpan message) {
  Bytes pk = derive_public_key(secret_key);
  return bytes_of(hash_cat({pk, kSigTag, message}));
}

bool verify(ByteSpan public_key, ByteSpan message, ByteSpan signature) {
  Bytes expected = bytes_of(hash_cat({public_key, kSigTag, message}));
  return signature.size() == expected.size() &&
         std::equal(expected.begin(), expected.end(), signature.begin());
}

// ---------------------------------------------------------------------------
// Authenticated encryption: hash-keystream XOR, encrypt-then-MAC.

static const Bytes kStreamTag = to_bytes("tfcp-ks");
static const Bytes kMacTag = to_bytes("tfcp-mac");

static void apply_keystream(const SharedKey& key, Bytes& data) {
  for (std::size_t block = 0; block * kDigestLen < data.size(); ++block) {
    ByteWriter ctr;
    ctr.u64(block);
    Digest ks = hash_cat({ByteSpan(key.data(), key.size()), kStreamTag, ctr.bytes()});
    std::size_t base = block * kDigestLen;
    std::size_t n = std::min(kDigestLen, data.size() - base);
    for (std::size_t j = 0; j < n; ++j) data[base + j] ^= ks[j];
  }
}

static Digest mac(const SharedKey& key, ByteSpan ad, ByteSpan body) {
  ByteWriter w;
  w.var_bytes(ad);
  w.var_bytes(body);
  return hash_cat({ByteSpan(key.data(), key.size()), kMacTag, w.bytes()});
}

Ciphertext encrypt(const SharedKey& key, ByteSpan plaintext, ByteSpan associated_data) {
  Ciphertext ct;
  ct.body.assign(plaintext.begin(), plaintext.end());
  apply_keystream(key, ct.body);
  ct.tag = mac(key, associated_data, ct.body);
  return ct;
}

std::optional<Bytes> decrypt(const SharedKey& key, const Ciphertext& ct, ByteSpan associated_data) {
  if (mac(key, associated_data, ct.body) != ct.tag) return std::nullopt;
  Bytes pt = ct.body;
  apply_keystream(key, pt);
  return pt;
}

SharedKey random_shared_key(Rng& rng) {
  SharedKey k{};
  for (auto& b : k) b = static_cast<std::uint8_t>(rng() & 0xff);
  return k;
}

// ---------------------------------------------------------------------------
// GF(256) arithmetic and Shamir sharing.

namespace gf256 {

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b) {
    if (b & 1) p ^= a;
    bool hi = a & 0x80;
    a = static_cast<std::uint8_t>(a << 1);
    if (hi) a ^= 0x1b;  // x^8 reduced by x^4 + x^3 + x + 1
    b >>= 1;
  }
  return p;
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw CryptoError("gf256 inverse of zero");
  // a^254 by square-and-multiply
  std::uint8_t r = 1;
  std::uint8_t base = a;
  int e = 254;
  while (e) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

}  // namespace gf256

static std::uint8_t poly_eval(const std::vector<std::uint8_t>& coeffs, std::uint8_t x) {
  std::uint8_t acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = static_cast<std::uint8_t>(gf256::mul(acc, x) ^ *it);
  }
  return acc;
}

std::vector<Share> split_secret(ByteSpan secret, unsigned t, unsigned m, Rng& rng) {
  if (t < 1 || t > m) throw ParamError("threshold t must satisfy 1 <= t <= m");
  if (m > 255) throw ParamError("at most 255 shares over GF(256)");
  std::vector<Share> shares(m);
  for (unsigned j = 0; j < m; ++j) {
    shares[j].index = static_cast<std::uint8_t>(j + 1);
    shares[j].value.resize(secret.size());
  }
  std::vector<std::uint8_t> coeffs(t);
  for (std::size_t byte = 0; byte < secret.size(); ++byte) {
    coeffs[0] = secret[byte];
    for (unsigned d = 1; d < t; ++d) coeffs[d] = static_cast<std::uint8_t>(rng() & 0xff);
    for (unsigned j = 0; j < m; ++j) {
      shares[j].value[byte] = poly_eval(coeffs, shares[j].index);
    }
  }
  return shares;
}

Bytes reconstruct_secret(const std::vector<Share>& shares, unsigned t) {
  if (t < 1) throw ParamError("threshold t must be >= 1");
  if (shares.size() < t) throw CryptoError("insufficient shares for reconstruction");
  std::set<std::uint8_t> seen;
  for (const Share& s : shares) {
    if (s.index == 0) throw CryptoError("malformed share index 0");
    if (!seen.insert(s.index).second) throw CryptoError("duplicate share index");
    if (s.value.size() != shares.front().value.size())
      throw CryptoError("shares have mismatched value lengths");
  }
  // Lagrange interpolation at x = 0 over the first t shares.
  std::vector<const Share*> used;
  for (unsigned i = 0; i < t; ++i) used.push_back(&shares[i]);
  std::vector<std::uint8_t> weights(t);
  for (unsigned i = 0; i < t; ++i) {
    std::uint8_t num = 1, den = 1;
    for (unsigned j = 0; j < t; ++j) {
      if (i == j) continue;
      num = gf256::mul(num, used[j]->index);
      den = gf256::mul(den, static_cast<std::uint8_t>(used[j]->index ^ used[i]->index));
    }
    weights[i] = gf256::mul(num, gf256::inv(den));
  }
  Bytes secret(used.front()->value.size(), 0);
  for (std::size_t byte = 0; byte < secret.size(); ++byte) {
    std::uint8_t acc = 0;
    for (unsigned i = 0; i < t; ++i) acc ^= gf256::mul(weights[i], used[i]->value[byte]);
    secret[byte] = acc;
  }
  return secret;
}

// ---------------------------------------------------------------------------
// Length-prefixed serialization with a version tag.

static constexpr std::uint8_t kShareVersion = 1;
static constexpr std::uint8_t kCiphertextVersion = 1;

Bytes Share::serialize() const {
  ByteWriter w;
  w.u8(kShareVersion);
  w.u8(index);
  w.var_bytes(value);
  return w.take();
}

Share Share::parse(ByteSpan data) {
  ByteReader r(data);
  if (r.u8() != kShareVersion) throw CryptoError("unknown share version");
  Share s;
  s.index = r.u8();
  s.value = r.var_bytes();
  r.expect_done();
  return s;
}

Bytes Ciphertext::serialize() const {
  ByteWriter w;
  w.u8(kCiphertextVersion);
  w.var_bytes(body);
  w.raw(span_of(tag));
  return w.take();
}

Ciphertext Ciphertext::parse(ByteSpan data) {
  ByteReader r(data);
  if (r.u8() != kCiphertextVersion) throw CryptoError("unknown ciphertext version");
  Ciphertext ct;
  ct.body = r.var_bytes();
  Bytes tag = r.raw(kDigestLen);
  std::copy(tag.begin(), tag.end(), ct.tag.begin());
  r.expect_done();
  return ct;
}

}  // namespace tfcp::crypto
