// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tfcp/bytes.hpp"

// Simulation-grade cryptography. Interfaces and failure modes are correct;
// none of this resists a real adversary. Every primitive is deterministic
// given its inputs, and all randomness comes from an injected generator so
// whole protocol runs replay exactly.
namespace tfcp::crypto {

using Rng = std::mt19937_64;

constexpr std::size_t kDigestLen = 32;
using Digest = std::array<std::uint8_t, kDigestLen>;
using SharedKey = std::array<std::uint8_t, 32>;
using Signature = Bytes;  // 32 bytes

struct KeyPair {
  Bytes public_key;
  Bytes secret_key;
};

struct Ciphertext {
  Bytes body;
  Digest tag;

  Bytes serialize() const;
  static Ciphertext parse(ByteSpan data);
  bool operator==(const Ciphertext&) const = default;
};

struct Share {
  std::uint8_t index = 0;  // x coordinate, 1..m
  Bytes value;             // one GF(256) element per secret byte

  Bytes serialize() const;
  static Share parse(ByteSpan data);
  bool operator==(const Share&) const = default;
};

Digest hash(ByteSpan data);

// keygen is deterministic in its 32-byte seed.
KeyPair keygen(ByteSpan seed);
Bytes derive_public_key(ByteSpan secret_key);
Signature sign(ByteSpan secret_key, ByteSpan message);
bool verify(ByteSpan public_key, ByteSpan message, ByteSpan signature);

SharedKey random_shared_key(Rng& rng);

Ciphertext encrypt(const SharedKey& key, ByteSpan plaintext, ByteSpan associated_data);
// Authentication failure is the empty optional, never an exception.
std::optional<Bytes> decrypt(const SharedKey& key, const Ciphertext& ct, ByteSpan associated_data);

// Shamir sharing over GF(256), byte-wise, polynomial degree t-1.
std::vector<Share> split_secret(ByteSpan secret, unsigned t, unsigned m, Rng& rng);
Bytes reconstruct_secret(const std::vector<Share>& shares, unsigned t);

namespace gf256 {
// AES field: x^8 + x^4 + x^3 + x + 1.
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);
}  // namespace gf256

}  // namespace tfcp::crypto
