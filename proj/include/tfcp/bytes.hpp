// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tfcp {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParamError : Error {
  using Error::Error;
};
struct CryptoError : Error {
  using Error::Error;
};
struct LedgerError : Error {
  using Error::Error;
};
struct PhaseError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct InvariantViolation : Error {
  using Error::Error;
};

std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

// Canonical little-endian, length-prefixed encoding. All on-ledger payloads
// and signed bodies go through this pair so hashes are stable.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(ByteSpan data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void var_bytes(ByteSpan data) {
    u32(static_cast<std::uint32_t>(data.size()));
    raw(data);
  }
  void str(std::string_view s) {
    var_bytes(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }
  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  Bytes raw(std::size_t n) {
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  Bytes var_bytes() { return raw(u32()); }
  std::string str() {
    Bytes b = var_bytes();
    return std::string(b.begin(), b.end());
  }
  bool done() const { return pos_ == data_.size(); }
  void expect_done() const {
    if (!done()) throw Error("trailing bytes in encoded value");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw Error("truncated encoded value");
  }
  ByteSpan data_;
  std::size_t pos_ = 0;
};

}  // namespace tfcp
