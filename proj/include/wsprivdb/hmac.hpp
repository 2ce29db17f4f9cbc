// Copyright 2026 The wsprivdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "wsprivdb/bytes.hpp"

namespace wsprivdb {

inline constexpr std::size_t kMacBytes = 32;
using Mac = std::array<std::uint8_t, kMacBytes>;

// A kappa-bit symmetric key. kappa defaults to 256; other sizes must be a
// positive multiple of 8.
class SecretKey {
 public:
  static constexpr std::size_t kDefaultBits = 256;

  explicit SecretKey(Bytes key_bytes);

  // Fresh key from the operating system CSPRNG.
  static SecretKey random(std::size_t bits = kDefaultBits);

  ByteView bytes() const noexcept { return key_; }
  std::size_t bits() const noexcept { return key_.size() * 8; }

  friend bool operator==(const SecretKey&, const SecretKey&) = default;

 private:
  Bytes key_;
};

// HMAC-SHA256 with the key schedule done once; mac() may be called any
// number of times. Not thread-safe: give each thread its own instance.
class HmacSha256 {
 public:
  explicit HmacSha256(const SecretKey& key);
  ~HmacSha256();
  HmacSha256(HmacSha256&&) noexcept;
  HmacSha256& operator=(HmacSha256&&) noexcept;
  HmacSha256(const HmacSha256&) = delete;
  HmacSha256& operator=(const HmacSha256&) = delete;

  Mac mac(ByteView message);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Mac hmac_sha256(ByteView key, ByteView message);

class KeySource {
 public:
  virtual ~KeySource() = default;
  virtual SecretKey next(std::size_t bits = SecretKey::kDefaultBits) = 0;
};

// Keys from the operating system CSPRNG.
class SystemKeySource final : public KeySource {
 public:
  SecretKey next(std::size_t bits = SecretKey::kDefaultBits) override { return SecretKey::random(bits); }
};

// Deterministic key stream for reproducible simulations:
// key_i = HMAC-SHA256(seed_le64, "wsprivdb-key" || i_le64 || block_le32),
// blocks concatenated and truncated to the requested length.
class DeterministicKeySource final : public KeySource {
 public:
  explicit DeterministicKeySource(std::uint64_t seed) : seed_(seed) {}

  SecretKey next(std::size_t bits = SecretKey::kDefaultBits) override;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace wsprivdb
