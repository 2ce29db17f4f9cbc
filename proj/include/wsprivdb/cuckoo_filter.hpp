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

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wsprivdb/bytes.hpp"
#include "wsprivdb/hmac.hpp"

namespace wsprivdb {

// Raised when a parameter lies outside its documented domain.
class InvalidRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// How derive_params rounds the bucket count. PowerOfTwo is the classic
// layout (alternate bucket by XOR); Exact uses the smallest count that holds
// the capacity at the target load, and the alternate bucket is computed with
// a subtraction involution so that it still needs only the fingerprint.
enum class BucketSizing { PowerOfTwo, Exact };

struct FilterParams {
  double epsilon = 0.0;
  unsigned beta = 4;
  double alpha = 0.95;
  std::uint64_t capacity_items = 0;
  unsigned max_kicks = 500;

  unsigned fingerprint_bits = 0;
  std::uint64_t bucket_count = 0;

  std::uint64_t slot_count() const noexcept { return bucket_count * beta; }
  double bits_per_item() const noexcept { return fingerprint_bits / alpha; }
  bool power_of_two_buckets() const noexcept { return (bucket_count & (bucket_count - 1)) == 0; }
};

inline constexpr unsigned kDefaultMaxKicks = 500;

// ceil(log2(1/epsilon) + log2(2*beta)).
unsigned fingerprint_bits_for(double epsilon, unsigned beta);

FilterParams derive_params(double epsilon, unsigned beta, double alpha, std::uint64_t capacity_items,
                           BucketSizing sizing = BucketSizing::PowerOfTwo, unsigned max_kicks = kDefaultMaxKicks);

// Nonzero fingerprint value; zero marks an empty slot.
struct Fingerprint {
  std::uint64_t bits = 0;
  friend bool operator==(Fingerprint, Fingerprint) = default;
};

Fingerprint fingerprint_of(ByteView item, unsigned fingerprint_bits, std::uint64_t seed) noexcept;

struct BucketPair {
  std::uint64_t primary = 0;
  std::uint64_t alternate = 0;
};

// Partial-key cuckoo hashing: alternate_bucket(alternate_bucket(i, fp), fp) == i.
std::uint64_t alternate_bucket(std::uint64_t bucket, Fingerprint fp, std::uint64_t bucket_count,
                               std::uint64_t seed) noexcept;
BucketPair bucket_indexes(ByteView item, Fingerprint fp, std::uint64_t bucket_count, std::uint64_t seed) noexcept;

enum class InsertOutcome { Ok, Full };

inline constexpr std::size_t kFilterHeaderBytes = 32;
inline constexpr std::uint16_t kFilterWireVersion = 1;

// Cuckoo filter over a bit-packed bucket table. Insertion is single-writer;
// once built, const member functions are safe to call from many threads.
class CuckooFilter {
 public:
  CuckooFilter(const FilterParams& params, std::uint64_t hash_seed);

  InsertOutcome insert(ByteView item);
  bool contains(ByteView item) const noexcept;

  // Stores HMAC_key(item) as the item, so a holder of the MAC alone can look
  // it up with contains().
  InsertOutcome keyed_insert(HmacSha256& mac, ByteView item);
  InsertOutcome keyed_insert(const SecretKey& key, ByteView item);

  Fingerprint fingerprint(ByteView item) const noexcept {
    return fingerprint_of(item, params_.fingerprint_bits, seed_);
  }
  BucketPair buckets_for(ByteView item, Fingerprint fp) const noexcept {
    return bucket_indexes(item, fp, params_.bucket_count, seed_);
  }
  bool bucket_contains(std::uint64_t bucket, Fingerprint fp) const noexcept;
  std::uint64_t slot(std::uint64_t bucket, unsigned index) const noexcept {
    return read_slot(bucket * params_.beta + index);
  }

  const FilterParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t item_count() const noexcept { return items_; }
  double load_factor() const noexcept {
    return static_cast<double>(items_) / static_cast<double>(params_.slot_count());
  }

  // Wire format (little-endian): "CKF1", u16 version, u8 fingerprint_bits,
  // u8 beta, u64 bucket_count, u64 seed, zero padding to 32 bytes; then every
  // slot's fingerprint, bucket 0 slot 0 first, packed LSB-first with no
  // per-slot padding.
  Bytes serialize() const;
  static CuckooFilter deserialize(ByteView bytes);
  std::size_t serialized_size() const noexcept { return serialized_size(params_); }
  static std::size_t serialized_size(const FilterParams& params) noexcept;

  friend bool operator==(const CuckooFilter& a, const CuckooFilter& b) noexcept {
    return a.params_.fingerprint_bits == b.params_.fingerprint_bits && a.params_.beta == b.params_.beta &&
           a.params_.bucket_count == b.params_.bucket_count && a.seed_ == b.seed_ && a.words_ == b.words_;
  }

 private:
  std::uint64_t read_slot(std::uint64_t slot) const noexcept;
  void write_slot(std::uint64_t slot, std::uint64_t value) noexcept;
  bool place_in_empty(std::uint64_t bucket, std::uint64_t fp) noexcept;

  FilterParams params_;
  std::uint64_t seed_;
  std::uint64_t fp_mask_;
  std::vector<std::uint64_t> words_;
  std::uint64_t items_ = 0;
  std::uint64_t evict_state_;
};

}  // namespace wsprivdb
