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

#include "wsprivdb/cuckoo_filter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "wsprivdb/hash.hpp"

namespace wsprivdb {
namespace {

constexpr std::uint64_t kFingerprintTag = 0x66696e6765727072ULL;  // "fingerpr"
constexpr std::uint64_t kAlternateTag = 0x616c7465726e6174ULL;    // "alternat"
constexpr std::uint64_t kEvictTag = 0x6576696374696f6eULL;        // "eviction"
constexpr std::uint8_t kMagic[4] = {'C', 'K', 'F', '1'};

// Maps a 64-bit hash onto [0, n) by multiply-shift.
std::uint64_t reduce(std::uint64_t hash, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<Uint128>(hash) * n) >> 64);
}

std::uint64_t mask_for(unsigned bits) noexcept { return bits >= 64 ? ~0ULL : ((1ULL << bits) - 1); }

}  // namespace

unsigned fingerprint_bits_for(double epsilon, unsigned beta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidRange("epsilon must lie in (0, 1)");
  if (beta < 1) throw InvalidRange("beta must be at least 1");
  const double exact = std::log2(1.0 / epsilon) + std::log2(2.0 * beta);
  // Guard against log2 landing a hair above an integer.
  const double bits = std::ceil(exact - 1e-9);
  if (bits > 64.0) throw InvalidRange("fingerprint would exceed 64 bits");
  return static_cast<unsigned>(std::max(1.0, bits));
}

FilterParams derive_params(double epsilon, unsigned beta, double alpha, std::uint64_t capacity_items,
                           BucketSizing sizing, unsigned max_kicks) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidRange("alpha must lie in (0, 1]");
  if (capacity_items < 1) throw InvalidRange("capacity must be at least 1");
  if (beta > 255) throw InvalidRange("beta must fit in one byte");

  FilterParams p;
  p.epsilon = epsilon;
  p.beta = beta;
  p.alpha = alpha;
  p.capacity_items = capacity_items;
  p.max_kicks = max_kicks;
  p.fingerprint_bits = fingerprint_bits_for(epsilon, beta);

  const double per_bucket = beta * alpha;
  const auto holds = [&](std::uint64_t n) { return static_cast<double>(n) * per_bucket >= capacity_items - 1e-9; };
  if (sizing == BucketSizing::PowerOfTwo) {
    std::uint64_t n = 1;
    while (!holds(n)) n <<= 1;
    p.bucket_count = n;
  } else {
    auto n = static_cast<std::uint64_t>(std::ceil(capacity_items / per_bucket - 1e-9));
    n = std::max<std::uint64_t>(n, 1);
    while (!holds(n)) ++n;
    p.bucket_count = n;
  }
  return p;
}

Fingerprint fingerprint_of(ByteView item, unsigned fingerprint_bits, std::uint64_t seed) noexcept {
  const std::uint64_t h = murmur64(item, seed ^ kFingerprintTag) & mask_for(fingerprint_bits);
  return Fingerprint{h == 0 ? 1 : h};
}

std::uint64_t alternate_bucket(std::uint64_t bucket, Fingerprint fp, std::uint64_t bucket_count,
                               std::uint64_t seed) noexcept {
  const std::uint64_t tag = reduce(mix64(fp.bits ^ mix64(seed ^ kAlternateTag)), bucket_count);
  if ((bucket_count & (bucket_count - 1)) == 0) return bucket ^ tag;
  // (tag - bucket) mod n is its own inverse for any n.
  return tag >= bucket ? tag - bucket : tag + bucket_count - bucket;
}

BucketPair bucket_indexes(ByteView item, Fingerprint fp, std::uint64_t bucket_count, std::uint64_t seed) noexcept {
  const std::uint64_t primary = reduce(murmur64(item, seed), bucket_count);
  return {primary, alternate_bucket(primary, fp, bucket_count, seed)};
}

CuckooFilter::CuckooFilter(const FilterParams& params, std::uint64_t hash_seed)
    : params_(params),
      seed_(hash_seed),
      fp_mask_(mask_for(params.fingerprint_bits)),
      evict_state_(mix64(hash_seed ^ kEvictTag)) {
  if (params_.fingerprint_bits < 1 || params_.fingerprint_bits > 64) throw InvalidRange("fingerprint_bits out of range");
  if (params_.beta < 1 || params_.beta > 255) throw InvalidRange("beta out of range");
  if (params_.bucket_count < 1) throw InvalidRange("bucket_count must be at least 1");
  const std::uint64_t bits = params_.slot_count() * params_.fingerprint_bits;
  // One spare word so a slot straddling the last boundary reads in-bounds.
  words_.assign(bits / 64 + 2, 0);
}

std::uint64_t CuckooFilter::read_slot(std::uint64_t slot) const noexcept {
  const unsigned f = params_.fingerprint_bits;
  const std::uint64_t bit = slot * f;
  const std::uint64_t word = bit >> 6;
  const unsigned offset = static_cast<unsigned>(bit & 63);
  // Two-step shift keeps offset 0 defined; the spare word makes word + 1 valid.
  const std::uint64_t v = (words_[word] >> offset) | ((words_[word + 1] << 1) << (63 - offset));
  return v & fp_mask_;
}

void CuckooFilter::write_slot(std::uint64_t slot, std::uint64_t value) noexcept {
  const unsigned f = params_.fingerprint_bits;
  const std::uint64_t bit = slot * f;
  const std::uint64_t word = bit >> 6;
  const unsigned offset = static_cast<unsigned>(bit & 63);
  words_[word] = (words_[word] & ~(fp_mask_ << offset)) | (value << offset);
  if (offset + f > 64) {
    const unsigned spill = offset + f - 64;
    const std::uint64_t high_mask = mask_for(spill);
    words_[word + 1] = (words_[word + 1] & ~high_mask) | (value >> (64 - offset));
  }
}

bool CuckooFilter::bucket_contains(std::uint64_t bucket, Fingerprint fp) const noexcept {
  bool found = false;
  const std::uint64_t base = bucket * params_.beta;
  for (unsigned s = 0; s < params_.beta; ++s) found |= read_slot(base + s) == fp.bits;
  return found;
}

bool CuckooFilter::place_in_empty(std::uint64_t bucket, std::uint64_t fp) noexcept {
  const std::uint64_t base = bucket * params_.beta;
  for (unsigned s = 0; s < params_.beta; ++s) {
    if (read_slot(base + s) == 0) {
      write_slot(base + s, fp);
      ++items_;
      return true;
    }
  }
  return false;
}

InsertOutcome CuckooFilter::insert(ByteView item) {
  const Fingerprint fp = fingerprint(item);
  const BucketPair b = buckets_for(item, fp);
  if (place_in_empty(b.primary, fp.bits) || place_in_empty(b.alternate, fp.bits)) return InsertOutcome::Ok;

  SplitMix64 rng(evict_state_);
  evict_state_ = rng();

  std::vector<std::uint64_t> path;
  path.reserve(params_.max_kicks);
  std::uint64_t current = fp.bits;
  std::uint64_t bucket = rng.below(2) == 0 ? b.primary : b.alternate;
  for (unsigned kick = 0; kick < params_.max_kicks; ++kick) {
    const std::uint64_t victim = bucket * params_.beta + rng.below(params_.beta);
    const std::uint64_t evicted = read_slot(victim);
    write_slot(victim, current);
    path.push_back(victim);
    current = evicted;
    bucket = alternate_bucket(bucket, Fingerprint{current}, params_.bucket_count, seed_);
    if (place_in_empty(bucket, current)) return InsertOutcome::Ok;
  }

  // Undo the relocation chain so every earlier item stays where lookups expect it.
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const std::uint64_t displaced = read_slot(*it);
    write_slot(*it, current);
    current = displaced;
  }
  return InsertOutcome::Full;
}

bool CuckooFilter::contains(ByteView item) const noexcept {
  const Fingerprint fp = fingerprint(item);
  const BucketPair b = buckets_for(item, fp);
  return bucket_contains(b.primary, fp) || bucket_contains(b.alternate, fp);
}

InsertOutcome CuckooFilter::keyed_insert(HmacSha256& mac, ByteView item) {
  const Mac tag = mac.mac(item);
  return insert(tag);
}

InsertOutcome CuckooFilter::keyed_insert(const SecretKey& key, ByteView item) {
  HmacSha256 mac(key);
  return keyed_insert(mac, item);
}

std::size_t CuckooFilter::serialized_size(const FilterParams& params) noexcept {
  return kFilterHeaderBytes + static_cast<std::size_t>((params.slot_count() * params.fingerprint_bits + 7) / 8);
}

Bytes CuckooFilter::serialize() const {
  ByteWriter w(serialized_size());
  w.bytes(kMagic)
      .u16(kFilterWireVersion)
      .u8(static_cast<std::uint8_t>(params_.fingerprint_bits))
      .u8(static_cast<std::uint8_t>(params_.beta))
      .u64(params_.bucket_count)
      .u64(seed_);
  w.zeros(kFilterHeaderBytes - w.size());

  const std::size_t payload = serialized_size() - kFilterHeaderBytes;
  for (std::size_t i = 0; i < payload; ++i) w.u8(static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8))));
  return std::move(w).take();
}

CuckooFilter CuckooFilter::deserialize(ByteView bytes) {
  if (bytes.size() < kFilterHeaderBytes) throw FormatError("malformed header: shorter than 32 bytes");
  ByteReader r(bytes);
  const ByteView magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) throw FormatError("malformed header: bad magic");
  if (r.u16() != kFilterWireVersion) throw FormatError("malformed header: unsupported version");
  const unsigned fp_bits = r.u8();
  const unsigned beta = r.u8();
  const std::uint64_t bucket_count = r.u64();
  const std::uint64_t seed = r.u64();
  if (fp_bits < 1 || fp_bits > 64 || beta < 1 || bucket_count < 1) throw FormatError("malformed header: bad geometry");
  if (bucket_count > (std::uint64_t{1} << 40)) throw FormatError("malformed header: bucket_count too large");
  r.bytes(kFilterHeaderBytes - 24);

  // The wire header carries geometry only; epsilon and alpha are reported as
  // the values implied by a completely full table.
  FilterParams p;
  p.fingerprint_bits = fp_bits;
  p.beta = beta;
  p.bucket_count = bucket_count;
  p.alpha = 1.0;
  p.capacity_items = p.slot_count();
  p.epsilon = std::min(1.0, 2.0 * beta * std::ldexp(1.0, -static_cast<int>(fp_bits)));

  const std::size_t payload = serialized_size(p) - kFilterHeaderBytes;
  if (r.remaining() < payload) throw FormatError("truncated payload");
  if (r.remaining() > payload) throw FormatError("trailing bytes after payload");

  CuckooFilter f(p, seed);
  const ByteView body = r.bytes(payload);
  for (std::size_t i = 0; i < payload; ++i) f.words_[i / 8] |= static_cast<std::uint64_t>(body[i]) << (8 * (i % 8));
  // Bits past the last slot must be zero for the encoding to be canonical.
  const std::uint64_t used_bits = p.slot_count() * fp_bits;
  if (used_bits % 64 != 0 && (f.words_[used_bits / 64] >> (used_bits % 64)) != 0) {
    throw FormatError("nonzero bits after the last slot");
  }
  for (std::uint64_t s = 0; s < p.slot_count(); ++s) f.items_ += f.read_slot(s) != 0;
  return f;
}

}  // namespace wsprivdb
