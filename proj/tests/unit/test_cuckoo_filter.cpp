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

#include <cmath>
#include <cstring>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "wsprivdb/cuckoo_filter.hpp"
#include "wsprivdb/hash.hpp"
#include "wsprivdb/hmac.hpp"

using namespace wsprivdb;

namespace {

Bytes key_bytes(std::uint64_t k) { return to_bytes(k); }

FilterParams geometry(unsigned fp_bits, unsigned beta, std::uint64_t buckets) {
  FilterParams p;
  p.epsilon = 0.01;
  p.beta = beta;
  p.alpha = 1.0;
  p.fingerprint_bits = fp_bits;
  p.bucket_count = buckets;
  p.capacity_items = p.slot_count();
  return p;
}

std::uint64_t smallest_power_of_two_holding(double capacity, double per_bucket) {
  std::uint64_t n = 1;
  while (static_cast<double>(n) * per_bucket < capacity) n *= 2;
  return n;
}

}  // namespace

TEST_CASE("derive_params examples") {
  const FilterParams a = derive_params(1e-8, 4, 0.95, 1);
  CHECK(a.fingerprint_bits == 30);
  CHECK(a.bits_per_item() == doctest::Approx(30.0 / 0.95));
  CHECK(a.bits_per_item() == doctest::Approx(31.58).epsilon(1e-3));

  CHECK(derive_params(0.5, 1, 1.0, 1).fingerprint_bits == 2);

  const FilterParams c = derive_params(1e-8, 4, 0.95, 21080);
  CHECK(c.bucket_count == smallest_power_of_two_holding(21080, 4 * 0.95));
  CHECK(c.bucket_count == 8192);
  CHECK(c.power_of_two_buckets());
}

TEST_CASE("fingerprint width follows ceil(log2(1/eps) + log2(2 beta))") {
  for (double eps : {0.5, 0.1, 0.05, 0.01, 0.001, 1e-5, 1e-8}) {
    for (unsigned beta : {1u, 2u, 4u, 8u}) {
      const double exact = std::log2(1.0 / eps) + std::log2(2.0 * beta);
      CHECK(fingerprint_bits_for(eps, beta) == static_cast<unsigned>(std::ceil(exact - 1e-9)));
    }
  }
}

TEST_CASE("exact sizing uses the smallest bucket count that holds the capacity") {
  for (std::uint64_t cap : {1ULL, 7ULL, 129ULL, 8634ULL, 21080ULL}) {
    const FilterParams p = derive_params(0.01, 4, 0.95, cap, BucketSizing::Exact);
    CHECK(static_cast<double>(p.bucket_count) * 4 * 0.95 >= static_cast<double>(cap));
    CHECK(static_cast<double>(p.bucket_count - 1) * 4 * 0.95 < static_cast<double>(cap));
  }
}

TEST_CASE("derive_params rejects out-of-domain arguments") {
  CHECK_THROWS_AS(derive_params(0.0, 4, 0.95, 10), InvalidRange);
  CHECK_THROWS_AS(derive_params(1.0, 4, 0.95, 10), InvalidRange);
  CHECK_THROWS_AS(derive_params(0.01, 0, 0.95, 10), InvalidRange);
  CHECK_THROWS_AS(derive_params(0.01, 4, 0.0, 10), InvalidRange);
  CHECK_THROWS_AS(derive_params(0.01, 4, 1.01, 10), InvalidRange);
  CHECK_THROWS_AS(derive_params(0.01, 4, 0.95, 0), InvalidRange);
}

TEST_CASE("fingerprints are deterministic, nonzero and seed-dependent") {
  const Bytes item = key_bytes(42);
  CHECK(fingerprint_of(item, 13, 7) == fingerprint_of(item, 13, 7));

  // Two-bit fingerprints hit the zero remap a quarter of the time.
  for (std::uint64_t i = 0; i < 1000000; ++i) {
    const Fingerprint fp = fingerprint_of(key_bytes(i), 2, 99);
    REQUIRE(fp.bits >= 1);
    REQUIRE(fp.bits <= 3);
  }

  int differ = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    differ += fingerprint_of(key_bytes(counter_random(5, i)), 30, 1) != fingerprint_of(key_bytes(counter_random(5, i)), 30, 2);
  }
  CHECK(static_cast<double>(differ) / 10000.0 >= 1.0 - std::ldexp(1.0, -30));
}

TEST_CASE("alternate bucket is an involution and stays in range") {
  for (std::uint64_t n : {1ULL, 2ULL, 1024ULL, 7ULL, 34ULL, 2273ULL}) {
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const std::uint64_t bucket = counter_random(n, i) % n;
      const Fingerprint fp{(counter_random(n + 1, i) & 0xfff) | 1};
      const std::uint64_t alt = alternate_bucket(bucket, fp, n, 11);
      REQUIRE(alt < n);
      REQUIRE(alternate_bucket(alt, fp, n, 11) == bucket);
    }
  }
}

TEST_CASE("power-of-two tables pair buckets by XOR") {
  const std::uint64_t n = 1024;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Bytes item = key_bytes(i);
    const Fingerprint fp = fingerprint_of(item, 13, 3);
    const BucketPair b = bucket_indexes(item, fp, n, 3);
    // The XOR partner is independent of which bucket we start from.
    CHECK((b.primary ^ b.alternate) == alternate_bucket(0, fp, n, 3));
  }
}

TEST_CASE("primary bucket index is uniform (chi-squared)") {
  constexpr std::uint64_t kBuckets = 1024;
  constexpr std::uint64_t kItems = 1000000;
  std::vector<std::uint64_t> counts(kBuckets, 0);
  for (std::uint64_t i = 0; i < kItems; ++i) {
    const Bytes item = key_bytes(counter_random(17, i));
    ++counts[bucket_indexes(item, fingerprint_of(item, 13, 5), kBuckets, 5).primary];
  }
  const double expected = static_cast<double>(kItems) / kBuckets;
  double chi2 = 0;
  for (std::uint64_t c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 1023 degrees of freedom: mean 1023, sd sqrt(2046) ~ 45. Allow five sd.
  const double df = kBuckets - 1;
  CHECK(chi2 < df + 5 * std::sqrt(2 * df));
  CHECK(chi2 > df - 5 * std::sqrt(2 * df));
}

TEST_CASE("insert and lookup") {
  CuckooFilter f(derive_params(0.01, 4, 0.95, 1000), 1);
  CHECK_FALSE(f.contains(key_bytes(1)));
  CHECK(f.insert(key_bytes(1)) == InsertOutcome::Ok);
  CHECK(f.contains(key_bytes(1)));
  CHECK(f.item_count() == 1);
}

TEST_CASE("lookup reads only the two candidate buckets") {
  CuckooFilter f(derive_params(0.01, 4, 0.95, 5000, BucketSizing::Exact), 4);
  for (std::uint64_t i = 0; i < 5000; ++i) REQUIRE(f.insert(key_bytes(counter_random(1, i))) == InsertOutcome::Ok);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const Bytes item = key_bytes(counter_random(i % 2 == 0 ? 1 : 2, i / 2));
    const Fingerprint fp = f.fingerprint(item);
    const BucketPair b = f.buckets_for(item, fp);
    REQUIRE(f.contains(item) == (f.bucket_contains(b.primary, fp) || f.bucket_contains(b.alternate, fp)));
  }
}

TEST_CASE("no false negatives for 1e5 random items at beta=4, alpha=0.95") {
  const FilterParams p = derive_params(0.001, 4, 0.95, 100000, BucketSizing::Exact);
  CuckooFilter f(p, 21);
  for (std::uint64_t i = 0; i < 100000; ++i) REQUIRE(f.insert(key_bytes(counter_random(33, i))) == InsertOutcome::Ok);
  std::uint64_t found = 0;
  for (std::uint64_t i = 0; i < 100000; ++i) found += f.contains(key_bytes(counter_random(33, i)));
  CHECK(found == 100000);
  CHECK(f.load_factor() == doctest::Approx(100000.0 / static_cast<double>(p.slot_count())));
}

TEST_CASE("false-positive rate at eps=0.01 stays under 1.5 eps") {
  constexpr std::uint64_t kMembers = 50000;
  CuckooFilter f(derive_params(0.01, 4, 0.95, kMembers, BucketSizing::Exact), 8);
  std::unordered_set<std::uint64_t> members;
  for (std::uint64_t i = 0; i < kMembers; ++i) {
    const std::uint64_t k = counter_random(100, i);
    members.insert(k);
    REQUIRE(f.insert(key_bytes(k)) == InsertOutcome::Ok);
  }
  std::uint64_t probes = 0;
  std::uint64_t fps = 0;
  for (std::uint64_t i = 0; probes < 1000000; ++i) {
    const std::uint64_t k = counter_random(200, i);
    if (members.contains(k)) continue;
    ++probes;
    fps += f.contains(key_bytes(k));
  }
  CHECK(static_cast<double>(fps) / static_cast<double>(probes) <= 1.5 * 0.01);
  CHECK(fps > 0);
}

TEST_CASE("2 beta + 1 items sharing both buckets: the last one is Full") {
  const FilterParams p = geometry(4, 4, 64);
  CuckooFilter f(p, 3);

  // Collect distinct items with the same fingerprint and primary bucket, so
  // they also share the alternate bucket.
  std::vector<Bytes> same;
  Fingerprint target{};
  std::uint64_t target_bucket = 0;
  for (std::uint64_t i = 0; same.size() < 2 * p.beta + 1; ++i) {
    const Bytes item = key_bytes(i);
    const Fingerprint fp = f.fingerprint(item);
    const std::uint64_t b = f.buckets_for(item, fp).primary;
    if (same.empty()) {
      target = fp;
      target_bucket = b;
    }
    if (fp == target && b == target_bucket) same.push_back(item);
  }
  REQUIRE(f.buckets_for(same[0], target).alternate != target_bucket);

  for (unsigned i = 0; i < 2 * p.beta; ++i) CHECK(f.insert(same[i]) == InsertOutcome::Ok);
  CHECK(f.insert(same[2 * p.beta]) == InsertOutcome::Full);
  CHECK(f.item_count() == 2 * p.beta);
  for (unsigned i = 0; i < 2 * p.beta; ++i) CHECK(f.contains(same[i]));
}

TEST_CASE("a failed insert leaves every earlier item findable") {
  const FilterParams p = geometry(8, 4, 50);
  CuckooFilter f(p, 12);
  std::vector<Bytes> inserted;
  for (std::uint64_t i = 0;; ++i) {
    const Bytes item = key_bytes(counter_random(4, i));
    if (f.insert(item) == InsertOutcome::Full) break;
    inserted.push_back(item);
  }
  CHECK(f.item_count() == inserted.size());
  CHECK(inserted.size() <= p.slot_count());
  // Later inserts, accepted or not, must not lose anything either.
  for (std::uint64_t i = 0; i < 50; ++i) {
    if (f.insert(key_bytes(counter_random(5, i))) == InsertOutcome::Ok) inserted.push_back(key_bytes(counter_random(5, i)));
  }
  for (const Bytes& item : inserted) REQUIRE(f.contains(item));
  CHECK(f.item_count() == inserted.size());
}

TEST_CASE("keyed insert stores the MAC as the item") {
  const SecretKey k1(Bytes(32, 1));
  const SecretKey k2(Bytes(32, 2));
  const FilterParams p = derive_params(0.01, 4, 0.95, 10000, BucketSizing::Exact);
  CuckooFilter keyed(p, 77);
  CuckooFilter plain(p, 77);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const Bytes x = key_bytes(counter_random(6, i));
    REQUIRE(keyed.keyed_insert(k1, x) == InsertOutcome::Ok);
    const Mac m = hmac_sha256(k1.bytes(), x);
    REQUIRE(plain.insert(m) == InsertOutcome::Ok);
  }
  CHECK(keyed == plain);
  CHECK(keyed.serialize() == plain.serialize());

  std::uint64_t own = 0;
  std::uint64_t foreign = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const Bytes x = key_bytes(counter_random(6, i));
    own += keyed.contains(hmac_sha256(k1.bytes(), x));
    foreign += keyed.contains(hmac_sha256(k2.bytes(), x));
  }
  CHECK(own == 10000);
  CHECK(static_cast<double>(foreign) / 10000.0 <= 1.5 * 0.01);

  CuckooFilter again(p, 77);
  HmacSha256 mac(k1);
  for (std::uint64_t i = 0; i < 10000; ++i) again.keyed_insert(mac, key_bytes(counter_random(6, i)));
  CHECK(again == keyed);
}

TEST_CASE("serialized size follows the wire layout") {
  const FilterParams p = derive_params(1e-8, 4, 0.95, 21080);
  REQUIRE(p.bucket_count == 8192);
  REQUIRE(p.fingerprint_bits == 30);
  CHECK(CuckooFilter::serialized_size(p) == 32 + 122880);
  CHECK(CuckooFilter(p, 0).serialize().size() == 32 + (8192ULL * 4 * 30 + 7) / 8);

  const FilterParams odd = geometry(13, 3, 5);  // 195 bits -> 25 bytes
  CHECK(CuckooFilter(odd, 0).serialize().size() == 32 + 25);
}

TEST_CASE("serialized header fields") {
  CuckooFilter f(geometry(13, 4, 300), 0x1122334455667788ULL);
  const Bytes b = f.serialize();
  CHECK(to_hex(ByteView(b.data(), 32)) ==
        "434b4631"           // CKF1
        "0100"               // version
        "0d"                 // fingerprint bits
        "04"                 // beta
        "2c01000000000000"   // bucket count 300
        "8877665544332211"   // seed
        "0000000000000000");
}

TEST_CASE("slots are packed LSB-first from bucket 0 slot 0") {
  CuckooFilter f(geometry(5, 2, 4), 1);
  const Bytes item = key_bytes(9);
  REQUIRE(f.insert(item) == InsertOutcome::Ok);
  const Fingerprint fp = f.fingerprint(item);
  const std::uint64_t bucket = f.buckets_for(item, fp).primary;
  CHECK(f.slot(bucket, 0) == fp.bits);

  const Bytes b = f.serialize();
  std::uint64_t packed = 0;
  std::memcpy(&packed, b.data() + 32, 5);  // 8 slots * 5 bits = 40 bits
  CHECK(((packed >> (bucket * 2 * 5)) & 0x1f) == fp.bits);
}

TEST_CASE("deserialize round-trips and rejects malformed input") {
  CuckooFilter f(derive_params(0.001, 4, 0.95, 3000, BucketSizing::Exact), 55);
  for (std::uint64_t i = 0; i < 3000; ++i) f.insert(key_bytes(counter_random(8, i)));
  const Bytes wire = f.serialize();
  const CuckooFilter g = CuckooFilter::deserialize(wire);
  CHECK(g == f);
  CHECK(g.item_count() == f.item_count());
  CHECK(g.seed() == 55);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const Bytes probe = key_bytes(counter_random(i % 2 == 0 ? 8 : 9, i));
    REQUIRE(g.contains(probe) == f.contains(probe));
  }

  Bytes bad_magic = wire;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(CuckooFilter::deserialize(bad_magic), FormatError);

  Bytes bad_version = wire;
  bad_version[4] = 2;
  CHECK_THROWS_AS(CuckooFilter::deserialize(bad_version), FormatError);

  CHECK_THROWS_AS(CuckooFilter::deserialize(ByteView(wire.data(), 20)), FormatError);
  CHECK_THROWS_AS(CuckooFilter::deserialize(ByteView(wire.data(), wire.size() - 1)), FormatError);
  Bytes trailing = wire;
  trailing.push_back(0);
  CHECK_THROWS_AS(CuckooFilter::deserialize(trailing), FormatError);
}
