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
#include <cstring>
#include <span>

namespace wsprivdb {

__extension__ typedef unsigned __int128 Uint128;

// 64-bit finalizer from SplitMix64. Bijective on uint64_t.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based generator: the value at position i is a pure function of
// (seed, i), which lets parallel loops draw from it without coordination.
constexpr std::uint64_t counter_random(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Maps a 64-bit random value to [0, 1).
constexpr double to_unit_interval(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, bound) by multiply-shift; bias is below 2^-32 for the
  // small bounds used here.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<Uint128>((*this)()) * bound) >> 64);
  }

  constexpr double unit() noexcept { return to_unit_interval((*this)()); }

 private:
  std::uint64_t state_;
};

// MurmurHash64A (Austin Appleby, public domain), seeded.
inline std::uint64_t murmur64(std::span<const std::uint8_t> data, std::uint64_t seed) noexcept {
  constexpr std::uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;
  const std::size_t len = data.size();
  std::uint64_t h = seed ^ (len * m);

  const std::uint8_t* p = data.data();
  const std::uint8_t* end = p + (len / 8) * 8;
  for (; p != end; p += 8) {
    std::uint64_t k;
    std::memcpy(&k, p, 8);  // little-endian hosts only; see README
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }

  const std::size_t tail = len & 7;
  if (tail != 0) {
    std::uint64_t t = 0;
    for (std::size_t i = tail; i-- > 0;) t = (t << 8) | p[i];
    h ^= t;
    h *= m;
  }

  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

}  // namespace wsprivdb
