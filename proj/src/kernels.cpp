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

#include "wsprivdb/kernels.hpp"

#include <omp.h>

#include <array>
#include <cstring>

namespace wsprivdb::kernels {
namespace {

inline bool contains_key(const CuckooFilter& filter, std::uint64_t key) noexcept {
  std::array<std::uint8_t, 8> buf;
  std::memcpy(buf.data(), &key, 8);  // little-endian host
  return filter.contains(buf);
}

int resolve_threads(int threads) noexcept { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace

int max_threads() noexcept { return omp_get_max_threads(); }

std::uint64_t count_hits_serial(const CuckooFilter& filter, std::span<const std::uint64_t> keys) noexcept {
  std::uint64_t hits = 0;
  for (std::uint64_t k : keys) hits += contains_key(filter, k);
  return hits;
}

std::uint64_t count_hits_parallel(const CuckooFilter& filter, std::span<const std::uint64_t> keys,
                                  int threads) noexcept {
  const auto n = static_cast<std::int64_t>(keys.size());
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits) num_threads(resolve_threads(threads))
  for (std::int64_t i = 0; i < n; ++i) hits += contains_key(filter, keys[static_cast<std::size_t>(i)]);
  return hits;
}

void lookup_batch_serial(const CuckooFilter& filter, std::span<const std::uint64_t> keys,
                         std::span<std::uint8_t> hits) noexcept {
  for (std::size_t i = 0; i < keys.size(); ++i) hits[i] = contains_key(filter, keys[i]);
}

void lookup_batch_parallel(const CuckooFilter& filter, std::span<const std::uint64_t> keys,
                           std::span<std::uint8_t> hits, int threads) noexcept {
  const auto n = static_cast<std::int64_t>(keys.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::int64_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    hits[j] = contains_key(filter, keys[j]);
  }
}

std::uint64_t insert_keys(CuckooFilter& filter, std::span<const std::uint64_t> keys) {
  std::uint64_t inserted = 0;
  std::array<std::uint8_t, 8> buf;
  for (std::uint64_t k : keys) {
    std::memcpy(buf.data(), &k, 8);
    if (filter.insert(buf) == InsertOutcome::Full) break;
    ++inserted;
  }
  return inserted;
}

}  // namespace wsprivdb::kernels
