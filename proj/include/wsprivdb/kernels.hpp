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
#include <span>

#include "wsprivdb/cuckoo_filter.hpp"

// Data-parallel filter kernels. Each OpenMP kernel has a serial twin that is
// the reference the tests compare against; both must return identical results.
namespace wsprivdb::kernels {

// Keys are hashed as their 8-byte little-endian encoding, exactly as
// CuckooFilter::contains(to_bytes(key)) would.
std::uint64_t count_hits_serial(const CuckooFilter& filter, std::span<const std::uint64_t> keys) noexcept;
std::uint64_t count_hits_parallel(const CuckooFilter& filter, std::span<const std::uint64_t> keys,
                                  int threads = 0) noexcept;

void lookup_batch_serial(const CuckooFilter& filter, std::span<const std::uint64_t> keys,
                         std::span<std::uint8_t> hits) noexcept;
void lookup_batch_parallel(const CuckooFilter& filter, std::span<const std::uint64_t> keys,
                           std::span<std::uint8_t> hits, int threads = 0) noexcept;

// Inserts keys in order until the first Full. Returns the number inserted.
std::uint64_t insert_keys(CuckooFilter& filter, std::span<const std::uint64_t> keys);

int max_threads() noexcept;

}  // namespace wsprivdb::kernels
