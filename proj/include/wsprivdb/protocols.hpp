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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsprivdb/cuckoo_filter.hpp"
#include "wsprivdb/hash.hpp"
#include "wsprivdb/hmac.hpp"
#include "wsprivdb/messages.hpp"
#include "wsprivdb/spectrum_db.hpp"

namespace wsprivdb {

// The DB's available rows do not fit the filter it sized for them.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Messages arrived in an order the protocol does not allow.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProtocolKind : std::uint8_t { kLpdb, kLpdbLeakage, kLpdbqs };
std::string_view to_string(ProtocolKind k) noexcept;
std::optional<ProtocolKind> parse_protocol(std::string_view name) noexcept;

// How the DB sizes and seeds the filter it builds for one query. The item
// capacity is always the number of available rows it is about to insert.
struct FilterConfig {
  double epsilon = 0.01;
  unsigned beta = 4;
  double alpha = 0.95;
  unsigned max_kicks = kDefaultMaxKicks;
  BucketSizing sizing = BucketSizing::Exact;
  std::uint64_t hash_seed = 0;
};

// Spectrum sensing at the SU: reports the true channel state with
// probability `accuracy` and its negation otherwise. Every call consumes one
// draw, so results depend only on (seed, call sequence).
class SensingOracle {
 public:
  SensingOracle(const SpectrumDb& db, double accuracy, std::uint64_t seed);

  bool sense(std::uint32_t cell, std::uint16_t chn);
  std::uint64_t calls() const noexcept { return calls_; }
  double accuracy() const noexcept { return accuracy_; }

 private:
  const SpectrumDb* db_;
  double accuracy_;
  SplitMix64 rng_;
  std::uint64_t calls_ = 0;
};

struct Decision {
  enum class Outcome : std::uint8_t { kBusy, kChannelAvailable };

  Outcome outcome = Outcome::kBusy;
  std::uint16_t chn = 0;
  ParamTuple params;
  std::uint64_t probes_used = 0;
  std::uint64_t sensing_calls = 0;

  bool available() const noexcept { return outcome == Outcome::kChannelAvailable; }
  // "busy" or "available:ch=<chn>:p<id>=<value>..."; contains no commas.
  std::string label() const;
  // Same outcome, channel and parameters; counters are ignored.
  bool same_outcome(const Decision& other) const noexcept {
    return outcome == other.outcome && (!available() || (chn == other.chn && params == other.params));
  }
};

struct RunStats {
  ProtocolKind protocol = ProtocolKind::kLpdb;
  std::uint64_t m = 0;
  std::uint16_t n_ch = 0;
  double rho = 0.0;
  double epsilon = 0.0;
  unsigned beta = 0;
  double alpha = 0.0;
  LinkBytes links;
  std::uint64_t inserts = 0;
  std::uint64_t lookups = 0;
  std::uint64_t hashes = 0;
  std::uint64_t hmacs = 0;
  std::uint64_t sensing_calls = 0;
  std::uint64_t probes = 0;
  std::uint64_t filter_bytes = 0;
  Decision decision;
};

std::string run_stats_csv_header();
std::string to_csv_row(const RunStats& s);

struct ProtocolRun {
  Decision decision;
  RunStats stats;
  PartyLedgers ledgers;
};

// SU draws a fresh key and sends it with its identifier to the DB over the
// confidential SU-DB link. Only the SU and DB ledgers ever see it. The
// identifier is HMAC_key("key-id") truncated to 64 bits.
struct SharedKey {
  std::uint64_t key_id = 0;
  SecretKey key;
};
SharedKey key_exchange(Network& net, KeySource& keys);

// LPDB: the DB ships a filter of every available row to the SU, which probes
// it locally for its own cell.
ProtocolRun run_lpdb(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr, std::uint64_t ts,
                     const FilterConfig& config, SensingOracle& sensing);

// LPDB with one coordinate revealed: the DB only encodes rows on that line.
ProtocolRun run_lpdb_leakage(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr,
                             std::uint64_t ts, Axis revealed_axis, const FilterConfig& config,
                             SensingOracle& sensing);

// LPDBQS: the DB builds an HMAC-keyed filter and ships it to the query server;
// the SU sends keyed probes to the QP and never downloads the filter.
ProtocolRun run_lpdbqs(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr, std::uint64_t ts,
                       KeySource& keys, const FilterConfig& config, SensingOracle& sensing);

// DB-side precomputation for LPDBQS: z keyed filters for one (chr, ts) built
// ahead of time from DB-generated keys. Each query consumes one entry; the DB
// shares that entry's key with the SU and forwards its filter to the QP.
class KeyedFilterPool {
 public:
  KeyedFilterPool(const SpectrumDb& db, const DeviceCharacteristics& chr, std::uint64_t ts, std::size_t z,
                  KeySource& keys, const FilterConfig& config);

  struct Entry {
    std::uint64_t key_id = 0;
    SecretKey key;
    Bytes filter_bytes;
    std::uint64_t inserts = 0;
  };

  const DeviceCharacteristics& chr() const noexcept { return chr_; }
  std::uint64_t ts() const noexcept { return ts_; }
  std::size_t remaining() const noexcept { return entries_.size() - next_; }
  const Entry* find(std::uint64_t key_id) const noexcept;
  // Next unused entry, or nullptr when exhausted.
  const Entry* take() noexcept;

 private:
  DeviceCharacteristics chr_;
  std::uint64_t ts_;
  std::vector<Entry> entries_;
  std::size_t next_ = 0;
};

ProtocolRun run_lpdbqs_pooled(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr,
                              std::uint64_t ts, KeyedFilterPool& pool, const FilterConfig& config,
                              SensingOracle& sensing);

// Query server state: holds the latest keyed filter and answers probes.
class QueryServer {
 public:
  void receive_filter(ByteView filter_bytes);
  bool answer(ByteView probe);
  std::uint64_t lookups() const noexcept { return lookups_; }

 private:
  std::optional<CuckooFilter> filter_;
  std::uint64_t lookups_ = 0;
};

}  // namespace wsprivdb
