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
#include <iosfwd>
#include <string>
#include <vector>

#include "wsprivdb/bytes.hpp"
#include "wsprivdb/cuckoo_filter.hpp"

namespace wsprivdb {

inline constexpr std::uint16_t kDefaultChannels = 31;

// Coverage area as a side x side grid of cells, each with n_ch channels.
// Timestamps are epoch days: one availability snapshot per day.
struct GridSpec {
  std::uint32_t side = 64;
  std::uint16_t n_ch = kDefaultChannels;

  std::uint64_t cells() const noexcept { return std::uint64_t{side} * side; }
  std::uint64_t rows() const noexcept { return cells() * n_ch; }
  void validate() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// A transmission parameter with a finite enumerated domain [0, cardinality).
struct ParamDomain {
  std::uint8_t param_id = 0;
  std::uint32_t cardinality = 1;
  std::string name;
  std::vector<std::string> labels;  // optional, one per value
  friend bool operator==(const ParamDomain&, const ParamDomain&) = default;
};

// Maximum EIRP: 0 = 40 mW, 1 = 100 mW, 2 = 4 W.
enum class Eirp : std::uint32_t { k40mW = 0, k100mW = 1, k4W = 2 };
ParamDomain eirp_domain();
std::vector<ParamDomain> default_param_domains();

struct TxParam {
  std::uint8_t param_id = 0;
  std::uint32_t value = 0;
  friend bool operator==(const TxParam&, const TxParam&) = default;
};
using ParamTuple = std::vector<TxParam>;

struct DbRow {
  std::uint32_t lx = 0;
  std::uint32_t ly = 0;
  std::uint64_t ts = 0;
  std::uint16_t chn = 0;
  bool avl = false;
  ParamTuple params;
  friend bool operator==(const DbRow&, const DbRow&) = default;
};

enum class DeviceType : std::uint8_t { kFixed = 0, kPortableMode1 = 1, kPortableMode2 = 2 };

struct DeviceCharacteristics {
  DeviceType device_type = DeviceType::kPortableMode2;
  std::uint16_t antenna_height_m = 2;
  std::uint16_t low_channel = 0;
  std::uint16_t high_channel = kDefaultChannels - 1;

  std::uint16_t channel_count() const noexcept { return static_cast<std::uint16_t>(high_channel - low_channel + 1); }
  bool covers(std::uint16_t chn) const noexcept { return chn >= low_channel && chn <= high_channel; }
  void validate(const GridSpec& grid) const;
  static DeviceCharacteristics full_range(const GridSpec& grid);
  friend bool operator==(const DeviceCharacteristics&, const DeviceCharacteristics&) = default;
};

struct CellPos {
  std::uint32_t lx = 0;
  std::uint32_t ly = 0;
  friend bool operator==(const CellPos&, const CellPos&) = default;
};

enum class Axis : std::uint8_t { kX = 0, kY = 1 };

// Handle to one (cell, channel) row of a SpectrumDb.
struct RowRef {
  std::uint32_t cell = 0;
  std::uint16_t chn = 0;
};

// Dense ground-truth table indexed by (cell, channel). Immutable after
// construction, so concurrent readers need no locking.
class SpectrumDb {
 public:
  SpectrumDb(GridSpec grid, std::uint64_t ts, std::vector<ParamDomain> domains, double rho_target,
             std::vector<std::uint8_t> avl, std::vector<std::uint32_t> params);

  const GridSpec& grid() const noexcept { return grid_; }
  std::uint64_t ts() const noexcept { return ts_; }
  const std::vector<ParamDomain>& domains() const noexcept { return domains_; }
  double rho_target() const noexcept { return rho_target_; }

  std::uint32_t cell_of(CellPos pos) const noexcept { return pos.ly * grid_.side + pos.lx; }
  CellPos pos_of(std::uint32_t cell) const noexcept { return {cell % grid_.side, cell / grid_.side}; }

  bool available(std::uint32_t cell, std::uint16_t chn) const noexcept {
    return avl_[std::uint64_t{cell} * grid_.n_ch + chn] != 0;
  }
  std::uint32_t param_value(std::uint32_t cell, std::uint16_t chn, std::size_t domain_index) const noexcept {
    return params_[(std::uint64_t{cell} * grid_.n_ch + chn) * domains_.size() + domain_index];
  }
  DbRow row(RowRef ref) const;
  DbRow row(CellPos pos, std::uint16_t chn) const { return row(RowRef{cell_of(pos), chn}); }

  std::uint64_t available_count() const noexcept;
  double realized_rho() const noexcept;

  // Rows matching the device characteristics: every cell, channels in range.
  std::vector<RowRef> retrieve(const DeviceCharacteristics& chr) const;
  // Same, restricted to the cells whose `axis` coordinate equals `coord`.
  std::vector<RowRef> retrieve(const DeviceCharacteristics& chr, Axis axis, std::uint32_t coord) const;

 private:
  GridSpec grid_;
  std::uint64_t ts_;
  std::vector<ParamDomain> domains_;
  double rho_target_;
  std::vector<std::uint8_t> avl_;
  std::vector<std::uint32_t> params_;
};

inline constexpr std::uint64_t kDefaultEpochDay = 20000;

// Each (cell, channel) is available independently with probability rho;
// available rows draw each parameter uniformly from its domain. Draws come
// from a counter-based generator, so the parallel and serial versions are
// bit-identical for a given seed.
SpectrumDb generate_ground_truth(const GridSpec& grid, double rho, std::uint64_t seed,
                                 std::uint64_t ts = kDefaultEpochDay,
                                 std::vector<ParamDomain> domains = default_param_domains());
SpectrumDb generate_ground_truth_serial(const GridSpec& grid, double rho, std::uint64_t seed,
                                        std::uint64_t ts = kDefaultEpochDay,
                                        std::vector<ParamDomain> domains = default_param_domains());

// Canonical encoding shared by DB entries and SU queries:
//   u32 lx | u32 ly | u16 chn | u64 ts | u8 param_count | (u8 param_id, u32 value) * param_count
// all little-endian.
Bytes encode_query(std::uint32_t lx, std::uint32_t ly, std::uint16_t chn, std::uint64_t ts, const ParamTuple& params);
Bytes encode_entry(const DbRow& row);
DbRow decode_entry(ByteView bytes);
inline constexpr std::size_t encoded_size(std::size_t param_count) { return 4 + 4 + 2 + 8 + 1 + 5 * param_count; }

// Cartesian product of the parameter domains, lexicographic with the first
// domain most significant.
std::vector<ParamTuple> enumerate_param_combinations(const DeviceCharacteristics& chr,
                                                     const std::vector<ParamDomain>& domains);

// CSV with header lx,ly,ts,chn,avl,param0[,param1...], one row per (cell, channel).
void dump_csv(const SpectrumDb& db, std::ostream& out);
SpectrumDb load_csv(std::istream& in, std::vector<ParamDomain> domains = default_param_domains());

}  // namespace wsprivdb
