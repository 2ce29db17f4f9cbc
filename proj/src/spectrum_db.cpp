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

#include "wsprivdb/spectrum_db.hpp"

#include <omp.h>

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "wsprivdb/hash.hpp"

namespace wsprivdb {

void GridSpec::validate() const {
  if (side < 1) throw InvalidRange("grid side must be at least 1");
  if (side > 46340) throw InvalidRange("grid side too large for 32-bit cell indexes");
  if (n_ch < 1) throw InvalidRange("channel count must be at least 1");
}

ParamDomain eirp_domain() { return ParamDomain{0, 3, "max_eirp", {"40mW", "100mW", "4W"}}; }

std::vector<ParamDomain> default_param_domains() { return {eirp_domain()}; }

void DeviceCharacteristics::validate(const GridSpec& grid) const {
  if (low_channel > high_channel) throw InvalidRange("device frequency range is inverted");
  if (high_channel >= grid.n_ch) throw InvalidRange("device frequency range exceeds channel count");
}

DeviceCharacteristics DeviceCharacteristics::full_range(const GridSpec& grid) {
  DeviceCharacteristics chr;
  chr.low_channel = 0;
  chr.high_channel = static_cast<std::uint16_t>(grid.n_ch - 1);
  return chr;
}

SpectrumDb::SpectrumDb(GridSpec grid, std::uint64_t ts, std::vector<ParamDomain> domains, double rho_target,
                       std::vector<std::uint8_t> avl, std::vector<std::uint32_t> params)
    : grid_(grid),
      ts_(ts),
      domains_(std::move(domains)),
      rho_target_(rho_target),
      avl_(std::move(avl)),
      params_(std::move(params)) {
  grid_.validate();
  if (avl_.size() != grid_.rows()) throw InvalidRange("availability table size does not match grid");
  if (params_.size() != grid_.rows() * domains_.size()) throw InvalidRange("parameter table size does not match grid");
  for (std::size_t i = 0; i < avl_.size(); ++i) {
    if (avl_[i] > 1) throw InvalidRange("availability must be 0 or 1");
    for (std::size_t d = 0; d < domains_.size(); ++d) {
      if (params_[i * domains_.size() + d] >= domains_[d].cardinality) throw InvalidRange("parameter outside its domain");
    }
  }
}

DbRow SpectrumDb::row(RowRef ref) const {
  const CellPos pos = pos_of(ref.cell);
  DbRow r{pos.lx, pos.ly, ts_, ref.chn, available(ref.cell, ref.chn), {}};
  r.params.reserve(domains_.size());
  for (std::size_t d = 0; d < domains_.size(); ++d) {
    r.params.push_back(TxParam{domains_[d].param_id, param_value(ref.cell, ref.chn, d)});
  }
  return r;
}

std::uint64_t SpectrumDb::available_count() const noexcept {
  return static_cast<std::uint64_t>(std::count(avl_.begin(), avl_.end(), std::uint8_t{1}));
}

double SpectrumDb::realized_rho() const noexcept {
  return static_cast<double>(available_count()) / static_cast<double>(grid_.rows());
}

std::vector<RowRef> SpectrumDb::retrieve(const DeviceCharacteristics& chr) const {
  chr.validate(grid_);
  std::vector<RowRef> out;
  out.reserve(grid_.cells() * chr.channel_count());
  for (std::uint32_t cell = 0; cell < grid_.cells(); ++cell) {
    for (std::uint16_t c = chr.low_channel; c <= chr.high_channel; ++c) out.push_back({cell, c});
  }
  return out;
}

std::vector<RowRef> SpectrumDb::retrieve(const DeviceCharacteristics& chr, Axis axis, std::uint32_t coord) const {
  chr.validate(grid_);
  if (coord >= grid_.side) throw InvalidRange("revealed coordinate outside grid");
  std::vector<RowRef> out;
  out.reserve(std::size_t{grid_.side} * chr.channel_count());
  for (std::uint32_t other = 0; other < grid_.side; ++other) {
    const CellPos pos = axis == Axis::kX ? CellPos{coord, other} : CellPos{other, coord};
    const std::uint32_t cell = cell_of(pos);
    for (std::uint16_t c = chr.low_channel; c <= chr.high_channel; ++c) out.push_back({cell, c});
  }
  return out;
}

namespace {

constexpr std::uint64_t kParamStream = 0x706172616d730000ULL;

struct GroundTruthTables {
  std::vector<std::uint8_t> avl;
  std::vector<std::uint32_t> params;
};

GroundTruthTables allocate(const GridSpec& grid, double rho, const std::vector<ParamDomain>& domains) {
  grid.validate();
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidRange("rho must lie in [0, 1]");
  for (const auto& d : domains) {
    if (d.cardinality < 1) throw InvalidRange("parameter domain must be non-empty");
  }
  return {std::vector<std::uint8_t>(grid.rows()), std::vector<std::uint32_t>(grid.rows() * domains.size())};
}

inline void draw_row(GroundTruthTables& t, std::uint64_t row, double rho, std::uint64_t seed,
                     const std::vector<ParamDomain>& domains) noexcept {
  // Unit draws lie in [0, 1), so rho = 0 and rho = 1 are exact.
  const bool avl = to_unit_interval(counter_random(seed, row)) < rho;
  t.avl[row] = avl;
  if (!avl) return;
  for (std::size_t d = 0; d < domains.size(); ++d) {
    const std::uint64_t r = counter_random(seed ^ (kParamStream + d), row);
    t.params[row * domains.size() + d] =
        static_cast<std::uint32_t>((static_cast<Uint128>(r) * domains[d].cardinality) >> 64);
  }
}

}  // namespace

SpectrumDb generate_ground_truth(const GridSpec& grid, double rho, std::uint64_t seed, std::uint64_t ts,
                                 std::vector<ParamDomain> domains) {
  GroundTruthTables t = allocate(grid, rho, domains);
  const auto rows = static_cast<std::int64_t>(grid.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < rows; ++row) draw_row(t, static_cast<std::uint64_t>(row), rho, seed, domains);
  return SpectrumDb(grid, ts, std::move(domains), rho, std::move(t.avl), std::move(t.params));
}

SpectrumDb generate_ground_truth_serial(const GridSpec& grid, double rho, std::uint64_t seed, std::uint64_t ts,
                                        std::vector<ParamDomain> domains) {
  GroundTruthTables t = allocate(grid, rho, domains);
  for (std::uint64_t row = 0; row < grid.rows(); ++row) draw_row(t, row, rho, seed, domains);
  return SpectrumDb(grid, ts, std::move(domains), rho, std::move(t.avl), std::move(t.params));
}

Bytes encode_query(std::uint32_t lx, std::uint32_t ly, std::uint16_t chn, std::uint64_t ts, const ParamTuple& params) {
  if (params.size() > 255) throw InvalidRange("too many transmission parameters");
  ByteWriter w(encoded_size(params.size()));
  w.u32(lx).u32(ly).u16(chn).u64(ts).u8(static_cast<std::uint8_t>(params.size()));
  for (const TxParam& p : params) w.u8(p.param_id).u32(p.value);
  return std::move(w).take();
}

Bytes encode_entry(const DbRow& row) {
  if (!row.avl) throw InvalidRange("only available rows are encoded");
  return encode_query(row.lx, row.ly, row.chn, row.ts, row.params);
}

DbRow decode_entry(ByteView bytes) {
  ByteReader r(bytes);
  DbRow row;
  row.lx = r.u32();
  row.ly = r.u32();
  row.chn = r.u16();
  row.ts = r.u64();
  const std::uint8_t count = r.u8();
  for (std::uint8_t i = 0; i < count; ++i) {
    TxParam p;
    p.param_id = r.u8();
    p.value = r.u32();
    row.params.push_back(p);
  }
  if (!r.done()) throw FormatError("trailing bytes after entry");
  row.avl = true;
  return row;
}

std::vector<ParamTuple> enumerate_param_combinations(const DeviceCharacteristics& /*chr*/,
                                                     const std::vector<ParamDomain>& domains) {
  std::vector<ParamTuple> out;
  ParamTuple current;
  current.reserve(domains.size());
  // Odometer over the domains, last domain fastest.
  std::vector<std::uint32_t> digits(domains.size(), 0);
  for (;;) {
    current.clear();
    for (std::size_t d = 0; d < domains.size(); ++d) current.push_back({domains[d].param_id, digits[d]});
    out.push_back(current);
    std::size_t d = domains.size();
    while (d > 0) {
      --d;
      if (++digits[d] < domains[d].cardinality) break;
      digits[d] = 0;
      if (d == 0) return out;
    }
    if (domains.empty()) return out;
  }
}

void dump_csv(const SpectrumDb& db, std::ostream& out) {
  out << "lx,ly,ts,chn,avl";
  for (std::size_t d = 0; d < db.domains().size(); ++d) out << ",param" << d;
  out << '\n';
  const GridSpec& g = db.grid();
  for (std::uint32_t cell = 0; cell < g.cells(); ++cell) {
    const CellPos pos = db.pos_of(cell);
    for (std::uint16_t c = 0; c < g.n_ch; ++c) {
      out << pos.lx << ',' << pos.ly << ',' << db.ts() << ',' << c << ',' << (db.available(cell, c) ? 1 : 0);
      for (std::size_t d = 0; d < db.domains().size(); ++d) out << ',' << db.param_value(cell, c, d);
      out << '\n';
    }
  }
}

namespace {

std::uint64_t parse_field(const std::string& field, std::size_t line_no) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size() || field.front() == '-') {
    throw FormatError("line " + std::to_string(line_no) + ": invalid integer '" + field + "'");
  }
  return v;
}

}  // namespace

SpectrumDb load_csv(std::istream& in, std::vector<ParamDomain> domains) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty ground-truth CSV");
  std::string expected = "lx,ly,ts,chn,avl";
  for (std::size_t d = 0; d < domains.size(); ++d) expected += ",param" + std::to_string(d);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw FormatError("unexpected CSV header: '" + line + "'");

  struct Parsed {
    std::uint64_t lx, ly, ts, chn, avl;
    std::vector<std::uint32_t> params;
  };
  std::vector<Parsed> rows;
  std::uint64_t max_lx = 0, max_ly = 0, max_chn = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5 + domains.size()) throw FormatError("line " + std::to_string(line_no) + ": wrong field count");
    Parsed p{parse_field(fields[0], line_no), parse_field(fields[1], line_no), parse_field(fields[2], line_no),
             parse_field(fields[3], line_no), parse_field(fields[4], line_no), {}};
    for (std::size_t d = 0; d < domains.size(); ++d) {
      p.params.push_back(static_cast<std::uint32_t>(parse_field(fields[5 + d], line_no)));
    }
    max_lx = std::max(max_lx, p.lx);
    max_ly = std::max(max_ly, p.ly);
    max_chn = std::max(max_chn, p.chn);
    rows.push_back(std::move(p));
  }
  if (rows.empty()) throw FormatError("ground-truth CSV has no rows");
  if (max_lx != max_ly || max_lx >= 46340 || max_chn >= std::numeric_limits<std::uint16_t>::max()) {
    throw FormatError("ground-truth CSV does not describe a square grid");
  }

  const GridSpec grid{static_cast<std::uint32_t>(max_lx + 1), static_cast<std::uint16_t>(max_chn + 1)};
  if (rows.size() != grid.rows()) throw FormatError("ground-truth CSV must hold exactly one row per (cell, channel)");
  const std::uint64_t ts = rows.front().ts;
  std::vector<std::uint8_t> avl(grid.rows());
  std::vector<std::uint8_t> seen(grid.rows());
  std::vector<std::uint32_t> params(grid.rows() * domains.size());
  std::uint64_t available = 0;
  for (const Parsed& p : rows) {
    if (p.ts != ts) throw FormatError("ground-truth CSV mixes timestamps");
    if (p.avl > 1) throw FormatError("avl must be 0 or 1");
    const std::uint64_t idx = (p.ly * grid.side + p.lx) * grid.n_ch + p.chn;
    if (seen[idx]++) throw FormatError("duplicate (cell, channel) row");
    avl[idx] = static_cast<std::uint8_t>(p.avl);
    available += p.avl;
    for (std::size_t d = 0; d < domains.size(); ++d) {
      if (p.params[d] >= domains[d].cardinality) throw FormatError("parameter value outside its domain");
      params[idx * domains.size() + d] = p.params[d];
    }
  }
  const double rho = static_cast<double>(available) / static_cast<double>(grid.rows());
  return SpectrumDb(grid, ts, std::move(domains), rho, std::move(avl), std::move(params));
}

}  // namespace wsprivdb
