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

#include <set>
#include <sstream>

#include "doctest.h"
#include "wsprivdb/hash.hpp"
#include "wsprivdb/spectrum_db.hpp"

using namespace wsprivdb;

TEST_CASE("ground truth at rho 0 and 1") {
  const GridSpec grid{8, 5};
  const SpectrumDb none = generate_ground_truth(grid, 0.0, 1);
  const SpectrumDb all = generate_ground_truth(grid, 1.0, 1);
  CHECK(none.available_count() == 0);
  CHECK(all.available_count() == grid.rows());
  for (std::uint32_t cell = 0; cell < grid.cells(); ++cell) {
    for (std::uint16_t c = 0; c < grid.n_ch; ++c) {
      REQUIRE_FALSE(none.available(cell, c));
      REQUIRE(all.available(cell, c));
      REQUIRE(all.param_value(cell, c, 0) < 3);
    }
  }
}

TEST_CASE("realized availability near 6.8 percent") {
  const SpectrumDb db = generate_ground_truth(GridSpec{64, 31}, 0.068, 7);
  CHECK(db.realized_rho() >= 0.058);
  CHECK(db.realized_rho() <= 0.078);
  CHECK(db.rho_target() == 0.068);
  // Binomial(126976, 0.068): sd ~ 90 rows, so 1% absolute is > 100 sd.
  CHECK(std::abs(db.realized_rho() - 0.068) < 0.01);
}

TEST_CASE("available rows draw every parameter value") {
  const SpectrumDb db = generate_ground_truth(GridSpec{16, 31}, 0.5, 3);
  std::uint64_t counts[3] = {0, 0, 0};
  for (std::uint32_t cell = 0; cell < db.grid().cells(); ++cell) {
    for (std::uint16_t c = 0; c < db.grid().n_ch; ++c) {
      if (db.available(cell, c)) ++counts[db.param_value(cell, c, 0)];
    }
  }
  const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
  for (std::uint64_t n : counts) CHECK(static_cast<double>(n) / total == doctest::Approx(1.0 / 3).epsilon(0.1));
}

TEST_CASE("ground truth is deterministic and thread-count independent") {
  const GridSpec grid{40, 31};
  const SpectrumDb a = generate_ground_truth(grid, 0.068, 11);
  const SpectrumDb b = generate_ground_truth_serial(grid, 0.068, 11);
  const SpectrumDb c = generate_ground_truth(grid, 0.068, 12);
  bool same_ab = true;
  bool same_ac = true;
  for (std::uint32_t cell = 0; cell < grid.cells(); ++cell) {
    for (std::uint16_t ch = 0; ch < grid.n_ch; ++ch) {
      same_ab &= a.row(RowRef{cell, ch}) == b.row(RowRef{cell, ch});
      same_ac &= a.row(RowRef{cell, ch}) == c.row(RowRef{cell, ch});
    }
  }
  CHECK(same_ab);
  CHECK_FALSE(same_ac);
}

TEST_CASE("invalid generation inputs") {
  CHECK_THROWS_AS(generate_ground_truth(GridSpec{4, 2}, -0.1, 1), InvalidRange);
  CHECK_THROWS_AS(generate_ground_truth(GridSpec{4, 2}, 1.1, 1), InvalidRange);
  CHECK_THROWS_AS(generate_ground_truth(GridSpec{0, 2}, 0.1, 1), InvalidRange);
  CHECK_THROWS_AS(generate_ground_truth(GridSpec{4, 0}, 0.1, 1), InvalidRange);
}

TEST_CASE("retrieve by channel range") {
  const GridSpec grid{16, 31};
  const SpectrumDb db = generate_ground_truth(grid, 0.068, 1);
  CHECK(db.retrieve(DeviceCharacteristics::full_range(grid)).size() == grid.cells() * 31);

  DeviceCharacteristics ten;
  ten.low_channel = 5;
  ten.high_channel = 14;
  CHECK(db.retrieve(ten).size() == grid.cells() * 10);
  for (const RowRef& r : db.retrieve(ten)) REQUIRE(ten.covers(r.chn));

  DeviceCharacteristics one;
  one.low_channel = one.high_channel = 30;
  CHECK(db.retrieve(one).size() == grid.cells());

  DeviceCharacteristics inverted;
  inverted.low_channel = 4;
  inverted.high_channel = 3;
  CHECK_THROWS_AS(inverted.validate(grid), InvalidRange);
  DeviceCharacteristics too_high;
  too_high.high_channel = 31;
  CHECK_THROWS_AS(too_high.validate(grid), InvalidRange);
}

TEST_CASE("retrieve along one coordinate") {
  const GridSpec grid{16, 31};
  const SpectrumDb db = generate_ground_truth(grid, 0.068, 1);
  const DeviceCharacteristics chr = DeviceCharacteristics::full_range(grid);
  const auto column = db.retrieve(chr, Axis::kX, 3);
  CHECK(column.size() == 16 * 31);
  for (const RowRef& r : column) REQUIRE(db.pos_of(r.cell).lx == 3);
  const auto row = db.retrieve(chr, Axis::kY, 15);
  CHECK(row.size() == 16 * 31);
  for (const RowRef& r : row) REQUIRE(db.pos_of(r.cell).ly == 15);
  CHECK_THROWS_AS(db.retrieve(chr, Axis::kY, 16), InvalidRange);
}

TEST_CASE("entry encoding layout") {
  CHECK(encoded_size(1) == 4 + 4 + 2 + 8 + 1 + 5);
  CHECK(encoded_size(1) == 24);
  const DbRow row{1, 2, 20000, 3, true, {TxParam{0, 2}}};
  const Bytes x = encode_entry(row);
  CHECK(x.size() == 24);
  CHECK(to_hex(x) == "01000000" "02000000" "0300" "204e000000000000" "01" "00" "02000000");
  CHECK(encode_query(1, 2, 3, 20000, {TxParam{0, 2}}) == x);

  DbRow busy = row;
  busy.avl = false;
  CHECK_THROWS_AS(encode_entry(busy), InvalidRange);
}

TEST_CASE("encoding distinguishes every field") {
  const Bytes base = encode_query(1, 2, 3, 20000, {TxParam{0, 1}});
  CHECK(encode_query(1, 2, 4, 20000, {TxParam{0, 1}}) != base);
  CHECK(encode_query(1, 2, 3, 20001, {TxParam{0, 1}}) != base);
  CHECK(encode_query(2, 1, 3, 20000, {TxParam{0, 1}}) != base);
  CHECK(encode_query(1, 2, 3, 20000, {TxParam{0, 2}}) != base);
}

TEST_CASE("encoding is injective on a 4x4 grid, 2 channels, 3 parameter values") {
  std::set<Bytes> seen;
  std::size_t tuples = 0;
  for (std::uint32_t lx = 0; lx < 4; ++lx) {
    for (std::uint32_t ly = 0; ly < 4; ++ly) {
      for (std::uint16_t c = 0; c < 2; ++c) {
        for (std::uint32_t v = 0; v < 3; ++v) {
          seen.insert(encode_query(lx, ly, c, kDefaultEpochDay, {TxParam{0, v}}));
          ++tuples;
        }
      }
    }
  }
  CHECK(tuples == 96);
  CHECK(seen.size() == tuples);
}

TEST_CASE("available rows encode to the SU's query bytes") {
  const SpectrumDb db = generate_ground_truth(GridSpec{8, 31}, 0.3, 2);
  for (std::uint32_t cell = 0; cell < db.grid().cells(); ++cell) {
    for (std::uint16_t c = 0; c < db.grid().n_ch; ++c) {
      if (!db.available(cell, c)) continue;
      const DbRow row = db.row(RowRef{cell, c});
      const CellPos pos = db.pos_of(cell);
      REQUIRE(encode_entry(row) == encode_query(pos.lx, pos.ly, c, db.ts(), row.params));
    }
  }
}

TEST_CASE("decode inverts encode") {
  SplitMix64 rng(4);
  for (int i = 0; i < 10000; ++i) {
    DbRow row;
    row.lx = static_cast<std::uint32_t>(rng());
    row.ly = static_cast<std::uint32_t>(rng());
    row.ts = rng();
    row.chn = static_cast<std::uint16_t>(rng());
    row.avl = true;
    const auto n = rng.below(4);
    for (std::uint64_t p = 0; p < n; ++p) row.params.push_back({static_cast<std::uint8_t>(p), static_cast<std::uint32_t>(rng())});
    REQUIRE(decode_entry(encode_entry(row)) == row);
  }
  Bytes x = encode_query(1, 2, 3, 4, {TxParam{0, 1}});
  x.push_back(0);
  CHECK_THROWS_AS(decode_entry(x), FormatError);
  CHECK_THROWS_AS(decode_entry(ByteView(x.data(), 10)), FormatError);
}

TEST_CASE("parameter combinations") {
  const GridSpec grid;
  const DeviceCharacteristics chr = DeviceCharacteristics::full_range(grid);
  const auto combos = enumerate_param_combinations(chr, default_param_domains());
  REQUIRE(combos.size() == 3);
  for (std::uint32_t v = 0; v < 3; ++v) CHECK(combos[v] == ParamTuple{TxParam{0, v}});
  CHECK(eirp_domain().labels == std::vector<std::string>{"40mW", "100mW", "4W"});
  CHECK(grid.n_ch * combos.size() == 93);

  CHECK(enumerate_param_combinations(chr, {ParamDomain{0, 1, "only", {}}}).size() == 1);

  const auto nine = enumerate_param_combinations(chr, {ParamDomain{0, 3, "a", {}}, ParamDomain{1, 3, "b", {}}});
  REQUIRE(nine.size() == 9);
  for (std::uint32_t i = 0; i < 9; ++i) CHECK(nine[i] == ParamTuple{TxParam{0, i / 3}, TxParam{1, i % 3}});
}

TEST_CASE("ground-truth CSV round trip") {
  const SpectrumDb db = generate_ground_truth(GridSpec{6, 4}, 0.4, 9, 20123);
  std::stringstream csv;
  dump_csv(db, csv);
  std::string header;
  std::getline(std::stringstream(csv.str()), header);
  CHECK(header == "lx,ly,ts,chn,avl,param0");

  const SpectrumDb back = load_csv(csv);
  CHECK(back.grid() == db.grid());
  CHECK(back.ts() == 20123);
  for (std::uint32_t cell = 0; cell < db.grid().cells(); ++cell) {
    for (std::uint16_t c = 0; c < db.grid().n_ch; ++c) REQUIRE(back.row(RowRef{cell, c}) == db.row(RowRef{cell, c}));
  }
}

TEST_CASE("malformed ground-truth CSV is rejected") {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return load_csv(in);
  };
  CHECK_THROWS_AS(load(""), FormatError);
  CHECK_THROWS_AS(load("x,y\n"), FormatError);
  CHECK_THROWS_AS(load("lx,ly,ts,chn,avl,param0\n"), FormatError);
  CHECK_THROWS_AS(load("lx,ly,ts,chn,avl,param0\n0,0,1,0,1,5\n"), FormatError);
  CHECK_THROWS_AS(load("lx,ly,ts,chn,avl,param0\n0,0,1,0,1,0\n0,0,1,0,1,0\n"), FormatError);
  CHECK_THROWS_AS(load("lx,ly,ts,chn,avl,param0\n0,0,1,0,2,0\n"), FormatError);
  CHECK_THROWS_AS(load("lx,ly,ts,chn,avl,param0\n0,0,1,0,x,0\n"), FormatError);
  CHECK(load("lx,ly,ts,chn,avl,param0\n0,0,1,0,1,2\n").available_count() == 1);
}
