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

#include <functional>

#include "doctest.h"
#include "wsprivdb/privacy.hpp"

using namespace wsprivdb;

namespace {

const SpectrumDb& db() {
  static const SpectrumDb d = generate_ground_truth(GridSpec{32, 31}, 0.068, 2);
  return d;
}

FilterConfig config() {
  FilterConfig c;
  c.epsilon = 1e-4;
  return c;
}

ProtocolRun run(ProtocolKind kind, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const CellPos pos{static_cast<std::uint32_t>(rng.below(32)), static_cast<std::uint32_t>(rng.below(32))};
  const DeviceCharacteristics chr = DeviceCharacteristics::full_range(db().grid());
  SensingOracle sensing(db(), 1.0, seed);
  switch (kind) {
    case ProtocolKind::kLpdb: return run_lpdb(db(), pos, chr, kDefaultEpochDay, config(), sensing);
    case ProtocolKind::kLpdbLeakage:
      return run_lpdb_leakage(db(), pos, chr, kDefaultEpochDay, seed % 2 ? Axis::kX : Axis::kY, config(), sensing);
    case ProtocolKind::kLpdbqs: {
      DeterministicKeySource keys(seed);
      return run_lpdbqs(db(), pos, chr, kDefaultEpochDay, keys, config(), sensing);
    }
  }
  throw std::logic_error("unreachable");
}

using Rewrite = std::function<void(LedgerEntry&)>;

// Copy of `src` with entry `index` rewritten before it is re-appended.
ObservationLedger rewrite(const ObservationLedger& src, std::size_t index, const Rewrite& f) {
  ObservationLedger out;
  const auto entries = src.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    LedgerEntry e = entries[i];
    if (i == index) f(e);
    out.append(e.direction, e.peer, Message{e.kind, e.payload});
  }
  return out;
}

std::size_t first_of(const ObservationLedger& l, MessageKind kind) {
  const auto entries = l.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].kind == kind) return i;
  }
  FAIL("no entry of the requested kind");
  return 0;
}

void append_u32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

TEST_CASE("clean runs produce empty reports") {
  for (ProtocolKind kind : {ProtocolKind::kLpdb, ProtocolKind::kLpdbLeakage, ProtocolKind::kLpdbqs}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const ProtocolRun r = run(kind, seed);
      const PrivacyReport report = assert_privacy(r.ledgers, kind);
      INFO(to_string(kind), " seed ", seed, "\n", report.to_string());
      REQUIRE(report.clean());
    }
  }
}

TEST_CASE("a location appended to the characteristics query is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdb, 1);
  const std::size_t i = first_of(r.ledgers.db, MessageKind::kCharacteristicsQuery);
  r.ledgers.db = rewrite(r.ledgers.db, i, [](LedgerEntry& e) { append_u32(e.payload, 17); });
  const PrivacyReport report = assert_privacy(r.ledgers, ProtocolKind::kLpdb);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].party == PartyId::kDb);
  CHECK(report.violations[0].entry == i);
}

TEST_CASE("a location appended to the keyed query is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdbqs, 1);
  const std::size_t i = first_of(r.ledgers.db, MessageKind::kKeyedCharacteristicsQuery);
  r.ledgers.db = rewrite(r.ledgers.db, i, [](LedgerEntry& e) {
    append_u32(e.payload, 3);
    append_u32(e.payload, 9);
  });
  CHECK_FALSE(assert_privacy(r.ledgers, ProtocolKind::kLpdbqs).clean());
}

TEST_CASE("a second coordinate in the leakage query is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdbLeakage, 1);
  const std::size_t i = first_of(r.ledgers.db, MessageKind::kRevealedCharacteristicsQuery);
  r.ledgers.db = rewrite(r.ledgers.db, i, [](LedgerEntry& e) { append_u32(e.payload, 5); });
  CHECK_FALSE(assert_privacy(r.ledgers, ProtocolKind::kLpdbLeakage).clean());

  ProtocolRun twice = run(ProtocolKind::kLpdbLeakage, 2);
  const LedgerEntry q = twice.ledgers.db.entries()[first_of(twice.ledgers.db, MessageKind::kRevealedCharacteristicsQuery)];
  twice.ledgers.db.append(Direction::kReceived, PartyId::kSu, Message{q.kind, q.payload});
  CHECK_FALSE(assert_privacy(twice.ledgers, ProtocolKind::kLpdbLeakage).clean());
}

TEST_CASE("a wrong message kind at the DB is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdb, 3);
  r.ledgers.db.append(Direction::kReceived, PartyId::kSu, encode(RevealedCharacteristicsQuery{}));
  CHECK_FALSE(assert_privacy(r.ledgers, ProtocolKind::kLpdb).clean());
  CHECK_FALSE(assert_privacy(r.ledgers, ProtocolKind::kLpdbqs).clean());
}

TEST_CASE("key material at the QP is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdbqs, 4);
  r.ledgers.qp.append(Direction::kReceived, PartyId::kSu, encode(KeyShare{1, Bytes(32, 7)}));
  const PrivacyReport report = assert_privacy(r.ledgers, ProtocolKind::kLpdbqs);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].party == PartyId::kQp);
}

TEST_CASE("an oversized probe at the QP is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdbqs, 5);
  const std::size_t i = first_of(r.ledgers.qp, MessageKind::kHmacProbe);
  r.ledgers.qp = rewrite(r.ledgers.qp, i, [](LedgerEntry& e) { append_u32(e.payload, 42); });
  CHECK_FALSE(assert_privacy(r.ledgers, ProtocolKind::kLpdbqs).clean());
}

TEST_CASE("a location query sent to the QP is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdbqs, 6);
  r.ledgers.qp.append(Direction::kReceived, PartyId::kSu, encode(RevealedCharacteristicsQuery{}));
  CHECK_FALSE(assert_privacy(r.ledgers, ProtocolKind::kLpdbqs).clean());
}

TEST_CASE("any QP traffic in the two-party protocols is flagged") {
  ProtocolRun r = run(ProtocolKind::kLpdb, 7);
  r.ledgers.qp.append(Direction::kReceived, PartyId::kSu, Message{MessageKind::kHmacProbe, Bytes(32, 0)});
  CHECK_FALSE(assert_privacy(r.ledgers, ProtocolKind::kLpdb).clean());
}
