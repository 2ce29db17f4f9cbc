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

#include "wsprivdb/privacy.hpp"

#include <sstream>

namespace wsprivdb {

std::string PrivacyReport::to_string() const {
  std::ostringstream out;
  for (const PrivacyViolation& v : violations) {
    out << wsprivdb::to_string(v.party) << "[" << v.entry << "]: " << v.what << '\n';
  }
  return out.str();
}

namespace {

class Checker {
 public:
  explicit Checker(PrivacyReport& report) : report_(report) {}

  void flag(PartyId party, std::size_t entry, std::string what) {
    report_.violations.push_back({party, entry, std::move(what)});
  }

  // Runs a strict decoder; a schema mismatch is a violation, not an exception.
  template <typename Decode>
  bool decodes(PartyId party, std::size_t entry, const LedgerEntry& e, Decode&& decode) {
    try {
      decode(ByteView(e.payload));
      return true;
    } catch (const std::exception& ex) {
      flag(party, entry, std::string(to_string(e.kind)) + " does not match its schema: " + ex.what());
      return false;
    }
  }

 private:
  PrivacyReport& report_;
};

void check_db(Checker& c, const ObservationLedger& ledger, ProtocolKind protocol) {
  std::size_t revealed_queries = 0;
  const auto entries = ledger.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const LedgerEntry& e = entries[i];
    if (e.byte_len != e.payload.size()) c.flag(PartyId::kDb, i, "byte_len disagrees with payload");
    if (e.direction != Direction::kReceived) continue;
    if (e.peer != PartyId::kSu) {
      c.flag(PartyId::kDb, i, "DB received a message from " + std::string(to_string(e.peer)));
      continue;
    }
    switch (protocol) {
      case ProtocolKind::kLpdb:
        if (e.kind == MessageKind::kCharacteristicsQuery) {
          c.decodes(PartyId::kDb, i, e, decode_characteristics_query);
        } else {
          c.flag(PartyId::kDb, i, "LPDB allows the DB only characteristics queries, got " + std::string(to_string(e.kind)));
        }
        break;
      case ProtocolKind::kLpdbLeakage:
        if (e.kind == MessageKind::kRevealedCharacteristicsQuery) {
          if (c.decodes(PartyId::kDb, i, e, decode_revealed_query)) ++revealed_queries;
        } else {
          c.flag(PartyId::kDb, i, "leakage variant allows only one-coordinate queries, got " + std::string(to_string(e.kind)));
        }
        break;
      case ProtocolKind::kLpdbqs:
        if (e.kind == MessageKind::kKeyShare) {
          c.decodes(PartyId::kDb, i, e, decode_key_share);
        } else if (e.kind == MessageKind::kKeyedCharacteristicsQuery) {
          c.decodes(PartyId::kDb, i, e, decode_keyed_query);
        } else {
          c.flag(PartyId::kDb, i, "LPDBQS allows the DB only keys and keyed queries, got " + std::string(to_string(e.kind)));
        }
        break;
    }
  }
  if (protocol == ProtocolKind::kLpdbLeakage && revealed_queries != 1) {
    c.flag(PartyId::kDb, entries.size(), "expected exactly one revealed coordinate, saw " + std::to_string(revealed_queries));
  }
}

void check_qp(Checker& c, const ObservationLedger& ledger, ProtocolKind protocol) {
  const auto entries = ledger.entries();
  if (protocol != ProtocolKind::kLpdbqs) {
    for (std::size_t i = 0; i < entries.size(); ++i) c.flag(PartyId::kQp, i, "QP takes no part in this protocol");
    return;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const LedgerEntry& e = entries[i];
    if (e.byte_len != e.payload.size()) c.flag(PartyId::kQp, i, "byte_len disagrees with payload");
    if (e.kind == MessageKind::kKeyShare) {
      c.flag(PartyId::kQp, i, "QP ledger holds key material");
      continue;
    }
    if (e.direction == Direction::kSent) {
      if (e.kind != MessageKind::kProbeAnswer || e.payload.size() != 1) c.flag(PartyId::kQp, i, "QP may only send one-byte probe answers");
      continue;
    }
    if (e.kind == MessageKind::kFilterTransfer && e.peer == PartyId::kDb) {
      c.decodes(PartyId::kQp, i, e, [](ByteView b) { (void)CuckooFilter::deserialize(b); });
    } else if (e.kind == MessageKind::kHmacProbe && e.peer == PartyId::kSu) {
      if (e.payload.size() != kMacBytes) {
        c.flag(PartyId::kQp, i, "probe of " + std::to_string(e.payload.size()) + " bytes, expected " + std::to_string(kMacBytes));
      }
    } else {
      c.flag(PartyId::kQp, i, std::string(to_string(e.kind)) + " from " + std::string(to_string(e.peer)) + " is not allowed at QP");
    }
  }
}

}  // namespace

PrivacyReport assert_privacy(const PartyLedgers& ledgers, ProtocolKind protocol) {
  PrivacyReport report;
  Checker c(report);
  check_db(c, ledgers.db, protocol);
  check_qp(c, ledgers.qp, protocol);
  return report;
}

}  // namespace wsprivdb
