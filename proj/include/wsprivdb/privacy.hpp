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

#include <string>
#include <vector>

#include "wsprivdb/messages.hpp"
#include "wsprivdb/protocols.hpp"

namespace wsprivdb {

struct PrivacyViolation {
  PartyId party{};
  std::size_t entry = 0;  // index into that party's ledger
  std::string what;
};

struct PrivacyReport {
  std::vector<PrivacyViolation> violations;

  bool clean() const noexcept { return violations.empty(); }
  std::string to_string() const;
};

// Checks every ledger entry against the message schema the protocol allows
// that party to observe:
//   LPDB:      DB receives only (chr, ts) queries; QP sees nothing.
//   leakage:   DB receives exactly one single-coordinate query, no other
//              location field; QP sees nothing.
//   LPDBQS:    DB sees only key shares and (key id, chr, ts) queries; QP
//              sees only filter transfers and 32-byte MAC probes, never a key.
// A clean run yields an empty report.
PrivacyReport assert_privacy(const PartyLedgers& ledgers, ProtocolKind protocol);

}  // namespace wsprivdb
