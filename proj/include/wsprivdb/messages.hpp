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
#include <string>
#include <string_view>
#include <vector>

#include "wsprivdb/bytes.hpp"
#include "wsprivdb/spectrum_db.hpp"

namespace wsprivdb {

enum class PartyId : std::uint8_t { kSu = 0, kDb = 1, kQp = 2 };
std::string_view to_string(PartyId p) noexcept;

enum class MessageKind : std::uint8_t {
  kCharacteristicsQuery = 1,          // chr, ts
  kRevealedCharacteristicsQuery = 2,  // chr, ts, one coordinate
  kKeyedCharacteristicsQuery = 3,     // key id, chr, ts
  kKeyShare = 4,                      // key id, key bytes
  kFilterTransfer = 5,                // serialized cuckoo filter
  kHmacProbe = 6,                     // HMAC_k(y)
  kProbeAnswer = 7,                   // one byte, 0 or 1
};
std::string_view to_string(MessageKind k) noexcept;

struct Message {
  MessageKind kind{};
  Bytes payload;
};

// Every simulated link carries frames of u8 kind | u32 payload length | payload.
inline constexpr std::size_t kFrameHeaderBytes = 5;
Bytes frame(const Message& m);
Message unframe(ByteView wire);

// Query schemas. None of the SU query encoders accepts a location argument
// except the revealed-coordinate variant, which takes exactly one.
struct CharacteristicsQuery {
  DeviceCharacteristics chr;
  std::uint64_t ts = 0;
};
struct RevealedCharacteristicsQuery {
  DeviceCharacteristics chr;
  std::uint64_t ts = 0;
  Axis axis = Axis::kX;
  std::uint32_t coordinate = 0;
};
struct KeyedCharacteristicsQuery {
  std::uint64_t key_id = 0;
  DeviceCharacteristics chr;
  std::uint64_t ts = 0;
};
struct KeyShare {
  std::uint64_t key_id = 0;
  Bytes key;
};

inline constexpr std::size_t kCharacteristicsBytes = 7;  // u8 type, u16 height, u16 low, u16 high
inline constexpr std::size_t kCharacteristicsQueryBytes = kCharacteristicsBytes + 8;
inline constexpr std::size_t kRevealedQueryBytes = kCharacteristicsQueryBytes + 1 + 4;
inline constexpr std::size_t kKeyedQueryBytes = 8 + kCharacteristicsQueryBytes;

Message encode(const CharacteristicsQuery& q);
Message encode(const RevealedCharacteristicsQuery& q);
Message encode(const KeyedCharacteristicsQuery& q);
Message encode(const KeyShare& k);

// Strict decoders: the payload length must match the schema exactly.
CharacteristicsQuery decode_characteristics_query(ByteView payload);
RevealedCharacteristicsQuery decode_revealed_query(ByteView payload);
KeyedCharacteristicsQuery decode_keyed_query(ByteView payload);
KeyShare decode_key_share(ByteView payload);

enum class Direction : std::uint8_t { kSent = 0, kReceived = 1 };

struct LedgerEntry {
  Direction direction{};
  PartyId peer{};
  MessageKind kind{};
  Bytes payload;
  std::size_t byte_len = 0;
};

// Append-only record of everything a party sent or received.
class ObservationLedger {
 public:
  void append(Direction direction, PartyId peer, const Message& m);

  std::span<const LedgerEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::uint64_t bytes(Direction direction, PartyId peer) const noexcept;

 private:
  std::vector<LedgerEntry> entries_;
};

struct PartyLedgers {
  ObservationLedger su;
  ObservationLedger db;
  ObservationLedger qp;

  const ObservationLedger& of(PartyId p) const noexcept;
};

// Payload bytes per directed link.
struct LinkBytes {
  std::uint64_t su_db = 0;
  std::uint64_t db_su = 0;
  std::uint64_t db_qp = 0;
  std::uint64_t su_qp = 0;
  std::uint64_t qp_su = 0;
};

// Simulated confidential point-to-point links between the three parties.
// Each send() frames the message, charges the payload to the link, records
// it in both ledgers, and hands the receiver the decoded frame.
class Network {
 public:
  Message send(PartyId from, PartyId to, const Message& m);

  const PartyLedgers& ledgers() const noexcept { return ledgers_; }
  const LinkBytes& links() const noexcept { return links_; }

 private:
  ObservationLedger& ledger(PartyId p) noexcept;
  std::uint64_t& link(PartyId from, PartyId to);

  PartyLedgers ledgers_;
  LinkBytes links_;
};

}  // namespace wsprivdb
