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

#include "wsprivdb/messages.hpp"

#include <stdexcept>

namespace wsprivdb {

std::string_view to_string(PartyId p) noexcept {
  switch (p) {
    case PartyId::kSu: return "SU";
    case PartyId::kDb: return "DB";
    case PartyId::kQp: return "QP";
  }
  return "?";
}

std::string_view to_string(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::kCharacteristicsQuery: return "CharacteristicsQuery";
    case MessageKind::kRevealedCharacteristicsQuery: return "RevealedCharacteristicsQuery";
    case MessageKind::kKeyedCharacteristicsQuery: return "KeyedCharacteristicsQuery";
    case MessageKind::kKeyShare: return "KeyShare";
    case MessageKind::kFilterTransfer: return "FilterTransfer";
    case MessageKind::kHmacProbe: return "HmacProbe";
    case MessageKind::kProbeAnswer: return "ProbeAnswer";
  }
  return "?";
}

Bytes frame(const Message& m) {
  if (m.payload.size() > 0xffffffffULL) throw std::length_error("payload exceeds frame limit");
  ByteWriter w(kFrameHeaderBytes + m.payload.size());
  w.u8(static_cast<std::uint8_t>(m.kind)).u32(static_cast<std::uint32_t>(m.payload.size())).bytes(m.payload);
  return std::move(w).take();
}

Message unframe(ByteView wire) {
  ByteReader r(wire);
  const std::uint8_t kind = r.u8();
  if (kind < 1 || kind > 7) throw FormatError("unknown message kind");
  const std::uint32_t len = r.u32();
  if (r.remaining() != len) throw FormatError("frame length mismatch");
  const ByteView body = r.bytes(len);
  return Message{static_cast<MessageKind>(kind), Bytes(body.begin(), body.end())};
}

namespace {

void put(ByteWriter& w, const DeviceCharacteristics& chr) {
  w.u8(static_cast<std::uint8_t>(chr.device_type)).u16(chr.antenna_height_m).u16(chr.low_channel).u16(chr.high_channel);
}

DeviceCharacteristics get_chr(ByteReader& r) {
  DeviceCharacteristics chr;
  const std::uint8_t type = r.u8();
  if (type > 2) throw FormatError("unknown device type");
  chr.device_type = static_cast<DeviceType>(type);
  chr.antenna_height_m = r.u16();
  chr.low_channel = r.u16();
  chr.high_channel = r.u16();
  if (chr.low_channel > chr.high_channel) throw FormatError("inverted frequency range");
  return chr;
}

void expect_size(ByteView payload, std::size_t n, const char* what) {
  if (payload.size() != n) throw FormatError(std::string(what) + ": payload length does not match schema");
}

}  // namespace

Message encode(const CharacteristicsQuery& q) {
  ByteWriter w(kCharacteristicsQueryBytes);
  put(w, q.chr);
  w.u64(q.ts);
  return {MessageKind::kCharacteristicsQuery, std::move(w).take()};
}

Message encode(const RevealedCharacteristicsQuery& q) {
  ByteWriter w(kRevealedQueryBytes);
  put(w, q.chr);
  w.u64(q.ts).u8(static_cast<std::uint8_t>(q.axis)).u32(q.coordinate);
  return {MessageKind::kRevealedCharacteristicsQuery, std::move(w).take()};
}

Message encode(const KeyedCharacteristicsQuery& q) {
  ByteWriter w(kKeyedQueryBytes);
  w.u64(q.key_id);
  put(w, q.chr);
  w.u64(q.ts);
  return {MessageKind::kKeyedCharacteristicsQuery, std::move(w).take()};
}

Message encode(const KeyShare& k) {
  ByteWriter w(8 + k.key.size());
  w.u64(k.key_id).bytes(k.key);
  return {MessageKind::kKeyShare, std::move(w).take()};
}

CharacteristicsQuery decode_characteristics_query(ByteView payload) {
  expect_size(payload, kCharacteristicsQueryBytes, "CharacteristicsQuery");
  ByteReader r(payload);
  CharacteristicsQuery q;
  q.chr = get_chr(r);
  q.ts = r.u64();
  return q;
}

RevealedCharacteristicsQuery decode_revealed_query(ByteView payload) {
  expect_size(payload, kRevealedQueryBytes, "RevealedCharacteristicsQuery");
  ByteReader r(payload);
  RevealedCharacteristicsQuery q;
  q.chr = get_chr(r);
  q.ts = r.u64();
  const std::uint8_t axis = r.u8();
  if (axis > 1) throw FormatError("unknown axis");
  q.axis = static_cast<Axis>(axis);
  q.coordinate = r.u32();
  return q;
}

KeyedCharacteristicsQuery decode_keyed_query(ByteView payload) {
  expect_size(payload, kKeyedQueryBytes, "KeyedCharacteristicsQuery");
  ByteReader r(payload);
  KeyedCharacteristicsQuery q;
  q.key_id = r.u64();
  q.chr = get_chr(r);
  q.ts = r.u64();
  return q;
}

KeyShare decode_key_share(ByteView payload) {
  if (payload.size() <= 8) throw FormatError("KeyShare: missing key bytes");
  ByteReader r(payload);
  KeyShare k;
  k.key_id = r.u64();
  const ByteView key = r.bytes(r.remaining());
  k.key.assign(key.begin(), key.end());
  return k;
}

void ObservationLedger::append(Direction direction, PartyId peer, const Message& m) {
  entries_.push_back(LedgerEntry{direction, peer, m.kind, m.payload, m.payload.size()});
}

std::uint64_t ObservationLedger::bytes(Direction direction, PartyId peer) const noexcept {
  std::uint64_t total = 0;
  for (const LedgerEntry& e : entries_) {
    if (e.direction == direction && e.peer == peer) total += e.byte_len;
  }
  return total;
}

const ObservationLedger& PartyLedgers::of(PartyId p) const noexcept {
  switch (p) {
    case PartyId::kSu: return su;
    case PartyId::kDb: return db;
    case PartyId::kQp: break;
  }
  return qp;
}

ObservationLedger& Network::ledger(PartyId p) noexcept {
  switch (p) {
    case PartyId::kSu: return ledgers_.su;
    case PartyId::kDb: return ledgers_.db;
    case PartyId::kQp: break;
  }
  return ledgers_.qp;
}

std::uint64_t& Network::link(PartyId from, PartyId to) {
  using P = PartyId;
  if (from == P::kSu && to == P::kDb) return links_.su_db;
  if (from == P::kDb && to == P::kSu) return links_.db_su;
  if (from == P::kDb && to == P::kQp) return links_.db_qp;
  if (from == P::kSu && to == P::kQp) return links_.su_qp;
  if (from == P::kQp && to == P::kSu) return links_.qp_su;
  throw std::logic_error("no link from " + std::string(to_string(from)) + " to " + std::string(to_string(to)));
}

Message Network::send(PartyId from, PartyId to, const Message& m) {
  std::uint64_t& counter = link(from, to);
  const Bytes wire = frame(m);
  Message delivered = unframe(wire);
  counter += delivered.payload.size();
  ledger(from).append(Direction::kSent, to, m);
  ledger(to).append(Direction::kReceived, from, delivered);
  return delivered;
}

}  // namespace wsprivdb
