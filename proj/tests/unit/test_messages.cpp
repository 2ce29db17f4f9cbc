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

#include "doctest.h"
#include "wsprivdb/messages.hpp"

using namespace wsprivdb;

namespace {

DeviceCharacteristics sample_chr() {
  DeviceCharacteristics chr;
  chr.device_type = DeviceType::kFixed;
  chr.antenna_height_m = 30;
  chr.low_channel = 2;
  chr.high_channel = 20;
  return chr;
}

}  // namespace

TEST_CASE("frames carry kind, length and payload") {
  const Message m{MessageKind::kHmacProbe, Bytes{1, 2, 3}};
  const Bytes wire = frame(m);
  CHECK(to_hex(wire) == "06" "03000000" "010203");
  const Message back = unframe(wire);
  CHECK(back.kind == m.kind);
  CHECK(back.payload == m.payload);

  CHECK_THROWS_AS(unframe(from_hex("0003000000")), FormatError);
  CHECK_THROWS_AS(unframe(from_hex("0800000000")), FormatError);
  CHECK_THROWS_AS(unframe(from_hex("060200000001")), FormatError);
}

TEST_CASE("characteristics query: 15 bytes, no location field") {
  const Message m = encode(CharacteristicsQuery{sample_chr(), 20000});
  CHECK(m.kind == MessageKind::kCharacteristicsQuery);
  CHECK(m.payload.size() == kCharacteristicsQueryBytes);
  CHECK(kCharacteristicsQueryBytes == 1 + 2 + 2 + 2 + 8);
  CHECK(to_hex(m.payload) == "00" "1e00" "0200" "1400" "204e000000000000");
  const CharacteristicsQuery q = decode_characteristics_query(m.payload);
  CHECK(q.chr == sample_chr());
  CHECK(q.ts == 20000);
}

TEST_CASE("revealed query adds exactly one coordinate") {
  const Message m = encode(RevealedCharacteristicsQuery{sample_chr(), 20000, Axis::kY, 41});
  CHECK(m.payload.size() == kRevealedQueryBytes);
  CHECK(kRevealedQueryBytes == 15 + 1 + 4);
  const RevealedCharacteristicsQuery q = decode_revealed_query(m.payload);
  CHECK(q.axis == Axis::kY);
  CHECK(q.coordinate == 41);
  CHECK(q.chr == sample_chr());
}

TEST_CASE("keyed query and key share") {
  const Message q = encode(KeyedCharacteristicsQuery{0xabcdef, sample_chr(), 20000});
  CHECK(q.payload.size() == kKeyedQueryBytes);
  CHECK(kKeyedQueryBytes == 23);
  const KeyedCharacteristicsQuery dq = decode_keyed_query(q.payload);
  CHECK(dq.key_id == 0xabcdef);
  CHECK(dq.ts == 20000);

  const Message k = encode(KeyShare{7, Bytes(32, 9)});
  CHECK(k.kind == MessageKind::kKeyShare);
  CHECK(k.payload.size() == 40);
  const KeyShare dk = decode_key_share(k.payload);
  CHECK(dk.key_id == 7);
  CHECK(dk.key == Bytes(32, 9));
  CHECK_THROWS_AS(decode_key_share(Bytes(8, 0)), FormatError);
}

TEST_CASE("decoders insist on the exact schema length") {
  Bytes p = encode(CharacteristicsQuery{sample_chr(), 1}).payload;
  p.push_back(0);
  CHECK_THROWS_AS(decode_characteristics_query(p), FormatError);
  p.resize(14);
  CHECK_THROWS_AS(decode_characteristics_query(p), FormatError);
  CHECK_THROWS_AS(decode_revealed_query(encode(CharacteristicsQuery{}).payload), FormatError);
  CHECK_THROWS_AS(decode_keyed_query(encode(CharacteristicsQuery{}).payload), FormatError);

  Bytes bad_axis = encode(RevealedCharacteristicsQuery{}).payload;
  bad_axis[15] = 2;
  CHECK_THROWS_AS(decode_revealed_query(bad_axis), FormatError);
}

TEST_CASE("network charges payload bytes and records both ledgers") {
  Network net;
  const Message q = encode(CharacteristicsQuery{sample_chr(), 5});
  const Message got = net.send(PartyId::kSu, PartyId::kDb, q);
  CHECK(got.payload == q.payload);
  net.send(PartyId::kDb, PartyId::kSu, Message{MessageKind::kFilterTransfer, Bytes(100, 0)});
  net.send(PartyId::kDb, PartyId::kQp, Message{MessageKind::kFilterTransfer, Bytes(50, 0)});
  net.send(PartyId::kSu, PartyId::kQp, Message{MessageKind::kHmacProbe, Bytes(32, 0)});
  net.send(PartyId::kQp, PartyId::kSu, Message{MessageKind::kProbeAnswer, Bytes{1}});

  const LinkBytes& l = net.links();
  CHECK(l.su_db == 15);
  CHECK(l.db_su == 100);
  CHECK(l.db_qp == 50);
  CHECK(l.su_qp == 32);
  CHECK(l.qp_su == 1);

  const PartyLedgers& ledgers = net.ledgers();
  CHECK(ledgers.su.size() == 4);
  CHECK(ledgers.db.size() == 3);
  CHECK(ledgers.qp.size() == 3);
  CHECK(ledgers.db.bytes(Direction::kReceived, PartyId::kSu) == 15);
  CHECK(ledgers.su.bytes(Direction::kReceived, PartyId::kDb) == 100);
  CHECK(ledgers.su.bytes(Direction::kSent, PartyId::kQp) == 32);
  CHECK(&ledgers.of(PartyId::kQp) == &ledgers.qp);
  for (const LedgerEntry& e : ledgers.su.entries()) CHECK(e.byte_len == e.payload.size());

  CHECK_THROWS(net.send(PartyId::kQp, PartyId::kDb, q));
}
