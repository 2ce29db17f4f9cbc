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

#include "wsprivdb/protocols.hpp"

#include <charconv>
#include <cstring>
#include <map>
#include <sstream>
#include <string_view>

namespace wsprivdb {

std::string_view to_string(ProtocolKind k) noexcept {
  switch (k) {
    case ProtocolKind::kLpdb: return "lpdb";
    case ProtocolKind::kLpdbLeakage: return "lpdb-leak";
    case ProtocolKind::kLpdbqs: return "lpdbqs";
  }
  return "?";
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) noexcept {
  if (name == "lpdb") return ProtocolKind::kLpdb;
  if (name == "lpdb-leak") return ProtocolKind::kLpdbLeakage;
  if (name == "lpdbqs") return ProtocolKind::kLpdbqs;
  return std::nullopt;
}

SensingOracle::SensingOracle(const SpectrumDb& db, double accuracy, std::uint64_t seed)
    : db_(&db), accuracy_(accuracy), rng_(mix64(seed ^ 0x73656e73696e6700ULL)) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw InvalidRange("sensing accuracy must lie in [0, 1]");
}

bool SensingOracle::sense(std::uint32_t cell, std::uint16_t chn) {
  if (cell >= db_->grid().cells() || chn >= db_->grid().n_ch) throw InvalidRange("sensing outside the grid");
  ++calls_;
  const bool truth = db_->available(cell, chn);
  return rng_.unit() < accuracy_ ? truth : !truth;
}

std::string Decision::label() const {
  if (!available()) return "busy";
  std::string out = "available:ch=" + std::to_string(chn);
  for (const TxParam& p : params) out += ":p" + std::to_string(p.param_id) + "=" + std::to_string(p.value);
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

constexpr unsigned kFilterBuildAttempts = 8;

struct BuiltFilter {
  CuckooFilter filter;
  std::uint64_t inserts = 0;
};

// DB side of every protocol: encode each available row for the requested day
// and insert it, keyed when a MAC is supplied.
BuiltFilter build_filter(const SpectrumDb& db, const std::vector<RowRef>& rows, std::uint64_t ts,
                         const FilterConfig& config, HmacSha256* mac) {
  std::vector<RowRef> available;
  if (db.ts() == ts) {
    for (const RowRef& r : rows) {
      if (db.available(r.cell, r.chn)) available.push_back(r);
    }
  }
  const std::uint64_t capacity = std::max<std::uint64_t>(1, available.size());
  const FilterParams params =
      derive_params(config.epsilon, config.beta, config.alpha, capacity, config.sizing, config.max_kicks);
  std::vector<Bytes> entries;
  entries.reserve(available.size());
  for (const RowRef& r : available) entries.push_back(encode_entry(db.row(r)));

  // Small tables near alpha = 0.95 fail a few percent of the time; a rebuild
  // under a fresh hash seed keeps the size fixed. The seed travels in the
  // filter header.
  std::uint64_t best = 0;
  for (unsigned attempt = 0; attempt < kFilterBuildAttempts; ++attempt) {
    const std::uint64_t seed = attempt == 0 ? config.hash_seed : mix64(config.hash_seed + attempt);
    BuiltFilter out{CuckooFilter(params, seed), 0};
    for (const Bytes& x : entries) {
      const InsertOutcome res = mac != nullptr ? out.filter.keyed_insert(*mac, x) : out.filter.insert(x);
      if (res == InsertOutcome::Full) break;
      ++out.inserts;
    }
    if (out.inserts == entries.size()) return out;
    best = std::max(best, out.inserts);
  }
  throw CapacityError("filter full after " + std::to_string(best) + " of " + std::to_string(entries.size()) +
                      " available rows in every one of " + std::to_string(kFilterBuildAttempts) + " builds");
}

// SU side: walk channels in ascending order, each with every parameter
// combination, and stop at the first hit that sensing confirms.
template <typename Probe>
Decision su_search(const SpectrumDb& db, CellPos pos, const DeviceCharacteristics& chr, std::uint64_t ts,
                   SensingOracle& sensing, Probe&& probe) {
  Decision d;
  const std::uint32_t cell = db.cell_of(pos);
  const std::vector<ParamTuple> combos = enumerate_param_combinations(chr, db.domains());
  for (std::uint16_t c = chr.low_channel; c <= chr.high_channel; ++c) {
    for (const ParamTuple& params : combos) {
      const Bytes y = encode_query(pos.lx, pos.ly, c, ts, params);
      ++d.probes_used;
      if (!probe(y)) continue;
      ++d.sensing_calls;
      if (sensing.sense(cell, c)) {
        d.outcome = Decision::Outcome::kChannelAvailable;
        d.chn = c;
        d.params = params;
        return d;
      }
    }
  }
  return d;
}

void check_position(const SpectrumDb& db, CellPos pos, const DeviceCharacteristics& chr) {
  if (pos.lx >= db.grid().side || pos.ly >= db.grid().side) throw InvalidRange("SU position outside the grid");
  chr.validate(db.grid());
}

RunStats base_stats(ProtocolKind kind, const SpectrumDb& db, const FilterConfig& config) {
  RunStats s;
  s.protocol = kind;
  s.m = db.grid().cells();
  s.n_ch = db.grid().n_ch;
  s.rho = db.rho_target();
  s.epsilon = config.epsilon;
  s.beta = config.beta;
  s.alpha = config.alpha;
  return s;
}

ProtocolRun finish(RunStats stats, const Decision& d, const Network& net) {
  stats.decision = d;
  stats.probes = d.probes_used;
  stats.sensing_calls = d.sensing_calls;
  stats.links = net.links();
  return ProtocolRun{d, std::move(stats), net.ledgers()};
}

std::uint64_t key_id_for(const SecretKey& key) {
  static constexpr std::uint8_t kLabel[] = {'k', 'e', 'y', '-', 'i', 'd'};
  const Mac tag = hmac_sha256(key.bytes(), kLabel);
  std::uint64_t id = 0;
  for (int i = 0; i < 8; ++i) id |= std::uint64_t{tag[i]} << (8 * i);
  return id;
}

ProtocolRun run_lpdb_common(ProtocolKind kind, const SpectrumDb& db, CellPos pos, const DeviceCharacteristics& chr,
                            std::uint64_t ts, std::optional<Axis> revealed, const FilterConfig& config,
                            SensingOracle& sensing) {
  check_position(db, pos, chr);
  Network net;
  RunStats stats = base_stats(kind, db, config);

  // SU -> DB: characteristics (and at most one coordinate).
  std::vector<RowRef> rows;
  std::uint64_t query_ts = 0;
  if (revealed) {
    const std::uint32_t coord = *revealed == Axis::kX ? pos.lx : pos.ly;
    const Message got = net.send(PartyId::kSu, PartyId::kDb, encode(RevealedCharacteristicsQuery{chr, ts, *revealed, coord}));
    const RevealedCharacteristicsQuery q = decode_revealed_query(got.payload);
    rows = db.retrieve(q.chr, q.axis, q.coordinate);
    query_ts = q.ts;
  } else {
    const Message got = net.send(PartyId::kSu, PartyId::kDb, encode(CharacteristicsQuery{chr, ts}));
    const CharacteristicsQuery q = decode_characteristics_query(got.payload);
    rows = db.retrieve(q.chr);
    query_ts = q.ts;
  }

  // DB -> SU: the filter.
  const BuiltFilter built = build_filter(db, rows, query_ts, config, nullptr);
  stats.inserts = built.inserts;
  const Message transfer = net.send(PartyId::kDb, PartyId::kSu, {MessageKind::kFilterTransfer, built.filter.serialize()});
  stats.filter_bytes = transfer.payload.size();

  // SU: local lookups.
  const CuckooFilter filter = CuckooFilter::deserialize(transfer.payload);
  const Decision d = su_search(db, pos, chr, ts, sensing, [&](const Bytes& y) {
    ++stats.hashes;
    ++stats.lookups;
    return filter.contains(y);
  });
  return finish(std::move(stats), d, net);
}

// Shared tail of both LPDBQS variants, from the filter transfer onward.
ProtocolRun lpdbqs_probe_phase(RunStats stats, Network& net, const SpectrumDb& db, CellPos pos,
                               const DeviceCharacteristics& chr, std::uint64_t ts, const SecretKey& su_key,
                               ByteView filter_bytes, SensingOracle& sensing) {
  QueryServer qp;
  const Message transfer = net.send(PartyId::kDb, PartyId::kQp, {MessageKind::kFilterTransfer, Bytes(filter_bytes.begin(), filter_bytes.end())});
  stats.filter_bytes = transfer.payload.size();
  qp.receive_filter(transfer.payload);

  HmacSha256 mac(su_key);
  const Decision d = su_search(db, pos, chr, ts, sensing, [&](const Bytes& y) {
    const Mac yk = mac.mac(y);
    ++stats.hmacs;
    const Message probe = net.send(PartyId::kSu, PartyId::kQp, {MessageKind::kHmacProbe, Bytes(yk.begin(), yk.end())});
    const bool hit = qp.answer(probe.payload);
    const Message answer = net.send(PartyId::kQp, PartyId::kSu, {MessageKind::kProbeAnswer, Bytes{hit ? std::uint8_t{1} : std::uint8_t{0}}});
    if (answer.payload.size() != 1 || answer.payload[0] > 1) throw ProtocolError("malformed probe answer");
    return answer.payload[0] == 1;
  });
  stats.lookups = qp.lookups();
  return finish(std::move(stats), d, net);
}

}  // namespace

std::string run_stats_csv_header() {
  return "protocol,m,n_ch,rho,epsilon,beta,alpha,bytes_su_db,bytes_db_su,bytes_db_qp,bytes_su_qp,"
         "inserts,lookups,hmacs,sensing_calls,probes,decision";
}

std::string to_csv_row(const RunStats& s) {
  std::ostringstream out;
  out << to_string(s.protocol) << ',' << s.m << ',' << s.n_ch << ',' << format_double(s.rho) << ','
      << format_double(s.epsilon) << ',' << s.beta << ',' << format_double(s.alpha) << ',' << s.links.su_db << ','
      << s.links.db_su << ',' << s.links.db_qp << ',' << s.links.su_qp << ',' << s.inserts << ',' << s.lookups << ','
      << s.hmacs << ',' << s.sensing_calls << ',' << s.probes << ',' << s.decision.label();
  return out.str();
}

SharedKey key_exchange(Network& net, KeySource& keys) {
  SecretKey key = keys.next();
  const std::uint64_t key_id = key_id_for(key);
  const Message got = net.send(PartyId::kSu, PartyId::kDb, encode(KeyShare{key_id, Bytes(key.bytes().begin(), key.bytes().end())}));
  const KeyShare share = decode_key_share(got.payload);
  return SharedKey{share.key_id, SecretKey(share.key)};
}

ProtocolRun run_lpdb(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr, std::uint64_t ts,
                     const FilterConfig& config, SensingOracle& sensing) {
  return run_lpdb_common(ProtocolKind::kLpdb, db, su_position, chr, ts, std::nullopt, config, sensing);
}

ProtocolRun run_lpdb_leakage(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr,
                             std::uint64_t ts, Axis revealed_axis, const FilterConfig& config,
                             SensingOracle& sensing) {
  return run_lpdb_common(ProtocolKind::kLpdbLeakage, db, su_position, chr, ts, revealed_axis, config, sensing);
}

ProtocolRun run_lpdbqs(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr, std::uint64_t ts,
                       KeySource& keys, const FilterConfig& config, SensingOracle& sensing) {
  check_position(db, su_position, chr);
  Network net;
  RunStats stats = base_stats(ProtocolKind::kLpdbqs, db, config);

  // The SU picks the key and its identifier; the DB learns both.
  const SharedKey shared = key_exchange(net, keys);
  std::map<std::uint64_t, SecretKey> db_keys;
  db_keys.emplace(shared.key_id, shared.key);
  const SecretKey& su_key = shared.key;
  const std::uint64_t key_id = shared.key_id;

  const Message got = net.send(PartyId::kSu, PartyId::kDb, encode(KeyedCharacteristicsQuery{key_id, chr, ts}));
  const KeyedCharacteristicsQuery q = decode_keyed_query(got.payload);
  const auto it = db_keys.find(q.key_id);
  if (it == db_keys.end()) throw ProtocolError("keyed query names an unknown key");
  HmacSha256 db_mac(it->second);
  const BuiltFilter built = build_filter(db, db.retrieve(q.chr), q.ts, config, &db_mac);
  stats.inserts = built.inserts;
  stats.hmacs = built.inserts;

  return lpdbqs_probe_phase(std::move(stats), net, db, su_position, chr, ts, su_key, built.filter.serialize(), sensing);
}

KeyedFilterPool::KeyedFilterPool(const SpectrumDb& db, const DeviceCharacteristics& chr, std::uint64_t ts,
                                 std::size_t z, KeySource& keys, const FilterConfig& config)
    : chr_(chr), ts_(ts) {
  chr.validate(db.grid());
  const std::vector<RowRef> rows = db.retrieve(chr);
  entries_.reserve(z);
  for (std::size_t i = 0; i < z; ++i) {
    SecretKey key = keys.next();
    HmacSha256 mac(key);
    FilterConfig c = config;
    c.hash_seed = mix64(config.hash_seed + i);
    BuiltFilter built = build_filter(db, rows, ts, c, &mac);
    const std::uint64_t id = key_id_for(key);
    entries_.push_back(Entry{id, std::move(key), built.filter.serialize(), built.inserts});
  }
}

const KeyedFilterPool::Entry* KeyedFilterPool::find(std::uint64_t key_id) const noexcept {
  for (const Entry& e : entries_) {
    if (e.key_id == key_id) return &e;
  }
  return nullptr;
}

const KeyedFilterPool::Entry* KeyedFilterPool::take() noexcept {
  return next_ < entries_.size() ? &entries_[next_++] : nullptr;
}

ProtocolRun run_lpdbqs_pooled(const SpectrumDb& db, CellPos su_position, const DeviceCharacteristics& chr,
                              std::uint64_t ts, KeyedFilterPool& pool, const FilterConfig& config,
                              SensingOracle& sensing) {
  check_position(db, su_position, chr);
  if (!(chr == pool.chr()) || ts != pool.ts()) throw ProtocolError("pool was built for other characteristics");
  const KeyedFilterPool::Entry* entry = pool.take();
  if (entry == nullptr) throw CapacityError("keyed filter pool exhausted");

  Network net;
  RunStats stats = base_stats(ProtocolKind::kLpdbqs, db, config);

  // The DB hands out a pool key; the SU names it in its query.
  const Message shared = net.send(PartyId::kDb, PartyId::kSu, encode(KeyShare{entry->key_id, Bytes(entry->key.bytes().begin(), entry->key.bytes().end())}));
  KeyShare su_share = decode_key_share(shared.payload);
  const SecretKey su_key(std::move(su_share.key));

  const Message got = net.send(PartyId::kSu, PartyId::kDb, encode(KeyedCharacteristicsQuery{su_share.key_id, chr, ts}));
  const KeyedCharacteristicsQuery q = decode_keyed_query(got.payload);
  const KeyedFilterPool::Entry* cached = pool.find(q.key_id);
  if (cached == nullptr) throw ProtocolError("keyed query names an unknown key");
  stats.inserts = cached->inserts;
  stats.hmacs = cached->inserts;

  return lpdbqs_probe_phase(std::move(stats), net, db, su_position, chr, ts, su_key, cached->filter_bytes, sensing);
}

void QueryServer::receive_filter(ByteView filter_bytes) { filter_.emplace(CuckooFilter::deserialize(filter_bytes)); }

bool QueryServer::answer(ByteView probe) {
  if (!filter_) throw ProtocolError("probe received before any filter transfer");
  if (probe.size() != kMacBytes) throw ProtocolError("probe is not a MAC-sized value");
  ++lookups_;
  return filter_->contains(probe);
}

}  // namespace wsprivdb
