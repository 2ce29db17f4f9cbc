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

#include "wsprivdb/cost_model.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "wsprivdb/messages.hpp"

namespace wsprivdb::cost {
namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double need(const std::optional<double>& v, const char* name, Scheme s) {
  if (!v) throw MissingParameter(std::string(name) + " is required for " + std::string(to_string(s)));
  return *v;
}

double sigma_qr_bits(Scheme s, const CostParams& p) {
  return 8.0 * (p.sigma_qr_bytes ? *p.sigma_qr_bytes : measured_sigma_qr_bytes(s));
}

void put_params(std::ostringstream& out, const CostParams& p) {
  out << "# m=" << num(p.m) << " n_ch=" << num(p.n_ch) << " rho=" << num(p.rho) << " epsilon=" << num(p.epsilon)
      << " beta=" << num(p.beta) << " alpha=" << num(p.alpha) << " sigma_hmac_bytes=" << num(p.sigma_hmac_bytes)
      << '\n';
  out << "# sigma_qr_bytes="
      << (p.sigma_qr_bytes ? num(*p.sigma_qr_bytes) : std::string("measured(lpdb=") + num(measured_sigma_qr_bytes(Scheme::kLpdb)) +
                                                          ",lpdb-leak=" + num(measured_sigma_qr_bytes(Scheme::kLpdbLeakage)) +
                                                          ",lpdbqs=" + num(measured_sigma_qr_bytes(Scheme::kLpdbqs)) + ")")
      << '\n';
  out << "# unit_costs insert=" << num(p.units.insert) << " lookup=" << num(p.units.lookup) << " hash=" << num(p.units.hash)
      << " hmac=" << num(p.units.hmac) << " mulp=" << num(p.units.mulp) << " expp=" << num(p.units.expp) << '\n';
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::kLpdb: return "lpdb";
    case Scheme::kLpdbLeakage: return "lpdb-leak";
    case Scheme::kLpdbqs: return "lpdbqs";
    case Scheme::kPriSpectrum: return "prispectrum";
    case Scheme::kTroja15: return "troja15";
    case Scheme::kTroja14: return "troja14";
    case Scheme::kKAnonymity: return "k-anonymity";
    case Scheme::kGeoIndistinguishability: return "geo-indistinguishability";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (Scheme s : privacy_schemes()) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const std::vector<Scheme>& overhead_schemes() {
  static const std::vector<Scheme> kSchemes = {Scheme::kLpdb,        Scheme::kLpdbLeakage, Scheme::kLpdbqs,
                                               Scheme::kPriSpectrum, Scheme::kTroja15,     Scheme::kTroja14};
  return kSchemes;
}

const std::vector<Scheme>& privacy_schemes() {
  static const std::vector<Scheme> kSchemes = {Scheme::kLpdb,    Scheme::kLpdbLeakage, Scheme::kPriSpectrum,
                                               Scheme::kTroja15, Scheme::kTroja14,     Scheme::kLpdbqs,
                                               Scheme::kKAnonymity, Scheme::kGeoIndistinguishability};
  return kSchemes;
}

void CostParams::validate() const {
  if (!(m >= 1)) throw std::invalid_argument("m must be at least 1");
  if (!(n_ch >= 0)) throw std::invalid_argument("n_ch must be non-negative");
  if (!(rho >= 0 && rho <= 1)) throw std::invalid_argument("rho must lie in [0, 1]");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(beta >= 1)) throw std::invalid_argument("beta must be at least 1");
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (sigma_qr_bytes && *sigma_qr_bytes < 0) throw std::invalid_argument("sigma_qr must be non-negative");
  if (sigma_hmac_bytes < 0) throw std::invalid_argument("sigma_hmac must be non-negative");
  for (const auto* opt : {&p_bits, &q_bits, &b, &n_g, &v, &d, &big_n, &k, &r}) {
    if (*opt && **opt < 0) throw std::invalid_argument("baseline parameters must be non-negative");
  }
}

CostParams with_baseline_defaults(CostParams p) {
  if (!p.p_bits) p.p_bits = 1024;
  if (!p.q_bits) p.q_bits = 1024;
  if (!p.d) p.d = 4;
  if (!p.b) p.b = 16;
  if (!p.n_g) p.n_g = 10;
  if (!p.v) p.v = 64;
  if (!p.big_n) p.big_n = p.m;
  return p;
}

std::string baseline_defaults_note() {
  return "# non-source defaults: p_bits=1024 q_bits=1024 d=4 b=16 n_g=10 v=64 N=m (unless overridden)";
}

double measured_sigma_qr_bytes(Scheme s) {
  switch (s) {
    case Scheme::kLpdb: return static_cast<double>(encode(CharacteristicsQuery{}).payload.size());
    case Scheme::kLpdbLeakage: return static_cast<double>(encode(RevealedCharacteristicsQuery{}).payload.size());
    case Scheme::kLpdbqs:
      return static_cast<double>(encode(KeyShare{0, Bytes(32)}).payload.size() +
                                 encode(KeyedCharacteristicsQuery{}).payload.size());
    default: return 0.0;
  }
}

double cuckoo_bits_per_item(double epsilon, double beta, double alpha) {
  return (std::log2(1.0 / epsilon) + std::log2(2.0 * beta)) / alpha;
}

double bloom_bits_per_item(double epsilon) { return 1.44 * std::log2(1.0 / epsilon); }

double filter_entries(Scheme s, const CostParams& p) {
  switch (s) {
    case Scheme::kLpdb:
    case Scheme::kLpdbqs: return p.rho * p.n_ch * p.m;
    case Scheme::kLpdbLeakage: return p.rho * p.n_ch * std::sqrt(p.m);
    default: throw std::invalid_argument(std::string(to_string(s)) + " does not use a cuckoo filter");
  }
}

double filter_transfer_bits(Scheme s, const CostParams& p) {
  p.validate();
  return filter_entries(s, p) * cuckoo_bits_per_item(p.epsilon, p.beta, p.alpha);
}

double comm_bits(Scheme s, const CostParams& p) {
  p.validate();
  const double sqrt_m = std::sqrt(p.m);
  switch (s) {
    case Scheme::kLpdb:
    case Scheme::kLpdbLeakage: return sigma_qr_bits(s, p) + filter_transfer_bits(s, p);
    case Scheme::kLpdbqs: return sigma_qr_bits(s, p) + filter_transfer_bits(s, p) + p.n_ch * 8.0 * p.sigma_hmac_bytes;
    case Scheme::kPriSpectrum: return (2 * sqrt_m + 3) * need(p.p_bits, "p_bits", s);
    case Scheme::kTroja15: return (2 + need(p.d, "d", s)) * std::log2(need(p.big_n, "N", s));
    case Scheme::kTroja14:
      return need(p.n_g, "n_g", s) * need(p.b, "b", s) * need(p.q_bits, "q_bits", s) +
             (2 * sqrt_m + 3) * need(p.p_bits, "p_bits", s);
    case Scheme::kKAnonymity:
    case Scheme::kGeoIndistinguishability: break;
  }
  throw std::invalid_argument(std::string(to_string(s)) + " has no overhead formula");
}

std::optional<double> comp(Scheme s, Party party, const CostParams& p) {
  p.validate();
  const UnitCosts& u = p.units;
  const double sqrt_m = std::sqrt(p.m);
  switch (s) {
    case Scheme::kLpdb:
    case Scheme::kLpdbLeakage:
      if (party == Party::kDb) return filter_entries(s, p) * u.insert;
      if (party == Party::kSu) return p.n_ch * (u.hash + u.lookup);
      return std::nullopt;
    case Scheme::kLpdbqs:
      if (party == Party::kDb) return filter_entries(s, p) * u.insert;
      if (party == Party::kSu) return p.n_ch * u.hmac;
      return p.n_ch * u.lookup;
    case Scheme::kPriSpectrum:
      if (party == Party::kDb) return p.m * u.mulp;
      if (party == Party::kSu) return 4 * sqrt_m * u.mulp;
      return std::nullopt;
    case Scheme::kTroja15:
      if (party == Party::kDb) return p.m * u.mulp;
      if (party == Party::kSu) return 4 * std::sqrt(p.m * need(p.v, "v", s)) * u.mulp;
      return std::nullopt;
    case Scheme::kTroja14:
      if (party == Party::kDb) return p.m * u.mulp;
      if (party == Party::kSu) {
        return need(p.n_g, "n_g", s) * need(p.b, "b", s) * (2 * u.expp + u.mulp) + 4 * sqrt_m * u.mulp;
      }
      return std::nullopt;
    case Scheme::kKAnonymity:
    case Scheme::kGeoIndistinguishability: break;
  }
  throw std::invalid_argument(std::string(to_string(s)) + " has no overhead formula");
}

double localization_probability(Scheme s, const CostParams& p) {
  if (!(p.m >= 1)) throw std::invalid_argument("m must be at least 1");
  double value = 0;
  switch (s) {
    case Scheme::kLpdbLeakage: value = std::sqrt(1.0 / p.m); break;
    case Scheme::kKAnonymity: value = 1.0 / need(p.k, "k", s); break;
    case Scheme::kGeoIndistinguishability: value = 1.0 / need(p.r, "r", s); break;
    default: value = 1.0 / p.m; break;
  }
  // No scheme can localize better than "somewhere in the m cells".
  return std::min(1.0, std::max(value, 1.0 / p.m));
}

std::string_view security_level(Scheme s) noexcept {
  switch (s) {
    case Scheme::kLpdb: return "unconditional";
    case Scheme::kLpdbLeakage: return "unconditional within one coordinate";
    case Scheme::kLpdbqs: return "kappa-HMAC";
    case Scheme::kPriSpectrum:
    case Scheme::kTroja15:
    case Scheme::kTroja14: return "computational PIR";
    case Scheme::kKAnonymity: return "k-anonymity";
    case Scheme::kGeoIndistinguishability: return "geo-indistinguishability";
  }
  return "?";
}

std::vector<BitsPerItemRow> bits_per_item_curve(const std::vector<unsigned>& betas, const std::vector<double>& epsilons,
                                                double alpha) {
  std::vector<BitsPerItemRow> rows;
  for (unsigned beta : betas) {
    if (beta < 1) throw std::invalid_argument("beta must be at least 1");
    for (double eps : epsilons) {
      if (!(eps > 0 && eps < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
      rows.push_back({beta, eps, cuckoo_bits_per_item(eps, beta, alpha), bloom_bits_per_item(eps)});
    }
  }
  return rows;
}

std::string fig3_csv(const std::vector<unsigned>& betas, const std::vector<double>& epsilons, double alpha) {
  std::ostringstream out;
  out << "# fig3: cuckoo bits per item (log2(1/eps)+log2(2*beta))/alpha vs bloom 1.44*log2(1/eps)\n";
  out << "# alpha=" << num(alpha) << '\n';
  out << "beta,epsilon,bits_per_item,bloom_bits\n";
  for (const BitsPerItemRow& r : bits_per_item_curve(betas, epsilons, alpha)) {
    out << r.beta << ',' << num(r.epsilon) << ',' << num(r.bits_per_item) << ',' << num(r.bloom_bits) << '\n';
  }
  return out.str();
}

std::string fig4_csv(const std::vector<double>& ms, const CostParams& base) {
  std::ostringstream out;
  const CostParams params = with_baseline_defaults(base);
  out << "# fig4: communication overhead in bits vs number of cells\n";
  put_params(out, params);
  out << baseline_defaults_note() << '\n';
  out << "m,scheme,comm_bits\n";
  for (double m : ms) {
    CostParams p = params;
    p.m = m;
    if (!base.big_n) p.big_n = m;
    for (Scheme s : overhead_schemes()) out << num(m) << ',' << to_string(s) << ',' << num(comm_bits(s, p)) << '\n';
  }
  return out.str();
}

std::string fig5_csv(Party party, const std::vector<double>& ms, const CostParams& base) {
  std::ostringstream out;
  const CostParams params = with_baseline_defaults(base);
  out << "# fig5" << (party == Party::kDb ? "a: DB" : "b: SU") << " computation in unit-cost operations vs number of cells\n";
  put_params(out, params);
  out << baseline_defaults_note() << '\n';
  out << "m,scheme,cost_units\n";
  for (double m : ms) {
    CostParams p = params;
    p.m = m;
    if (!base.big_n) p.big_n = m;
    for (Scheme s : overhead_schemes()) {
      const std::optional<double> c = comp(s, party, p);
      if (c) out << num(m) << ',' << to_string(s) << ',' << num(*c) << '\n';
    }
  }
  return out.str();
}

std::string fig6_csv(const std::vector<double>& rhos, const CostParams& base) {
  std::ostringstream out;
  out << "# fig6: overhead vs fraction of available entries; comp_units sums DB, SU and QP\n";
  put_params(out, base);
  out << "rho,scheme,comm_bits,comp_units\n";
  for (double rho : rhos) {
    CostParams p = base;
    p.rho = rho;
    for (Scheme s : {Scheme::kLpdb, Scheme::kLpdbLeakage}) {
      double total = 0;
      for (Party party : {Party::kDb, Party::kSu, Party::kQp}) total += comp(s, party, p).value_or(0.0);
      out << num(rho) << ',' << to_string(s) << ',' << num(comm_bits(s, p)) << ',' << num(total) << '\n';
    }
  }
  return out.str();
}

std::string table2_csv(const CostParams& p) {
  std::ostringstream out;
  out << "# table2: localization probability per scheme\n";
  out << "# m=" << num(p.m) << " k=" << (p.k ? num(*p.k) : std::string("unset")) << " r=" << (p.r ? num(*p.r) : std::string("unset"))
      << '\n';
  out << "scheme,security_level,localization_probability\n";
  for (Scheme s : privacy_schemes()) {
    out << to_string(s) << ',' << security_level(s) << ',' << num(localization_probability(s, p)) << '\n';
  }
  return out.str();
}

}  // namespace wsprivdb::cost
