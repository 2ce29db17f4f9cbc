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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Closed-form overhead and privacy figures for the cuckoo-filter schemes and
// the PIR-based baselines they are compared against. Communication is in
// bits; computation is a weighted count of primitive operations.
namespace wsprivdb::cost {

class MissingParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scheme {
  kLpdb,
  kLpdbLeakage,
  kLpdbqs,
  kPriSpectrum,
  kTroja15,  // segment/block PIR
  kTroja14,  // group-shared-bits PIR
  kKAnonymity,
  kGeoIndistinguishability,
};
std::string_view to_string(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

// Schemes that appear in the overhead comparison (everything but the two
// obfuscation baselines).
const std::vector<Scheme>& overhead_schemes();
const std::vector<Scheme>& privacy_schemes();

enum class Party { kDb, kSu, kQp };

// Relative cost of one primitive operation. All 1 unless calibrated.
struct UnitCosts {
  double insert = 1.0;
  double lookup = 1.0;
  double hash = 1.0;
  double hmac = 1.0;
  double mulp = 1.0;
  double expp = 1.0;
};

struct CostParams {
  double m = 4096;
  double n_ch = 31;
  double rho = 0.068;
  double epsilon = 1e-8;
  double beta = 4;
  double alpha = 0.95;
  // Bytes of the SU's query; measured from the protocol encoders when unset.
  std::optional<double> sigma_qr_bytes;
  double sigma_hmac_bytes = 32;

  // Baseline-specific inputs. Formulas needing an absent one throw
  // MissingParameter.
  std::optional<double> p_bits;  // ceil(log p)
  std::optional<double> q_bits;  // log2 q
  std::optional<double> b;       // bits shared per SU
  std::optional<double> n_g;     // SUs per group
  std::optional<double> v;       // block size
  std::optional<double> d;       // DB segments
  std::optional<double> big_n;   // database size symbol N
  std::optional<double> k;       // k-anonymity set size
  std::optional<double> r;       // geo-indistinguishability radius

  UnitCosts units;

  void validate() const;
};

// Plot defaults for inputs the comparison never pins down:
// p_bits = q_bits = 1024, d = 4, b = 16, n_g = 10, v = 64, N = m.
CostParams with_baseline_defaults(CostParams p);
std::string baseline_defaults_note();

// Bytes of the SU's query message for the scheme, taken from the actual
// encoders. For LPDBQS this is the key share plus the keyed query.
double measured_sigma_qr_bytes(Scheme s);

double cuckoo_bits_per_item(double epsilon, double beta, double alpha);
double bloom_bits_per_item(double epsilon);

// Entries the DB inserts: rho * n_ch * m, or rho * n_ch * sqrt(m) with leakage.
double filter_entries(Scheme s, const CostParams& p);
// Filter bits shipped by the DB (the comm formula without the query and probes).
double filter_transfer_bits(Scheme s, const CostParams& p);

double comm_bits(Scheme s, const CostParams& p);
// nullopt where the party takes no part in the scheme.
std::optional<double> comp(Scheme s, Party party, const CostParams& p);
double localization_probability(Scheme s, const CostParams& p);
std::string_view security_level(Scheme s) noexcept;

struct BitsPerItemRow {
  unsigned beta = 0;
  double epsilon = 0;
  double bits_per_item = 0;
  double bloom_bits = 0;
};
std::vector<BitsPerItemRow> bits_per_item_curve(const std::vector<unsigned>& betas, const std::vector<double>& epsilons,
                                                double alpha);

// CSV emitters. Each output starts with '#' metadata lines recording every
// parameter and default used, followed by a header row.
std::string fig3_csv(const std::vector<unsigned>& betas, const std::vector<double>& epsilons, double alpha);
std::string fig4_csv(const std::vector<double>& ms, const CostParams& base);
std::string fig5_csv(Party party, const std::vector<double>& ms, const CostParams& base);
std::string fig6_csv(const std::vector<double>& rhos, const CostParams& base);
std::string table2_csv(const CostParams& p);

}  // namespace wsprivdb::cost
