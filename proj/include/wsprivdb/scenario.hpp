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
#include <optional>
#include <stdexcept>
#include <string>

#include "wsprivdb/protocols.hpp"
#include "wsprivdb/spectrum_db.hpp"

namespace wsprivdb {

// Invalid user-supplied configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Leakage : std::uint8_t { kNone, kX, kY };

// One simulation setup. Serialized as line-based key=value text; '#' starts
// a comment line.
struct Scenario {
  std::uint32_t side = 64;
  std::uint16_t n_ch = kDefaultChannels;
  double rho = 0.068;
  std::uint64_t seed = 1;
  double epsilon = 0.01;
  unsigned beta = 4;
  double alpha = 0.95;
  unsigned max_kicks = kDefaultMaxKicks;
  ProtocolKind protocol = ProtocolKind::kLpdb;
  Leakage leakage = Leakage::kNone;
  double sensing_accuracy = 1.0;
  std::uint64_t trials = 10;
  std::uint64_t ts = kDefaultEpochDay;

  // Baseline cost-model inputs; unset ones fall back to plot defaults.
  std::optional<double> p_bits;
  std::optional<double> q_bits;
  std::optional<double> b;
  std::optional<double> n_g;
  std::optional<double> v;
  std::optional<double> d;

  GridSpec grid() const noexcept { return GridSpec{side, n_ch}; }
  // lpdb with a leakage axis runs the leakage variant.
  ProtocolKind effective_protocol() const noexcept;
  Axis leakage_axis() const noexcept { return leakage == Leakage::kY ? Axis::kY : Axis::kX; }
  FilterConfig filter_config(std::uint64_t hash_seed) const;

  void validate() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

// Applies one key=value pair; throws ConfigError for unknown keys or values.
void set_scenario_field(Scenario& s, const std::string& key, const std::string& value);

}  // namespace wsprivdb
