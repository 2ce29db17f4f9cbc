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

#include "wsprivdb/scenario.hpp"

#include <charconv>
#include <limits>
#include <sstream>

namespace wsprivdb {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("invalid number for " + key + ": '" + value + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value, std::uint64_t max) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || out > max) {
    throw ConfigError("invalid integer for " + key + ": '" + value + "'");
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string_view to_string(Leakage l) {
  switch (l) {
    case Leakage::kNone: return "none";
    case Leakage::kX: return "x";
    case Leakage::kY: return "y";
  }
  return "none";
}

}  // namespace

ProtocolKind Scenario::effective_protocol() const noexcept {
  if (protocol == ProtocolKind::kLpdb && leakage != Leakage::kNone) return ProtocolKind::kLpdbLeakage;
  return protocol;
}

FilterConfig Scenario::filter_config(std::uint64_t hash_seed) const {
  FilterConfig c;
  c.epsilon = epsilon;
  c.beta = beta;
  c.alpha = alpha;
  c.max_kicks = max_kicks;
  c.hash_seed = hash_seed;
  return c;
}

void Scenario::validate() const {
  if (side < 1 || side > 46340) throw ConfigError("side must lie in [1, 46340]");
  if (n_ch < 1) throw ConfigError("n_ch must be at least 1");
  if (!(rho >= 0 && rho <= 1)) throw ConfigError("rho must lie in [0, 1]");
  if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("epsilon must lie in (0, 1)");
  if (beta < 1 || beta > 255) throw ConfigError("beta must lie in [1, 255]");
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(sensing_accuracy >= 0 && sensing_accuracy <= 1)) throw ConfigError("sensing_accuracy must lie in [0, 1]");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  try {
    (void)fingerprint_bits_for(epsilon, beta);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

void set_scenario_field(Scenario& s, const std::string& key, const std::string& value) {
  constexpr auto u64max = std::numeric_limits<std::uint64_t>::max();
  if (key == "side") {
    s.side = static_cast<std::uint32_t>(parse_uint(key, value, 46340));
  } else if (key == "n_ch") {
    s.n_ch = static_cast<std::uint16_t>(parse_uint(key, value, 65535));
  } else if (key == "rho") {
    s.rho = parse_double(key, value);
  } else if (key == "seed") {
    s.seed = parse_uint(key, value, u64max);
  } else if (key == "epsilon") {
    s.epsilon = parse_double(key, value);
  } else if (key == "beta") {
    s.beta = static_cast<unsigned>(parse_uint(key, value, 255));
  } else if (key == "alpha") {
    s.alpha = parse_double(key, value);
  } else if (key == "max_kicks") {
    s.max_kicks = static_cast<unsigned>(parse_uint(key, value, 1u << 30));
  } else if (key == "protocol") {
    const auto p = parse_protocol(value);
    if (!p) throw ConfigError("unknown protocol '" + value + "' (expected lpdb, lpdb-leak or lpdbqs)");
    s.protocol = *p;
  } else if (key == "leakage") {
    if (value == "none" || value == "false" || value == "0") {
      s.leakage = Leakage::kNone;
    } else if (value == "x" || value == "true" || value == "1") {
      s.leakage = Leakage::kX;
    } else if (value == "y") {
      s.leakage = Leakage::kY;
    } else {
      throw ConfigError("leakage must be none, x or y");
    }
  } else if (key == "sensing_accuracy") {
    s.sensing_accuracy = parse_double(key, value);
  } else if (key == "trials") {
    s.trials = parse_uint(key, value, u64max);
  } else if (key == "ts") {
    s.ts = parse_uint(key, value, u64max);
  } else if (key == "p_bits") {
    s.p_bits = parse_double(key, value);
  } else if (key == "q_bits") {
    s.q_bits = parse_double(key, value);
  } else if (key == "b") {
    s.b = parse_double(key, value);
  } else if (key == "n_g") {
    s.n_g = parse_double(key, value);
  } else if (key == "v") {
    s.v = parse_double(key, value);
  } else if (key == "d") {
    s.d = parse_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    set_scenario_field(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  s.validate();
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "side=" << s.side << '\n'
      << "n_ch=" << s.n_ch << '\n'
      << "rho=" << num(s.rho) << '\n'
      << "seed=" << s.seed << '\n'
      << "epsilon=" << num(s.epsilon) << '\n'
      << "beta=" << s.beta << '\n'
      << "alpha=" << num(s.alpha) << '\n'
      << "max_kicks=" << s.max_kicks << '\n'
      << "protocol=" << to_string(s.protocol) << '\n'
      << "leakage=" << to_string(s.leakage) << '\n'
      << "sensing_accuracy=" << num(s.sensing_accuracy) << '\n'
      << "trials=" << s.trials << '\n'
      << "ts=" << s.ts << '\n';
  const std::pair<const char*, const std::optional<double>*> extras[] = {
      {"p_bits", &s.p_bits}, {"q_bits", &s.q_bits}, {"b", &s.b}, {"n_g", &s.n_g}, {"v", &s.v}, {"d", &s.d}};
  for (const auto& [key, value] : extras) {
    if (*value) out << key << '=' << num(**value) << '\n';
  }
  return out.str();
}

}  // namespace wsprivdb
