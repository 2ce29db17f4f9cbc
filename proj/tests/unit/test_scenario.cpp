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
#include "wsprivdb/scenario.hpp"

using namespace wsprivdb;

TEST_CASE("round trip") {
  Scenario s;
  CHECK(parse_scenario(serialize_scenario(s)) == s);

  s.side = 32;
  s.n_ch = 12;
  s.rho = 0.1234;
  s.seed = 0xffffffffffffffffULL;
  s.epsilon = 1e-8;
  s.beta = 8;
  s.alpha = 0.9;
  s.max_kicks = 7;
  s.protocol = ProtocolKind::kLpdbqs;
  s.leakage = Leakage::kY;
  s.sensing_accuracy = 0.95;
  s.trials = 1000;
  s.ts = 12345;
  s.p_bits = 2048;
  s.d = 0.1;
  const std::string text = serialize_scenario(s);
  CHECK(parse_scenario(text) == s);
  CHECK(serialize_scenario(parse_scenario(text)) == text);
}

TEST_CASE("parsing") {
  const Scenario s = parse_scenario("# comment\n\n  side = 16 \nprotocol=lpdb\nleakage=true\r\n");
  CHECK(s.side == 16);
  CHECK(s.effective_protocol() == ProtocolKind::kLpdbLeakage);
  CHECK(s.leakage_axis() == Axis::kX);
  CHECK(parse_scenario("protocol=lpdbqs\nleakage=x").effective_protocol() == ProtocolKind::kLpdbqs);

  CHECK_THROWS_AS(parse_scenario("side"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("colour=blue"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("rho=abc"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("rho=0.5x"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("side=-1"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("beta=256"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("protocol=pir"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("leakage=z"), ConfigError);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(parse_scenario("rho=1.5"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("rho=-0.1"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("epsilon=0"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("epsilon=1"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("alpha=0"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("trials=0"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("side=0"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("n_ch=0"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("sensing_accuracy=2"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("epsilon=1e-30"), ConfigError);
  CHECK_NOTHROW(parse_scenario("rho=0\nalpha=1"));
}

TEST_CASE("filter config mirrors the scenario") {
  Scenario s;
  s.epsilon = 0.001;
  s.beta = 2;
  s.alpha = 0.5;
  s.max_kicks = 9;
  const FilterConfig c = s.filter_config(77);
  CHECK(c.epsilon == 0.001);
  CHECK(c.beta == 2);
  CHECK(c.alpha == 0.5);
  CHECK(c.max_kicks == 9);
  CHECK(c.hash_seed == 77);
  CHECK(c.sizing == BucketSizing::Exact);
}
