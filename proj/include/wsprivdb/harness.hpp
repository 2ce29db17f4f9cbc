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
#include <string>
#include <vector>

#include "wsprivdb/cost_model.hpp"
#include "wsprivdb/protocols.hpp"
#include "wsprivdb/scenario.hpp"

namespace wsprivdb::harness {

// Runs scenario.trials independent protocol executions against one seeded
// ground truth. Trial t draws its SU cell and all run seeds from (seed, t),
// so the output does not depend on thread count or scheduling.
std::vector<RunStats> simulate(const Scenario& scenario);
std::vector<RunStats> simulate_serial(const Scenario& scenario);
std::string simulate_csv(const Scenario& scenario);

// One trial, exposed for tests: the SU cell trial t uses.
CellPos trial_position(const Scenario& scenario, std::uint64_t trial);

struct FpRateRow {
  double target_epsilon = 0;
  unsigned fingerprint_bits = 0;
  std::uint64_t members = 0;
  std::uint64_t probes = 0;
  std::uint64_t false_positives = 0;
  double observed_fp_rate = 0;
  double load_factor = 0;
  double bits_per_item_actual = 0;
};

// Builds one filter per epsilon holding n_members random keys, then probes it
// with n_probes keys outside the member set. Refuses (ConfigError) unless
// n_probes >= 10 / epsilon for every epsilon.
std::vector<FpRateRow> fprate(const std::vector<double>& epsilons, unsigned beta, double alpha, std::uint64_t n_members,
                              std::uint64_t n_probes, std::uint64_t seed);
std::string fprate_csv(const std::vector<FpRateRow>& rows);

enum class BenchMode { kLookup, kInsert };

struct ThroughputOptions {
  BenchMode mode = BenchMode::kLookup;
  double filter_size_mb = 112;
  std::vector<double> fp_fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  double duration_s = 1.0;
  int threads = 1;
  unsigned repetitions = 1;
  double epsilon = 0.001;
  unsigned beta = 4;
  std::uint64_t seed = 1;
};

struct BenchResult {
  std::string metric;  // lookup_mops or insert_mops
  double x = 0;        // f_p or alpha
  double value = 0;    // million operations per second
  unsigned repetition = 0;
  std::uint64_t ops = 0;
  int threads = 1;
  std::string machine;
};

std::string machine_fingerprint();
// Throws std::bad_alloc-derived errors as ConfigError with a clear message.
std::vector<BenchResult> throughput(const ThroughputOptions& options);
std::string throughput_csv(const std::vector<BenchResult>& results);

struct CostModelSweep {
  std::vector<double> ms = {1e3, 1e4, 1e5, 1e6, 1e7};
  std::vector<double> rhos = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.068};
  std::vector<unsigned> betas = {2, 4, 8};
  std::vector<double> epsilons = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  double k = 5;
  double r = 10;
};

// figure_id is one of fig3, fig4, fig5a, fig5b, fig6, table2.
std::string costmodel_csv(const std::string& figure_id, const CostModelSweep& sweep, const cost::CostParams& base);

}  // namespace wsprivdb::harness
