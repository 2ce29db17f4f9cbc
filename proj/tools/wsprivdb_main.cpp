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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsprivdb/cuckoo_filter.hpp"
#include "wsprivdb/harness.hpp"
#include "wsprivdb/scenario.hpp"
#include "wsprivdb/spectrum_db.hpp"

namespace {

using namespace wsprivdb;

constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;

// Scenario flags are kept as strings and applied through the config parser,
// so flag values and config-file values go through the same validation.
struct ScenarioFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  void add_all(CLI::App* app) {
    app->add_option("--config", config_path, "key=value scenario file; flags override it");
    add(app, "--side", "side", "grid side length (m = side^2 cells)");
    add(app, "--n-ch", "n_ch", "number of channels");
    add(app, "--rho", "rho", "fraction of available rows");
    add(app, "--epsilon", "epsilon", "target filter false-positive rate");
    add(app, "--beta", "beta", "entries per bucket");
    add(app, "--alpha", "alpha", "filter load factor");
    add(app, "--max-kicks", "max_kicks", "relocations per insert");
    add(app, "--protocol", "protocol", "lpdb | lpdb-leak | lpdbqs");
    add(app, "--leakage", "leakage", "revealed coordinate for lpdb: none | x | y");
    add(app, "--sensing-accuracy", "sensing_accuracy", "probability that sensing reports the truth");
    add(app, "--trials", "trials", "independent protocol runs");
    add(app, "--seed", "seed", "rng seed (WS_PRIVDB_SEED overrides)");
    add(app, "--ts", "ts", "timestamp (days since epoch)");
  }

  Scenario build() const {
    Scenario s;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      s = parse_scenario(text.str());
    }
    for (const auto& [key, value] : values) set_scenario_field(s, key, value);
    if (const char* env = std::getenv("WS_PRIVDB_SEED"); env != nullptr && *env != '\0') {
      set_scenario_field(s, "seed", env);
    }
    s.validate();
    return s;
  }
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + out_path + "'");
  out << text;
  if (!out) throw ConfigError("write to '" + out_path + "' failed");
}

std::uint64_t seed_with_env(std::uint64_t seed) {
  if (const char* env = std::getenv("WS_PRIVDB_SEED"); env != nullptr && *env != '\0') {
    Scenario s;
    set_scenario_field(s, "seed", env);
    return s.seed;
  }
  return seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location-private spectrum database queries over cuckoo filters"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "write CSV here instead of stdout");

  // simulate
  ScenarioFlags sim_flags;
  CLI::App* sim = app.add_subcommand("simulate", "run seeded protocol trials and print per-trial stats");
  sim_flags.add_all(sim);
  sim->add_option("--out", out_path, "write CSV here instead of stdout");

  // fprate
  std::vector<double> fp_eps = {0.05, 0.01, 0.001};
  unsigned fp_beta = 4;
  double fp_alpha = 0.95;
  std::uint64_t fp_members = 100000;
  std::uint64_t fp_probes = 1000000;
  std::uint64_t fp_seed = 1;
  CLI::App* fpr = app.add_subcommand("fprate", "measure observed false-positive rates");
  fpr->add_option("--epsilon", fp_eps, "target rates")->delimiter(',');
  fpr->add_option("--beta", fp_beta, "entries per bucket");
  fpr->add_option("--alpha", fp_alpha, "load factor");
  fpr->add_option("--members", fp_members, "items inserted");
  fpr->add_option("--probes", fp_probes, "non-member probes per rate");
  fpr->add_option("--seed", fp_seed, "rng seed (WS_PRIVDB_SEED overrides)");
  fpr->add_option("--out", out_path, "write CSV here instead of stdout");

  // throughput
  harness::ThroughputOptions tp;
  std::string tp_mode = "lookup";
  CLI::App* thr = app.add_subcommand("throughput", "lookup or insert throughput in MOPS");
  thr->add_option("mode", tp_mode, "lookup | insert")->check(CLI::IsMember({"lookup", "insert"}));
  thr->add_option("--filter-size-mb", tp.filter_size_mb, "filter size in MB");
  thr->add_option("--fp", tp.fp_fractions, "positive-query fractions (lookup)")->delimiter(',');
  thr->add_option("--alphas", tp.alphas, "fill targets (insert)")->delimiter(',');
  thr->add_option("--duration", tp.duration_s, "seconds per point");
  thr->add_option("--threads", tp.threads, "reader threads (lookup)");
  thr->add_option("--repetitions", tp.repetitions, "repetitions of the sweep");
  thr->add_option("--epsilon", tp.epsilon, "target false-positive rate");
  thr->add_option("--beta", tp.beta, "entries per bucket");
  thr->add_option("--seed", tp.seed, "rng seed (WS_PRIVDB_SEED overrides)");
  thr->add_option("--out", out_path, "write CSV here instead of stdout");

  // costmodel
  std::string figure_id;
  harness::CostModelSweep sweep;
  cost::CostParams base;
  CLI::App* cm = app.add_subcommand("costmodel", "evaluate the closed-form cost model");
  cm->add_option("figure", figure_id, "fig3 | fig4 | fig5a | fig5b | fig6 | table2")->required();
  cm->add_option("--m", base.m, "number of grid cells");
  cm->add_option("--n-ch", base.n_ch, "number of channels");
  cm->add_option("--rho", base.rho, "fraction of available rows");
  cm->add_option("--epsilon", base.epsilon, "target false-positive rate");
  cm->add_option("--beta", base.beta, "entries per bucket");
  cm->add_option("--alpha", base.alpha, "load factor");
  cm->add_option("--ms", sweep.ms, "m sweep")->delimiter(',');
  cm->add_option("--rhos", sweep.rhos, "rho sweep")->delimiter(',');
  cm->add_option("--betas", sweep.betas, "beta sweep (fig3)")->delimiter(',');
  cm->add_option("--epsilons", sweep.epsilons, "epsilon sweep (fig3)")->delimiter(',');
  cm->add_option("--k", sweep.k, "k-anonymity set size (table2)");
  cm->add_option("--r", sweep.r, "geo-indistinguishability radius in cells (table2)");
  cm->add_option("--out", out_path, "write CSV here instead of stdout");

  // groundtruth
  CLI::App* gt = app.add_subcommand("groundtruth", "dump or load a ground-truth table");
  gt->require_subcommand(1);
  ScenarioFlags dump_flags;
  CLI::App* gt_dump = gt->add_subcommand("dump", "generate a seeded ground truth and write it as CSV");
  dump_flags.add_all(gt_dump);
  gt_dump->add_option("--out", out_path, "write CSV here instead of stdout");
  std::string load_path;
  CLI::App* gt_load = gt->add_subcommand("load", "validate a ground-truth CSV and print a summary");
  gt_load->add_option("file", load_path, "CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      emit(harness::simulate_csv(sim_flags.build()), out_path);
    } else if (fpr->parsed()) {
      const auto rows = harness::fprate(fp_eps, fp_beta, fp_alpha, fp_members, fp_probes, seed_with_env(fp_seed));
      emit(harness::fprate_csv(rows), out_path);
    } else if (thr->parsed()) {
      tp.mode = tp_mode == "insert" ? harness::BenchMode::kInsert : harness::BenchMode::kLookup;
      tp.seed = seed_with_env(tp.seed);
      emit(harness::throughput_csv(harness::throughput(tp)), out_path);
    } else if (cm->parsed()) {
      emit(harness::costmodel_csv(figure_id, sweep, base), out_path);
    } else if (gt_dump->parsed()) {
      const Scenario s = dump_flags.build();
      const SpectrumDb db = generate_ground_truth(s.grid(), s.rho, s.seed, s.ts);
      std::ostringstream csv;
      dump_csv(db, csv);
      emit(csv.str(), out_path);
    } else if (gt_load->parsed()) {
      std::ifstream in(load_path);
      if (!in) throw ConfigError("cannot read '" + load_path + "'");
      const SpectrumDb db = load_csv(in);
      std::ostringstream summary;
      summary << "side=" << db.grid().side << " n_ch=" << db.grid().n_ch << " ts=" << db.ts()
              << " available=" << db.available_count() << " rho=" << db.realized_rho() << '\n';
      emit(summary.str(), out_path);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidRange& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
