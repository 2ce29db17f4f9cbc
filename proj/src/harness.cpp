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

#include "wsprivdb/harness.hpp"

#include <omp.h>
#include <sys/utsname.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "wsprivdb/hash.hpp"
#include "wsprivdb/kernels.hpp"

namespace wsprivdb::harness {
namespace {

constexpr std::uint64_t kCellTag = 0x63656c6c00000000ULL;
constexpr std::uint64_t kSenseTag = 0x73656e7365000000ULL;
constexpr std::uint64_t kFilterTag = 0x66696c7465720000ULL;
constexpr std::uint64_t kKeyTag = 0x6b65790000000000ULL;
constexpr std::uint64_t kProbeTag = 0x70726f6265000000ULL;
constexpr std::uint64_t kQueryTag = 0x7175657279000000ULL;

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

RunStats run_trial(const SpectrumDb& db, const Scenario& s, std::uint64_t t) {
  const CellPos pos = trial_position(s, t);
  SensingOracle sensing(db, s.sensing_accuracy, counter_random(s.seed ^ kSenseTag, t));
  const FilterConfig config = s.filter_config(counter_random(s.seed ^ kFilterTag, t));
  const DeviceCharacteristics chr = DeviceCharacteristics::full_range(db.grid());
  switch (s.effective_protocol()) {
    case ProtocolKind::kLpdb: return run_lpdb(db, pos, chr, s.ts, config, sensing).stats;
    case ProtocolKind::kLpdbLeakage:
      return run_lpdb_leakage(db, pos, chr, s.ts, s.leakage_axis(), config, sensing).stats;
    case ProtocolKind::kLpdbqs: {
      DeterministicKeySource keys(counter_random(s.seed ^ kKeyTag, t));
      return run_lpdbqs(db, pos, chr, s.ts, keys, config, sensing).stats;
    }
  }
  throw std::logic_error("unhandled protocol");
}

SpectrumDb scenario_ground_truth(const Scenario& s) {
  s.validate();
  return generate_ground_truth(s.grid(), s.rho, s.seed, s.ts);
}

}  // namespace

CellPos trial_position(const Scenario& scenario, std::uint64_t trial) {
  SplitMix64 rng(counter_random(scenario.seed ^ kCellTag, trial));
  const auto lx = static_cast<std::uint32_t>(rng.below(scenario.side));
  const auto ly = static_cast<std::uint32_t>(rng.below(scenario.side));
  return {lx, ly};
}

std::vector<RunStats> simulate(const Scenario& scenario) {
  const SpectrumDb db = scenario_ground_truth(scenario);
  std::vector<RunStats> out(scenario.trials);
  std::vector<std::exception_ptr> errors(scenario.trials);
  const auto n = static_cast<std::int64_t>(scenario.trials);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    try {
      out[i] = run_trial(db, scenario, i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<RunStats> simulate_serial(const Scenario& scenario) {
  const SpectrumDb db = scenario_ground_truth(scenario);
  std::vector<RunStats> out;
  out.reserve(scenario.trials);
  for (std::uint64_t t = 0; t < scenario.trials; ++t) out.push_back(run_trial(db, scenario, t));
  return out;
}

std::string simulate_csv(const Scenario& scenario) {
  std::string out = run_stats_csv_header() + '\n';
  for (const RunStats& s : simulate(scenario)) out += to_csv_row(s) + '\n';
  return out;
}

std::vector<FpRateRow> fprate(const std::vector<double>& epsilons, unsigned beta, double alpha, std::uint64_t n_members,
                              std::uint64_t n_probes, std::uint64_t seed) {
  if (epsilons.empty()) throw ConfigError("no epsilon values given");
  if (n_members < 1) throw ConfigError("n_members must be at least 1");
  for (double eps : epsilons) {
    if (!(eps > 0 && eps < 1)) throw ConfigError("epsilon must lie in (0, 1)");
    if (static_cast<double>(n_probes) < 10.0 / eps) {
      throw ConfigError("n_probes=" + std::to_string(n_probes) + " is below 10/epsilon=" + num(std::ceil(10.0 / eps)) +
                        " for epsilon=" + num(eps) + "; the estimate would be meaningless");
    }
  }

  std::vector<std::uint64_t> members(n_members);
  for (std::uint64_t i = 0; i < n_members; ++i) members[i] = counter_random(seed, i);
  const std::unordered_set<std::uint64_t> member_set(members.begin(), members.end());
  std::vector<std::uint64_t> probes;
  probes.reserve(n_probes);
  for (std::uint64_t j = 0; probes.size() < n_probes; ++j) {
    const std::uint64_t k = counter_random(seed ^ kProbeTag, j);
    if (!member_set.contains(k)) probes.push_back(k);
  }

  std::vector<FpRateRow> rows;
  for (double eps : epsilons) {
    FilterParams params;
    try {
      params = derive_params(eps, beta, alpha, n_members, BucketSizing::Exact);
    } catch (const InvalidRange& e) {
      throw ConfigError(e.what());
    }
    CuckooFilter filter(params, mix64(seed ^ kFilterTag));
    const std::uint64_t inserted = kernels::insert_keys(filter, members);
    if (inserted != n_members) {
      throw CapacityError("filter for epsilon=" + num(eps) + " filled after " + std::to_string(inserted) + " of " +
                          std::to_string(n_members) + " members");
    }
    FpRateRow row;
    row.target_epsilon = eps;
    row.fingerprint_bits = params.fingerprint_bits;
    row.members = n_members;
    row.probes = n_probes;
    row.false_positives = kernels::count_hits_parallel(filter, probes);
    row.observed_fp_rate = static_cast<double>(row.false_positives) / static_cast<double>(n_probes);
    row.load_factor = filter.load_factor();
    row.bits_per_item_actual = 8.0 * static_cast<double>(filter.serialized_size()) / static_cast<double>(n_members);
    rows.push_back(row);
  }
  return rows;
}

std::string fprate_csv(const std::vector<FpRateRow>& rows) {
  std::ostringstream out;
  out << "target_eps,observed_fp_rate,bits_per_item_actual,fingerprint_bits,load_factor,members,probes,false_positives\n";
  for (const FpRateRow& r : rows) {
    out << num(r.target_epsilon) << ',' << num(r.observed_fp_rate) << ',' << num(r.bits_per_item_actual) << ','
        << r.fingerprint_bits << ',' << num(r.load_factor) << ',' << r.members << ',' << r.probes << ','
        << r.false_positives << '\n';
  }
  return out.str();
}

std::string machine_fingerprint() {
  std::ostringstream out;
  utsname u{};
  if (uname(&u) == 0) out << u.sysname << '-' << u.release << '-' << u.machine;
  out << "/hw_threads=" << std::thread::hardware_concurrency();
#if defined(__clang__)
  out << "/clang-" << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  out << "/gcc-" << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
  return out.str();
}

namespace {

using Clock = std::chrono::steady_clock;

volatile std::uint64_t g_hit_sink = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

FilterParams bench_params(const ThroughputOptions& o) {
  if (!(o.filter_size_mb > 0)) throw ConfigError("filter size must be positive");
  FilterParams p;
  p.epsilon = o.epsilon;
  p.beta = o.beta;
  p.alpha = 1.0;
  p.fingerprint_bits = fingerprint_bits_for(o.epsilon, o.beta);
  const double bits = o.filter_size_mb * 1e6 * 8.0;
  p.bucket_count = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(bits / (p.fingerprint_bits * p.beta)));
  p.capacity_items = p.slot_count();
  return p;
}

// One pass over the query array, split across threads. Returns seconds.
double lookup_pass(const CuckooFilter& filter, const std::vector<std::uint64_t>& queries, int threads) {
  std::uint64_t sink = 0;
  const auto start = Clock::now();
#pragma omp parallel num_threads(threads) reduction(+ : sink)
  {
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    const auto nth = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t begin = queries.size() * tid / nth;
    const std::size_t end = queries.size() * (tid + 1) / nth;
    std::array<std::uint8_t, 8> buf;
    std::uint64_t hits = 0;
    for (std::size_t i = begin; i < end; ++i) {
      std::memcpy(buf.data(), &queries[i], 8);
      if (filter.contains(buf)) ++hits;
    }
    sink += hits;
  }
  const double elapsed = seconds_since(start);
  g_hit_sink = sink;
  return elapsed;
}

std::vector<BenchResult> lookup_bench(const ThroughputOptions& o, const std::string& machine) {
  for (double fp : o.fp_fractions) {
    if (!(fp >= 0 && fp <= 1)) throw ConfigError("positive fraction must lie in [0, 1]");
  }
  const FilterParams params = bench_params(o);
  CuckooFilter filter(params, mix64(o.seed ^ kFilterTag));
  const auto target = static_cast<std::uint64_t>(0.95 * static_cast<double>(params.slot_count()));
  std::vector<std::uint64_t> members;
  members.reserve(target);
  std::array<std::uint8_t, 8> buf;
  for (std::uint64_t i = 0; members.size() < target; ++i) {
    const std::uint64_t k = counter_random(o.seed, i);
    std::memcpy(buf.data(), &k, 8);
    if (filter.insert(buf) == InsertOutcome::Full) break;
    members.push_back(k);
  }

  const std::size_t q = std::clamp<std::size_t>(params.slot_count(), std::size_t{1} << 14, std::size_t{1} << 20);
  std::vector<std::vector<std::uint64_t>> query_sets;
  for (std::size_t j = 0; j < o.fp_fractions.size(); ++j) {
    const double fp = o.fp_fractions[j];
    SplitMix64 rng(counter_random(o.seed ^ kQueryTag, j));
    const auto positives = static_cast<std::size_t>(std::llround(fp * static_cast<double>(q)));
    std::vector<std::uint64_t> queries;
    queries.reserve(q);
    for (std::size_t i = 0; i < positives; ++i) queries.push_back(members[rng.below(members.size())]);
    // Fresh draws from an unrelated stream; a collision with a member is a
    // 2^-64 event per key.
    while (queries.size() < q) queries.push_back(rng() ^ kProbeTag);
    std::shuffle(queries.begin(), queries.end(), rng);
    query_sets.push_back(std::move(queries));
  }

  // Points are measured in interleaved passes so drift in machine load hits
  // every f_p alike.
  std::vector<BenchResult> out;
  for (unsigned rep = 0; rep < o.repetitions; ++rep) {
    std::vector<double> seconds(query_sets.size(), 0.0);
    std::vector<std::uint64_t> ops(query_sets.size(), 0);
    while (*std::min_element(seconds.begin(), seconds.end()) < o.duration_s) {
      for (std::size_t j = 0; j < query_sets.size(); ++j) {
        seconds[j] += lookup_pass(filter, query_sets[j], o.threads);
        ops[j] += query_sets[j].size();
      }
    }
    for (std::size_t j = 0; j < query_sets.size(); ++j) {
      out.push_back({"lookup_mops", o.fp_fractions[j], static_cast<double>(ops[j]) / seconds[j] / 1e6, rep, ops[j],
                     o.threads, machine});
    }
  }
  return out;
}

std::vector<BenchResult> insert_bench(const ThroughputOptions& o, const std::string& machine) {
  const FilterParams params = bench_params(o);
  std::vector<BenchResult> out;
  for (unsigned rep = 0; rep < o.repetitions; ++rep) {
    for (double alpha : o.alphas) {
      if (!(alpha > 0 && alpha <= 1)) throw ConfigError("load factor must lie in (0, 1]");
      const auto target = static_cast<std::uint64_t>(alpha * static_cast<double>(params.slot_count()));
      std::uint64_t ops = 0;
      double elapsed = 0;
      std::uint64_t fill = 0;
      std::array<std::uint8_t, 8> buf;
      do {
        CuckooFilter filter(params, mix64(o.seed ^ kFilterTag ^ (fill + 1)));
        const std::uint64_t base = (rep * 1000003ULL + fill) << 32;
        const auto start = Clock::now();
        std::uint64_t i = 0;
        for (; i < target; ++i) {
          const std::uint64_t k = counter_random(o.seed, base + i);
          std::memcpy(buf.data(), &k, 8);
          if (filter.insert(buf) == InsertOutcome::Full) break;
        }
        elapsed += seconds_since(start);
        ops += i;
        ++fill;
      } while (elapsed < o.duration_s);
      out.push_back({"insert_mops", alpha, static_cast<double>(ops) / elapsed / 1e6, rep, ops, 1, machine});
    }
  }
  return out;
}

}  // namespace

std::vector<BenchResult> throughput(const ThroughputOptions& options) {
  if (options.threads < 1) throw ConfigError("threads must be at least 1");
  if (options.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (!(options.duration_s > 0)) throw ConfigError("duration must be positive");
  const std::string machine = machine_fingerprint();
  try {
    return options.mode == BenchMode::kLookup ? lookup_bench(options, machine) : insert_bench(options, machine);
  } catch (const std::bad_alloc&) {
    throw ConfigError("could not allocate a " + num(options.filter_size_mb) + " MB filter and its key set");
  }
}

std::string throughput_csv(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << "metric,x,value,repetition,ops,threads,machine\n";
  for (const BenchResult& r : results) {
    out << r.metric << ',' << num(r.x) << ',' << num(r.value) << ',' << r.repetition << ',' << r.ops << ','
        << r.threads << ',' << r.machine << '\n';
  }
  return out.str();
}

std::string costmodel_csv(const std::string& figure_id, const CostModelSweep& sweep, const cost::CostParams& base) {
  try {
    if (figure_id == "fig3") return cost::fig3_csv(sweep.betas, sweep.epsilons, base.alpha);
    if (figure_id == "fig4") return cost::fig4_csv(sweep.ms, base);
    if (figure_id == "fig5a") return cost::fig5_csv(cost::Party::kDb, sweep.ms, base);
    if (figure_id == "fig5b") return cost::fig5_csv(cost::Party::kSu, sweep.ms, base);
    if (figure_id == "fig6") return cost::fig6_csv(sweep.rhos, base);
    if (figure_id == "table2") {
      cost::CostParams p = base;
      p.k = sweep.k;
      p.r = sweep.r;
      return cost::table2_csv(p);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown figure id '" + figure_id + "' (expected fig3, fig4, fig5a, fig5b, fig6 or table2)");
}

}  // namespace wsprivdb::harness
