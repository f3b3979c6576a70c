// Copyright 2026 The isingsat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment orchestration: instance sets, factorial sweeps with resumable
// append-only storage, aggregation and runtime accounting.
//
// Results directory layout:
//   runs.jsonl        one RunRecord per repeat, deterministic
//   timings.jsonl     wall-clock times keyed like runs.jsonl
//   aggregates.csv    solved-% and TTS per (family, level, strategy, backend)
//   plotdata/*.csv    plot-ready tables

#ifndef ISINGSAT_HARNESS_HPP
#define ISINGSAT_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "isingsat/backbone.hpp"
#include "isingsat/circuit.hpp"
#include "isingsat/cnf.hpp"
#include "isingsat/decompose.hpp"
#include "isingsat/preprocess.hpp"
#include "isingsat/run_record.hpp"
#include "isingsat/solver.hpp"

namespace isingsat {

inline constexpr const char* kResultsDirEnv = "ISINGSAT_RESULTS_DIR";

/// CLI value if given, else $ISINGSAT_RESULTS_DIR, else "results".
inline std::filesystem::path results_dir(const std::optional<std::string>& cli = std::nullopt) {
  if (cli && !cli->empty()) return *cli;
  if (const char* env = std::getenv(kResultsDirEnv); env && *env) return env;
  return "results";
}

// ---------------------------------------------------------------------------
// Seeds

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable seed from a base seed and a textual cell description.
inline std::uint64_t derive_seed(std::uint64_t base, const std::string& tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(base) ^ h);
}

// ---------------------------------------------------------------------------
// Instances

struct Instance {
  std::string id;
  std::string family;
  int bits = 0;
  Cnf cnf;
};

inline std::vector<Instance> semiprime_instances(int bits, int limit = 0, const EncodeOptions& opts = {}) {
  std::vector<Instance> out;
  for (const auto& e : semiprime_catalog(bits)) {
    if (limit > 0 && static_cast<int>(out.size()) >= limit) break;
    Cnf cnf = generate_semiprime_instance(bits, e.semiprime, opts);
    out.push_back({cnf.provenance, "semiprime-" + std::to_string(bits), bits, std::move(cnf)});
  }
  return out;
}

inline Instance load_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  Instance inst;
  inst.cnf = parse_dimacs(in);
  inst.id = inst.cnf.provenance.empty() ? path.stem().string() : inst.cnf.provenance;
  // generated semiprime files keep their family so they aggregate with in-memory ones
  int bits = 0;
  if (std::sscanf(inst.id.c_str(), "semiprime-%dbit-", &bits) == 1 && bits > 0) {
    inst.bits = bits;
    inst.family = "semiprime-" + std::to_string(bits);
  } else {
    const std::string dir = path.parent_path().filename().string();
    inst.family = dir.empty() ? "file" : "file-" + dir;
  }
  return inst;
}

inline std::vector<Instance> backbone_instances(const BackboneSpec& spec, int count, std::uint64_t seed,
                                                bool force = false) {
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    auto bi = generate_backbone_instance(spec, derive_seed(seed, "backbone#" + std::to_string(i)), force);
    Instance inst;
    inst.id = "backbone-n" + std::to_string(spec.n) + "-m" + std::to_string(spec.m) + "-b" +
              std::to_string(spec.backbone_percent) + "-i" + std::to_string(i);
    inst.family = "backbone-n" + std::to_string(spec.n) + "-m" + std::to_string(spec.m) + "-b" +
                  std::to_string(spec.backbone_percent);
    inst.cnf = std::move(bi.cnf);
    inst.cnf.provenance = inst.id;
    out.push_back(std::move(inst));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

/// Sweep configuration. JSON schema (all keys but "instances" optional):
///   instances: [ {"kind": "semiprime", "bits": [8, 10], "limit": 0},
///                {"kind": "file", "paths": ["a.cnf"]},
///                {"kind": "backbone", "n": 100, "m": [429], "b": [10, 90],
///                 "count": 5, "seed": 1, "force": false} ]
///   levels [7], strategies ["dfs"], backends ["emulator"], repeats 20,
///   cap 5000, budget 45, seed 1, per_call_budget_ms 5, filter_window 5,
///   stop_after_success false, record_per_iteration false, threads 0,
///   reroll_closed_branch false,
///   schedule {t_initial, t_final, sweeps}, tabu {tenure, max_iterations,
///   stall_limit, time_budget_ms}
struct ExperimentConfig {
  nlohmann::json instances = nlohmann::json::array();
  std::vector<int> levels{kMaxLevel};
  std::vector<Strategy> strategies{Strategy::Dfs};
  std::vector<Backend> backends{Backend::Emulator};
  int repeats = 20;
  int cap = 5000;
  int budget = 45;
  std::uint64_t seed = 1;
  double per_call_budget_ms = 5.0;
  int filter_window = 5;
  bool stop_after_success = false;
  bool record_per_iteration = false;
  /// On a closed branch, retry the same repeat with the opposite guess
  /// instead of counting it as a failed repeat.
  bool reroll_closed_branch = false;
  unsigned threads = 0;
  AnnealSchedule schedule;
  TabuParams tabu;
};

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  if (!j.contains("instances") || !j["instances"].is_array() || j["instances"].empty())
    throw std::invalid_argument("config: 'instances' must be a non-empty array");
  c.instances = j["instances"];
  if (j.contains("levels")) c.levels = j["levels"].get<std::vector<int>>();
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const auto& s : j["strategies"]) c.strategies.push_back(parse_strategy(s.get<std::string>()));
  }
  if (j.contains("backends")) {
    c.backends.clear();
    for (const auto& b : j["backends"]) c.backends.push_back(parse_backend(b.get<std::string>()));
  }
  c.repeats = j.value("repeats", c.repeats);
  c.cap = j.value("cap", c.cap);
  c.budget = j.value("budget", c.budget);
  c.seed = j.value("seed", c.seed);
  c.per_call_budget_ms = j.value("per_call_budget_ms", c.per_call_budget_ms);
  c.filter_window = j.value("filter_window", c.filter_window);
  c.stop_after_success = j.value("stop_after_success", c.stop_after_success);
  c.record_per_iteration = j.value("record_per_iteration", c.record_per_iteration);
  c.threads = j.value("threads", c.threads);
  c.reroll_closed_branch = j.value("reroll_closed_branch", c.reroll_closed_branch);
  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    c.schedule.t_initial = s.value("t_initial", c.schedule.t_initial);
    c.schedule.t_final = s.value("t_final", c.schedule.t_final);
    c.schedule.sweeps = s.value("sweeps", c.schedule.sweeps);
  }
  if (j.contains("tabu")) {
    const auto& t = j["tabu"];
    c.tabu.tenure = t.value("tenure", c.tabu.tenure);
    c.tabu.max_iterations = t.value("max_iterations", c.tabu.max_iterations);
    c.tabu.stall_limit = t.value("stall_limit", c.tabu.stall_limit);
    c.tabu.time_budget_ms = t.value("time_budget_ms", c.tabu.time_budget_ms);
  }
  if (c.levels.empty() || c.strategies.empty() || c.backends.empty())
    throw std::invalid_argument("config: levels, strategies and backends must be non-empty");
  for (int l : c.levels)
    if (l < 0 || l > kMaxLevel) throw std::invalid_argument("config: level out of range");
  if (c.repeats < 1 || c.cap < 1 || c.budget < 1) throw std::invalid_argument("config: repeats, cap, budget must be >= 1");
  c.schedule.validate();
  return c;
}

template <typename T>
std::vector<T> as_list(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

inline std::vector<Instance> load_instances(const ExperimentConfig& c) {
  std::vector<Instance> out;
  for (const auto& spec : c.instances) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "semiprime") {
      for (int bits : as_list<int>(spec.at("bits")))
        for (auto& inst : semiprime_instances(bits, spec.value("limit", 0))) out.push_back(std::move(inst));
    } else if (kind == "file") {
      for (const auto& p : as_list<std::string>(spec.at("paths"))) out.push_back(load_instance_file(p));
    } else if (kind == "backbone") {
      const int n = spec.value("n", kCbsVars);
      for (int m : as_list<int>(spec.at("m")))
        for (int b : as_list<int>(spec.at("b"))) {
          BackboneSpec bs;
          bs.n = n;
          bs.m = m;
          bs.backbone_percent = b;
          for (auto& inst : backbone_instances(bs, spec.value("count", 1), spec.value("seed", std::uint64_t{1}),
                                               spec.value("force", false)))
            out.push_back(std::move(inst));
        }
    } else {
      throw std::invalid_argument("config: unknown instance kind '" + kind + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Running cells

struct CellResult {
  RunRecord record;
  TimingRecord timing;
};

inline std::uint64_t ladder_seed(std::uint64_t base, const std::string& instance, int level, int repeat) {
  return derive_seed(base, "ladder|" + instance + "|" + std::to_string(level) + "|" + std::to_string(repeat));
}

inline std::uint64_t solve_seed(std::uint64_t base, const std::string& instance, int level, Strategy s, Backend b,
                                int repeat) {
  return derive_seed(base, "solve|" + instance + "|" + std::to_string(level) + "|" + to_string(s) + "|" +
                               to_string(b) + "|" + std::to_string(repeat));
}

/// One repeat: preprocessing (or the cached ladder for seed-independent
/// levels), the decomposition loop, reconstruction and verification.
inline CellResult run_cell(const Instance& inst, int level, Strategy strategy, Backend backend, int repeat,
                           const ExperimentConfig& c, const LadderResult* cached = nullptr,
                           double cached_preprocess_s = 0.0,
                           std::function<void(int, const SolveResult&)> on_solve = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  CellResult out;
  RunRecord& r = out.record;
  r.instance = inst.id;
  r.family = inst.family;
  r.bits = inst.bits;
  r.strategy = to_string(strategy);
  r.level = level;
  r.backend = to_string(backend);
  r.repeat = repeat;
  r.seed = solve_seed(c.seed, inst.id, level, strategy, backend, repeat);
  r.cap = c.cap;
  r.budget = c.budget;
  r.per_call_budget_ms = c.per_call_budget_ms;

  LadderResult fresh;
  double pre_s = cached_preprocess_s;
  if (!cached) {
    const auto p0 = std::chrono::steady_clock::now();
    fresh = run_ladder(inst.cnf, level, ladder_seed(c.seed, inst.id, level, repeat));
    if (c.reroll_closed_branch && fresh.branch.closed && !fresh.branch.guesses.empty()) {
      LadderOptions flip;
      flip.branch.forced_value = !fresh.branch.guesses.front().value;
      fresh = run_ladder(inst.cnf, level, ladder_seed(c.seed, inst.id, level, repeat), flip);
    }
    pre_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - p0).count();
  }
  const LadderResult& pre = cached ? *cached : fresh;
  r.reduced_vars = count_occurring_vars(pre.cnf);
  r.reduced_clauses = static_cast<int>(pre.cnf.clauses.size());
  r.branch_closed = pre.branch.closed;

  IterateOptions opts;
  opts.strategy = strategy;
  opts.backend = backend;
  opts.chip.spin_budget = c.budget;
  opts.cap = c.cap;
  opts.filter_window = c.filter_window;
  opts.record_per_iteration = c.record_per_iteration;
  opts.schedule = c.schedule;
  opts.tabu = c.tabu;
  opts.on_solve = std::move(on_solve);
  IterateOutcome res = iterate(inst.cnf, pre, r.seed, opts);

  r.solved = res.solved;
  r.verified = res.solved;
  r.iterations_used = res.iterations;
  r.residual_unsat = res.residual_unsat;
  r.best_satisfied = res.best_satisfied;
  r.solver_time_ms = c.per_call_budget_ms * res.iterations;
  r.per_iteration_satisfied = std::move(res.per_iteration_satisfied);

  out.timing.key = r.key();
  out.timing.preprocess_s = pre_s;
  out.timing.solver_wall_s = res.solver_time;
  out.timing.total_wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Runs all repeats of one (instance, level, strategy, backend) group.
/// `done` holds keys already present in the store; with stop_after_success
/// a solved repeat (stored or fresh) ends the group.
inline std::vector<CellResult> run_group(const Instance& inst, int level, Strategy strategy, Backend backend,
                                         const ExperimentConfig& c, const std::set<std::string>& done,
                                         const std::set<std::string>& solved_done) {
  std::vector<CellResult> out;
  std::optional<LadderResult> cached;
  double cached_s = 0.0;
  const bool seed_free = level < static_cast<int>(level_of(PassKind::Branching));
  for (int rep = 0; rep < c.repeats; ++rep) {
    RunRecord probe;
    probe.instance = inst.id;
    probe.level = level;
    probe.strategy = to_string(strategy);
    probe.backend = to_string(backend);
    probe.repeat = rep;
    if (c.stop_after_success && solved_done.count(probe.group_key())) break;
    if (done.count(probe.key())) continue;
    if (seed_free && !cached) {
      const auto p0 = std::chrono::steady_clock::now();
      cached = run_ladder(inst.cnf, level, 0);
      cached_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - p0).count();
    }
    out.push_back(run_cell(inst, level, strategy, backend, rep, c, cached ? &*cached : nullptr, cached_s));
    if (c.stop_after_success && out.back().record.solved) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Store

inline std::vector<RunRecord> read_runs(const std::filesystem::path& file) {
  std::vector<RunRecord> out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(run_record_from_json(nlohmann::json::parse(line)));
  return out;
}

inline std::vector<TimingRecord> read_timings(const std::filesystem::path& file) {
  std::vector<TimingRecord> out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(timing_record_from_json(nlohmann::json::parse(line)));
  return out;
}

inline void append_results(const std::filesystem::path& dir, const std::vector<CellResult>& cells) {
  std::ofstream runs(dir / "runs.jsonl", std::ios::app);
  std::ofstream times(dir / "timings.jsonl", std::ios::app);
  for (const auto& c : cells) {
    runs << to_json(c.record).dump() << '\n';
    times << to_json(c.timing).dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Aggregation

struct Aggregate {
  std::string family;
  int level = 0;
  std::string strategy;
  std::string backend;
  int instances = 0;
  int solved_instances = 0;  ///< instances with at least one solved repeat
  int repeats = 0;
  int solved_repeats = 0;
  TtsEstimate tts;

  double solved_instance_pct() const { return instances ? 100.0 * solved_instances / instances : 0.0; }
  double repeat_success_pct() const { return repeats ? 100.0 * solved_repeats / repeats : 0.0; }
};

inline std::vector<Aggregate> aggregate(const std::vector<RunRecord>& runs) {
  using Key = std::tuple<std::string, int, std::string, std::string>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs) groups[{r.family, r.level, r.strategy, r.backend}].push_back(&r);
  std::vector<Aggregate> out;
  for (const auto& [key, recs] : groups) {
    Aggregate a;
    std::tie(a.family, a.level, a.strategy, a.backend) = key;
    std::map<std::string, bool> per_instance;
    std::vector<RunRecord> copy;
    for (const RunRecord* r : recs) {
      per_instance[r->instance] = per_instance[r->instance] || r->solved;
      ++a.repeats;
      a.solved_repeats += r->solved ? 1 : 0;
      copy.push_back(*r);
    }
    a.instances = static_cast<int>(per_instance.size());
    for (const auto& [id, ok] : per_instance) a.solved_instances += ok ? 1 : 0;
    a.tts = compute_tts(copy);
    out.push_back(std::move(a));
  }
  return out;
}

inline std::string format_tts(double v) {
  if (!std::isfinite(v)) return "inf";
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline void write_aggregates_csv(const std::filesystem::path& file, const std::vector<Aggregate>& aggs) {
  std::ofstream out(file);
  out << "family,level,strategy,backend,instances,solved_instances,solved_instance_pct,repeats,solved_repeats,"
         "repeat_success_pct,mean_iterations_solved,tts\n";
  for (const auto& a : aggs)
    out << a.family << ',' << a.level << ',' << a.strategy << ',' << a.backend << ',' << a.instances << ','
        << a.solved_instances << ',' << a.solved_instance_pct() << ',' << a.repeats << ',' << a.solved_repeats << ','
        << a.repeat_success_pct() << ',' << a.tts.t << ',' << format_tts(a.tts.tts) << '\n';
}

struct RuntimeRow {
  std::string family;
  int level = 0;
  int records = 0;
  double mean_preprocess_ms = 0.0;
  double mean_solver_ms = 0.0;  ///< per-call budget times calls
  double mean_solver_calls = 0.0;
};

/// Preprocessing time against solver time per (family, level).
inline std::vector<RuntimeRow> runtime_report(const std::vector<RunRecord>& runs,
                                              const std::vector<TimingRecord>& timings) {
  std::map<std::string, double> pre;
  for (const auto& t : timings) pre[t.key] = t.preprocess_s;
  std::map<std::pair<std::string, int>, RuntimeRow> rows;
  for (const auto& r : runs) {
    RuntimeRow& row = rows[{r.family, r.level}];
    row.family = r.family;
    row.level = r.level;
    ++row.records;
    row.mean_preprocess_ms += 1e3 * pre[r.key()];
    row.mean_solver_ms += r.solver_time_ms;
    row.mean_solver_calls += r.iterations_used;
  }
  std::vector<RuntimeRow> out;
  for (auto& [k, row] : rows) {
    row.mean_preprocess_ms /= row.records;
    row.mean_solver_ms /= row.records;
    row.mean_solver_calls /= row.records;
    out.push_back(row);
  }
  return out;
}

inline void write_plotdata(const std::filesystem::path& dir, const std::vector<Aggregate>& aggs,
                           const std::vector<RuntimeRow>& runtime) {
  std::filesystem::create_directories(dir);
  std::ofstream solved(dir / "solved_pct.csv");
  solved << "family,level,strategy,backend,solved_instance_pct,repeat_success_pct\n";
  std::ofstream tts(dir / "tts.csv");
  tts << "family,level,strategy,backend,p,t,tts\n";
  for (const auto& a : aggs) {
    solved << a.family << ',' << a.level << ',' << a.strategy << ',' << a.backend << ',' << a.solved_instance_pct()
           << ',' << a.repeat_success_pct() << '\n';
    tts << a.family << ',' << a.level << ',' << a.strategy << ',' << a.backend << ',' << a.tts.p << ',' << a.tts.t
        << ',' << format_tts(a.tts.tts) << '\n';
  }
  std::ofstream rt(dir / "runtime.csv");
  rt << "family,level,records,mean_preprocess_ms,mean_solver_ms,mean_solver_calls\n";
  for (const auto& r : runtime)
    rt << r.family << ',' << r.level << ',' << r.records << ',' << r.mean_preprocess_ms << ',' << r.mean_solver_ms
       << ',' << r.mean_solver_calls << '\n';
}

/// Rebuilds aggregates.csv and plotdata/ from the store.
inline std::vector<Aggregate> write_reports(const std::filesystem::path& dir) {
  auto runs = read_runs(dir / "runs.jsonl");
  auto aggs = aggregate(runs);
  write_aggregates_csv(dir / "aggregates.csv", aggs);
  write_plotdata(dir / "plotdata", aggs, runtime_report(runs, read_timings(dir / "timings.jsonl")));
  return aggs;
}

// ---------------------------------------------------------------------------
// Sweeps

struct ExperimentSummary {
  int groups = 0;
  int cells_run = 0;
  int cells_skipped = 0;
};

/// Full factorial sweep. Cells already in runs.jsonl are skipped, so an
/// interrupted sweep resumes where it stopped and a finished one is left
/// unchanged. Groups run on worker threads; their records are appended in
/// sweep order.
inline ExperimentSummary run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir,
                                        std::ostream* log = nullptr) {
  std::filesystem::create_directories(dir);
  const auto instances = load_instances(c);
  std::set<std::string> done, solved_done;
  for (const auto& r : read_runs(dir / "runs.jsonl")) {
    done.insert(r.key());
    if (r.solved) solved_done.insert(r.group_key());
  }

  struct Group {
    const Instance* inst;
    int level;
    Strategy strategy;
    Backend backend;
  };
  std::vector<Group> groups;
  for (const auto& inst : instances)
    for (int level : c.levels)
      for (Strategy s : c.strategies)
        for (Backend b : c.backends) groups.push_back({&inst, level, s, b});

  ExperimentSummary summary;
  summary.groups = static_cast<int>(groups.size());
  unsigned threads = c.threads ? c.threads : std::max(1U, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < groups.size(); first += threads) {
    const std::size_t last = std::min(groups.size(), first + threads);
    std::vector<std::vector<CellResult>> results(last - first);
    std::vector<std::thread> pool;
    auto work = [&](std::size_t g) {
      const Group& grp = groups[g];
      results[g - first] = run_group(*grp.inst, grp.level, grp.strategy, grp.backend, c, done, solved_done);
    };
    for (std::size_t g = first + 1; g < last; ++g) pool.emplace_back(work, g);
    work(first);
    for (auto& t : pool) t.join();
    for (std::size_t g = first; g < last; ++g) {
      auto& cells = results[g - first];
      summary.cells_run += static_cast<int>(cells.size());
      append_results(dir, cells);
      if (log)
        for (const auto& cell : cells)
          *log << cell.record.key() << (cell.record.solved ? " solved " : " failed ") << cell.record.iterations_used
               << '\n';
    }
  }
  summary.cells_skipped = static_cast<int>(done.size());
  write_reports(dir);
  return summary;
}

}  // namespace isingsat

#endif  // ISINGSAT_HARNESS_HPP
