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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "isingsat/harness.hpp"
#include "oracle.hpp"

using namespace isingsat;
namespace fs = std::filesystem;

namespace {

RunRecord rec(bool solved, int iterations) {
  RunRecord r;
  r.instance = "x";
  r.solved = solved;
  r.verified = solved;
  r.iterations_used = iterations;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("isingsat-test-" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig small_config() {
  return parse_config(nlohmann::json::parse(R"({
    "instances": [{"kind": "semiprime", "bits": [6], "limit": 2}],
    "levels": [0, 5, 7], "strategies": ["bfs", "dfs"], "repeats": 2, "cap": 200,
    "threads": 3, "seed": 9
  })"));
}

}  // namespace

TEST_CASE("TTS closed form against the definition") {
  const std::vector<std::pair<double, double>> table{{1.0, 7.0},  {0.5, 10.0}, {0.05, 3.0}, {0.95, 4.0},
                                                     {0.9, 2.5},  {0.2, 1.0},  {0.01, 100.0}, {0.7, 12.0},
                                                     {0.3, 0.5},  {0.999, 9.0}};
  for (auto [p, t] : table) CHECK(tts_closed_form(p, t) == Catch::Approx(oracle::tts(p, t)).epsilon(1e-12));
  CHECK(std::isinf(tts_closed_form(0.0, 5.0)));
  CHECK_THROWS(tts_closed_form(1.5, 1.0));
  // one success in two at ten iterations: ten times log(0.05)/log(0.5)
  CHECK(tts_closed_form(0.5, 10.0) == Catch::Approx(43.2193).epsilon(1e-5));
}

TEST_CASE("TTS from records") {
  std::vector<RunRecord> rs{rec(true, 10), rec(true, 30), rec(false, 5000), rec(false, 5000)};
  auto e = compute_tts(rs);
  CHECK(e.total == 4);
  CHECK(e.solved == 2);
  CHECK(e.p == 0.5);
  CHECK(e.t == 20.0);
  CHECK(e.tts == Catch::Approx(oracle::tts(0.5, 20.0)));
  CHECK_FALSE(compute_tts({rec(false, 1)}).finite());
  CHECK(compute_tts({rec(true, 4)}).tts == 4.0);
  CHECK_THROWS(compute_tts({}));
}

TEST_CASE("backbone generator plants exactly the requested backbone") {
  for (int b : {0, 30, 50, 90}) {
    auto spec = BackboneSpec::scaled(14, 429, b);
    for (std::uint64_t s = 0; s < 3; ++s) {
      auto inst = generate_backbone_instance(spec, s, true);
      CHECK(static_cast<int>(inst.cnf.clauses.size()) == spec.m);
      CHECK(evaluate(inst.cnf, inst.planted).all_satisfied);
      CHECK(static_cast<int>(inst.backbone.size()) == spec.backbone_size());
      std::set<int> expected;
      for (Var v : inst.backbone) expected.insert(v);
      CHECK(oracle::backbone(inst.cnf) == expected);
    }
  }
}

TEST_CASE("backbone grid checks") {
  BackboneSpec grid;
  CHECK(grid.on_cbs_grid());
  CHECK(grid.backbone_size() == 50);
  auto off = BackboneSpec::scaled(60, 429, 50);
  CHECK(off.m == 257);
  CHECK_FALSE(off.on_cbs_grid());
  CHECK_THROWS(generate_backbone_instance(off, 1));
  auto ids = backbone_instances(BackboneSpec::scaled(20, 403, 10), 2, 5, true);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0].id == "backbone-n20-m81-b10-i0");
  CHECK(ids[0].family == "backbone-n20-m81-b10");
  CHECK(ids[0].cnf.provenance == ids[0].id);
}

TEST_CASE("on-grid backbone instance has a full-size backbone") {
  BackboneSpec s;
  s.backbone_percent = 10;
  auto inst = generate_backbone_instance(s, 3);
  CHECK(inst.backbone.size() == 10);
  for (Var v : inst.backbone) {
    auto r = dpll_solve(inst.cnf, {Literal(v, inst.planted[v])});
    CHECK(r.status == SatStatus::Unsat);
  }
}

TEST_CASE("config validation") {
  using nlohmann::json;
  CHECK_THROWS(parse_config(json::parse(R"({})")));
  CHECK_THROWS(parse_config(json::parse(R"({"instances": []})")));
  const std::string inst = R"("instances": [{"kind": "semiprime", "bits": 6}])";
  CHECK_NOTHROW(parse_config(json::parse("{" + inst + "}")));
  CHECK_THROWS(parse_config(json::parse("{" + inst + R"(, "levels": [8]})")));
  CHECK_THROWS(parse_config(json::parse("{" + inst + R"(, "levels": []})")));
  CHECK_THROWS(parse_config(json::parse("{" + inst + R"(, "strategies": ["zigzag"]})")));
  CHECK_THROWS(parse_config(json::parse("{" + inst + R"(, "backends": ["qpu"]})")));
  CHECK_THROWS(parse_config(json::parse("{" + inst + R"(, "repeats": 0})")));
  CHECK_THROWS(parse_config(json::parse("{" + inst + R"(, "schedule": {"sweeps": 0}})")));
  auto c = parse_config(json::parse("{" + inst + R"(, "budget": 30, "tabu": {"tenure": 4}})"));
  CHECK(c.budget == 30);
  CHECK(c.tabu.tenure == 4);
  CHECK(c.levels == std::vector<int>{7});
  CHECK(load_instances(c).size() == semiprime_catalog(6).size());
  auto bad = parse_config(json::parse(R"({"instances": [{"kind": "martian"}]})"));
  CHECK_THROWS(load_instances(bad));
  CHECK_THROWS(load_instance_file("/nonexistent/x.cnf"));
}

TEST_CASE("semiprime files keep their family") {
  TempDir dir("files");
  auto inst = semiprime_instances(7, 1).front();
  {
    std::ofstream out(dir.path / "a.cnf");
    out << write_dimacs(inst.cnf);
  }
  auto loaded = load_instance_file(dir.path / "a.cnf");
  CHECK(loaded.family == "semiprime-7");
  CHECK(loaded.bits == 7);
  CHECK(loaded.id == inst.id);
  CHECK(loaded.cnf.clauses == inst.cnf.clauses);
}

TEST_CASE("results directory resolution") {
  ::unsetenv(kResultsDirEnv);
  CHECK(results_dir() == fs::path("results"));
  ::setenv(kResultsDirEnv, "/tmp/elsewhere", 1);
  CHECK(results_dir() == fs::path("/tmp/elsewhere"));
  CHECK(results_dir(std::string("cli")) == fs::path("cli"));
  ::unsetenv(kResultsDirEnv);
}

TEST_CASE("run_cell is deterministic and accounts solver time by calls") {
  ExperimentConfig c = small_config();
  c.per_call_budget_ms = 5.0;
  auto inst = semiprime_instances(7, 1).front();
  for (int level : {0, 7}) {
    auto a = run_cell(inst, level, Strategy::Dfs, Backend::Emulator, 0, c);
    auto b = run_cell(inst, level, Strategy::Dfs, Backend::Emulator, 0, c);
    CHECK(to_json(a.record).dump() == to_json(b.record).dump());
    CHECK(a.record.solver_time_ms == 5.0 * a.record.iterations_used);
    CHECK(a.timing.key == a.record.key());
    CHECK(a.record.solved == a.record.verified);
    if (a.record.iterations_used == 0) CHECK(a.record.solver_time_ms == 0.0);
  }
}

TEST_CASE("closed branches fail the repeat unless re-rolled") {
  ExperimentConfig c = small_config();
  auto inst = semiprime_instances(8, 1).front();
  int closed = 0;
  for (int rep = 0; rep < 16; ++rep) {
    auto plain = run_cell(inst, 7, Strategy::Dfs, Backend::Emulator, rep, c);
    if (!plain.record.branch_closed) continue;
    ++closed;
    CHECK_FALSE(plain.record.solved);
    CHECK(plain.record.residual_unsat);
    CHECK(plain.record.iterations_used == 0);
    ExperimentConfig r = c;
    r.reroll_closed_branch = true;
    auto again = run_cell(inst, 7, Strategy::Dfs, Backend::Emulator, rep, r);
    CHECK_FALSE(again.record.branch_closed);
  }
  CHECK(closed > 0);
  CHECK(parse_config(nlohmann::json::parse(R"({"instances": [{"kind": "semiprime", "bits": 6}],
                                               "reroll_closed_branch": true})"))
            .reroll_closed_branch);
}

TEST_CASE("run_cell records pass through json") {
  ExperimentConfig c = small_config();
  c.record_per_iteration = true;
  auto inst = semiprime_instances(6, 1).front();
  auto cell = run_cell(inst, 3, Strategy::Bfs, Backend::Tabu, 1, c);
  auto back = run_record_from_json(nlohmann::json::parse(to_json(cell.record).dump()));
  CHECK(to_json(back).dump() == to_json(cell.record).dump());
  CHECK(back.per_iteration_satisfied.size() == static_cast<std::size_t>(back.iterations_used));
}

TEST_CASE("sweeps are idempotent and resume to the same bytes") {
  TempDir dir("sweep");
  const ExperimentConfig c = small_config();
  auto first = run_experiment(c, dir.path);
  CHECK(first.groups == 2 * 3 * 2);
  CHECK(first.cells_run == 2 * 3 * 2 * 2);
  const std::string full = slurp(dir.path / "runs.jsonl");

  auto again = run_experiment(c, dir.path);
  CHECK(again.cells_run == 0);
  CHECK(slurp(dir.path / "runs.jsonl") == full);

  // drop the last three records, as if interrupted, and resume
  std::istringstream lines(full);
  std::vector<std::string> kept;
  for (std::string l; std::getline(lines, l);) kept.push_back(l);
  kept.resize(kept.size() - 3);
  {
    std::ofstream out(dir.path / "runs.jsonl", std::ios::trunc);
    for (const auto& l : kept) out << l << '\n';
  }
  auto resumed = run_experiment(c, dir.path);
  CHECK(resumed.cells_run == 3);
  CHECK(slurp(dir.path / "runs.jsonl") == full);

  for (const char* f : {"aggregates.csv", "plotdata/solved_pct.csv", "plotdata/tts.csv", "plotdata/runtime.csv"})
    CHECK(fs::exists(dir.path / f));
}

TEST_CASE("solved records re-verify offline") {
  TempDir dir("verify");
  const ExperimentConfig c = small_config();
  run_experiment(c, dir.path);
  const auto instances = load_instances(c);
  int checked = 0;
  for (const auto& r : read_runs(dir.path / "runs.jsonl")) {
    if (!r.solved) continue;
    auto it = std::find_if(instances.begin(), instances.end(), [&](const Instance& i) { return i.id == r.instance; });
    REQUIRE(it != instances.end());
    // levels without branching run on a seed-free cached ladder
    const auto pre = r.level < kMaxLevel ? run_ladder(it->cnf, r.level, 0)
                                         : run_ladder(it->cnf, r.level, ladder_seed(c.seed, it->id, r.level, r.repeat));
    IterateOptions opts;
    opts.strategy = parse_strategy(r.strategy);
    opts.cap = c.cap;
    auto out = iterate(it->cnf, pre, r.seed, opts);
    REQUIRE(out.solved);
    CHECK(evaluate(it->cnf, out.assignment).all_satisfied);
    CHECK(out.iterations == r.iterations_used);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("stop after success leaves one solved record per group") {
  TempDir dir("stop");
  ExperimentConfig c = small_config();
  c.stop_after_success = true;
  c.repeats = 5;
  run_experiment(c, dir.path);
  std::map<std::string, int> solved;
  for (const auto& r : read_runs(dir.path / "runs.jsonl")) solved[r.group_key()] += r.solved ? 1 : 0;
  for (const auto& [k, n] : solved) CHECK(n <= 1);
}

TEST_CASE("aggregates and runtime rows") {
  std::vector<RunRecord> runs;
  std::vector<TimingRecord> times;
  for (int i = 0; i < 4; ++i) {
    RunRecord r = rec(i % 2 == 0, 10 * (i + 1));
    r.instance = "inst" + std::to_string(i / 2);
    r.family = "fam";
    r.level = 2;
    r.strategy = "dfs";
    r.backend = "emulator";
    r.repeat = i;
    r.solver_time_ms = 5.0 * r.iterations_used;
    runs.push_back(r);
    TimingRecord t;
    t.key = r.key();
    t.preprocess_s = 0.002;
    times.push_back(t);
  }
  auto aggs = aggregate(runs);
  REQUIRE(aggs.size() == 1);
  CHECK(aggs[0].instances == 2);
  CHECK(aggs[0].solved_instances == 2);
  CHECK(aggs[0].repeats == 4);
  CHECK(aggs[0].solved_repeats == 2);
  CHECK(aggs[0].solved_instance_pct() == 100.0);
  CHECK(aggs[0].tts.t == 20.0);
  auto rt = runtime_report(runs, times);
  REQUIRE(rt.size() == 1);
  CHECK(rt[0].mean_preprocess_ms == Catch::Approx(2.0));
  CHECK(rt[0].mean_solver_calls == 25.0);
  CHECK(rt[0].mean_solver_ms == 125.0);
  CHECK(format_tts(std::numeric_limits<double>::infinity()) == "inf");
}
