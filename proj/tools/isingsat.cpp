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

// Command-line front end: generate, preprocess, solve, bench, tts, report.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "isingsat/isingsat.hpp"

namespace {

using namespace isingsat;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

Cnf read_cnf(const std::string& path) {
  if (path.empty() || path == "-") return parse_dimacs(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_dimacs(in);
}

ordered_json cond_to_json(const LadderResult& r) {
  ordered_json j;
  j["num_vars"] = r.cond.num_vars();
  j["fixed"] = ordered_json::array();
  for (const auto& f : r.cond.fixed()) j["fixed"].push_back({{"var", f.var}, {"value", f.value}});
  j["relations"] = ordered_json::array();
  for (const auto& rel : r.cond.relations())
    j["relations"].push_back({{"replaced", rel.replaced}, {"master", rel.master}, {"same_sign", rel.same_sign}});
  j["branch"] = ordered_json::array();
  for (const auto& g : r.branch.guesses) j["branch"].push_back({{"var", g.var}, {"value", g.value}});
  j["branch_closed"] = r.branch.closed;
  j["unsat"] = r.unsat;
  return j;
}

ordered_json reports_to_json(const std::vector<PassReport>& reports) {
  ordered_json j = ordered_json::array();
  for (const auto& r : reports)
    j.push_back({{"pass", r.pass},
                 {"level", r.level},
                 {"vars_before", r.vars_before},
                 {"vars_after", r.vars_after},
                 {"clauses_before", r.clauses_before},
                 {"clauses_after", r.clauses_after},
                 {"new_unit_clauses", r.new_unit_clauses},
                 {"conditions_added", r.conditions_added},
                 {"wall_time_s", r.wall_time}});
  return j;
}

void print_aggregates(const std::vector<Aggregate>& aggs) {
  std::cout << std::left << std::setw(28) << "family" << std::setw(7) << "level" << std::setw(6) << "strat"
            << std::setw(10) << "backend" << std::setw(12) << "inst_solved" << std::setw(12) << "rep_success"
            << "tts\n";
  for (const auto& a : aggs) {
    std::ostringstream inst, rep;
    inst << a.solved_instances << "/" << a.instances;
    rep << a.solved_repeats << "/" << a.repeats;
    std::cout << std::left << std::setw(28) << a.family << std::setw(7) << a.level << std::setw(6) << a.strategy
              << std::setw(10) << a.backend << std::setw(12) << inst.str() << std::setw(12) << rep.str()
              << format_tts(a.tts.tts) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isingsat: SAT through Ising-chip sized QUBO subproblems"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a benchmark CNF");
  std::string gen_kind = "semiprime", gen_out, gen_encoding = "opt1", gen_adder = "majority";
  int gen_bits = 8;
  std::uint64_t gen_semiprime = 0, gen_seed = 1;
  bool gen_no_msb = false, gen_force = false, gen_list = false;
  int bb_n = kCbsVars, bb_m = 429, bb_b = 50;
  gen->add_option("--kind", gen_kind, "semiprime or backbone")->check(CLI::IsMember({"semiprime", "backbone"}));
  gen->add_option("--bits", gen_bits, "semiprime bit width");
  gen->add_option("--semiprime", gen_semiprime, "product to factor (default: smallest in the catalog)");
  gen->add_option("--encoding", gen_encoding, "gate encoding")->check(CLI::IsMember({"opt1", "opt2"}));
  gen->add_option("--adder", gen_adder, "full-adder carry style")->check(CLI::IsMember({"majority", "propagate"}));
  gen->add_flag("--no-msb", gen_no_msb, "do not force the factor MSBs to 1");
  gen->add_flag("--list", gen_list, "print the semiprime catalog for --bits and exit");
  gen->add_option("--n", bb_n, "backbone: variables");
  gen->add_option("--m", bb_m, "backbone: clauses");
  gen->add_option("--b", bb_b, "backbone: backbone percentage");
  gen->add_option("--seed", gen_seed, "backbone: rng seed");
  gen->add_flag("--force", gen_force, "backbone: allow specs off the CBS grid");
  gen->add_option("-o,--output", gen_out, "output file (default stdout)");

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "run the preprocessing ladder");
  int pre_level = kMaxLevel;
  std::uint64_t pre_seed = 1;
  std::string pre_in, pre_out, pre_cond, pre_report, pre_qubo;
  pre->add_option("--level", pre_level, "ladder level 0-7")->check(CLI::Range(0, kMaxLevel));
  pre->add_option("--seed", pre_seed, "branching seed");
  pre->add_option("-i,--input", pre_in, "input DIMACS (default stdin)");
  pre->add_option("-o,--output", pre_out, "reduced DIMACS (default stdout)");
  pre->add_option("--cond", pre_cond, "condition-list sidecar (JSON)");
  pre->add_option("--report", pre_report, "per-pass report (JSON)");
  pre->add_option("--qubo", pre_qubo, "QUBO of the reduced CNF as i j value triplets");

  // solve
  auto* sol = app.add_subcommand("solve", "decompose and solve one instance");
  std::string sol_strategy = "dfs", sol_backend = "emulator", sol_in, sol_out, sol_trace, sol_config, sol_timings;
  ExperimentConfig sc;
  sc.levels = {kMaxLevel};
  bool sol_per_iter = false;
  sol->add_option("--strategy", sol_strategy, "bfs or dfs")->check(CLI::IsMember({"bfs", "dfs"}));
  sol->add_option("--backend", sol_backend, "emulator or tabu")->check(CLI::IsMember({"emulator", "tabu"}));
  sol->add_option("--level", sc.levels[0], "preprocessing level")->check(CLI::Range(0, kMaxLevel));
  sol->add_option("--budget", sc.budget, "spin budget per subproblem");
  sol->add_option("--cap", sc.cap, "solver calls per repeat");
  sol->add_option("--repeats", sc.repeats, "independent repeats");
  sol->add_option("--seed", sc.seed, "base seed");
  sol->add_option("--per-call-ms", sc.per_call_budget_ms, "nominal solver time per call");
  sol->add_option("-i,--input", sol_in, "instance DIMACS")->required();
  sol->add_option("-o,--output", sol_out, "runs.jsonl (default stdout)");
  sol->add_option("--timings", sol_timings, "wall-clock timings JSONL");
  sol->add_flag("--per-iteration", sol_per_iter, "record satisfied-clause counts per iteration");
  sol->add_option("--trace", sol_trace, "anneal trace CSV (iteration, sweep, temperature, best_energy), repeat 0");
  sol->add_option("--config", sol_config, "JSON with schedule / tabu / filter_window / reroll_closed_branch keys");

  // bench
  auto* bench = app.add_subcommand("bench", "run a sweep from a config file");
  std::string bench_config;
  std::optional<std::string> bench_results;
  bool bench_verbose = false;
  bench->add_option("config", bench_config, "sweep config (JSON)")->required();
  bench->add_option("--results", bench_results, "results directory (default $ISINGSAT_RESULTS_DIR or ./results)");
  bench->add_flag("-v,--verbose", bench_verbose, "log every finished repeat");

  // tts
  auto* tts = app.add_subcommand("tts", "time to solution from run records");
  std::string tts_in;
  tts->add_option("-i,--input", tts_in, "runs.jsonl")->required();

  // report
  auto* rep = app.add_subcommand("report", "rebuild aggregates and plot data");
  std::optional<std::string> rep_results;
  rep->add_option("--results", rep_results, "results directory (default $ISINGSAT_RESULTS_DIR or ./results)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (gen_kind == "backbone") {
        BackboneSpec spec;
        spec.n = bb_n;
        spec.m = bb_m;
        spec.backbone_percent = bb_b;
        write_text(gen_out, write_dimacs(generate_backbone_instance(spec, gen_seed, gen_force).cnf));
        return 0;
      }
      const auto catalog = semiprime_catalog(gen_bits);
      if (gen_list) {
        for (const auto& e : catalog) std::cout << e.semiprime << " = " << e.p << " * " << e.q << "\n";
        return 0;
      }
      if (gen_semiprime == 0) gen_semiprime = catalog.front().semiprime;
      EncodeOptions eo;
      eo.option = gen_encoding == "opt1" ? EncodingOption::Option1 : EncodingOption::Option2;
      eo.force_factor_msb = !gen_no_msb;
      const AdderStyle style = gen_adder == "majority" ? AdderStyle::Majority : AdderStyle::Propagate;
      write_text(gen_out, write_dimacs(generate_semiprime_instance(gen_bits, gen_semiprime, eo, style)));
    } else if (*pre) {
      const Cnf cnf = read_cnf(pre_in);
      LadderResult r = run_ladder(cnf, pre_level, pre_seed);
      write_text(pre_out, write_dimacs(r.cnf));
      if (!pre_cond.empty()) write_text(pre_cond, cond_to_json(r).dump(2) + "\n");
      if (!pre_report.empty()) write_text(pre_report, reports_to_json(r.reports).dump(2) + "\n");
      if (!pre_qubo.empty()) {
        if (has_empty_clause(r.cnf))
          std::cerr << "reduced formula is unsatisfiable; no QUBO written\n";
        else
          write_text(pre_qubo, to_triplets(cnf_to_qubo(r.cnf)));
      }
      for (const auto& p : r.reports)
        std::cerr << std::left << std::setw(28) << p.pass << " vars " << p.vars_before << " -> " << p.vars_after
                  << "  clauses " << p.clauses_before << " -> " << p.clauses_after << "\n";
    } else if (*sol) {
      if (!sol_config.empty()) {
        nlohmann::json j = read_json_file(sol_config);
        j["instances"] = nlohmann::json::array({{{"kind", "file"}, {"paths", {sol_in}}}});
        ExperimentConfig fc = parse_config(j);
        sc.schedule = fc.schedule;
        sc.tabu = fc.tabu;
        sc.filter_window = fc.filter_window;
        sc.reroll_closed_branch = fc.reroll_closed_branch;
      }
      sc.strategies = {parse_strategy(sol_strategy)};
      sc.backends = {parse_backend(sol_backend)};
      sc.record_per_iteration = sol_per_iter;
      const Instance inst = load_instance_file(sol_in);
      std::ofstream runs_file, timing_file, trace_file;
      if (!sol_out.empty()) runs_file.open(sol_out);
      if (!sol_timings.empty()) timing_file.open(sol_timings);
      if (!sol_trace.empty()) {
        trace_file.open(sol_trace);
        trace_file << "iteration,sweep,temperature,best_energy\n";
      }
      std::ostream& runs = sol_out.empty() ? std::cout : runs_file;
      int solved = 0;
      for (int rep_i = 0; rep_i < sc.repeats; ++rep_i) {
        std::function<void(int, const SolveResult&)> hook;
        if (rep_i == 0 && trace_file.is_open())
          hook = [&](int it, const SolveResult& res) {
            for (const auto& row : res.trace)
              trace_file << it << ',' << row.sweep << ',' << row.temperature << ',' << row.best_energy << '\n';
          };
        CellResult c = run_cell(inst, sc.levels[0], sc.strategies[0], sc.backends[0], rep_i, sc, nullptr, 0.0, hook);
        runs << to_json(c.record).dump() << '\n';
        if (timing_file.is_open()) timing_file << to_json(c.timing).dump() << '\n';
        solved += c.record.solved ? 1 : 0;
      }
      std::cerr << inst.id << ": " << solved << "/" << sc.repeats << " repeats solved\n";
    } else if (*bench) {
      const ExperimentConfig c = parse_config(read_json_file(bench_config));
      const auto dir = results_dir(bench_results);
      ExperimentSummary s = run_experiment(c, dir, bench_verbose ? &std::cerr : nullptr);
      std::cerr << "groups " << s.groups << ", repeats run " << s.cells_run << ", already stored "
                << s.cells_skipped << "; results in " << dir.string() << "\n";
      print_aggregates(aggregate(read_runs(dir / "runs.jsonl")));
    } else if (*tts) {
      std::ifstream probe(tts_in);
      if (!probe) throw std::runtime_error("cannot open " + tts_in);
      const auto runs = read_runs(tts_in);
      if (runs.empty()) throw std::runtime_error("no records in " + tts_in);
      const auto all = compute_tts(runs);
      std::cout << "records " << all.total << " solved " << all.solved << " p " << all.p << " t " << all.t
                << " tts " << format_tts(all.tts) << "\n";
      print_aggregates(aggregate(runs));
    } else if (*rep) {
      const auto dir = results_dir(rep_results);
      if (!std::filesystem::exists(dir / "runs.jsonl"))
        throw std::runtime_error("no runs.jsonl in " + dir.string());
      print_aggregates(write_reports(dir));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
