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

// Per-repeat result records and time-to-solution.
//
// RunRecord holds only values that are a function of (instance, seed,
// configuration), so a record serialises to the same bytes on every run.
// Wall-clock measurements live in TimingRecord and go to a separate file.

#ifndef ISINGSAT_RUN_RECORD_HPP
#define ISINGSAT_RUN_RECORD_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace isingsat {

using ordered_json = nlohmann::ordered_json;

struct RunRecord {
  std::string instance;
  std::string family;  ///< aggregation bucket, e.g. "semiprime-8" or "backbone-n60-b50"
  int bits = 0;        ///< semiprime width, 0 otherwise
  std::string strategy;
  int level = 0;
  std::string backend;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool solved = false;
  bool verified = false;
  int iterations_used = 0;
  int cap = 0;
  int budget = 0;
  int reduced_vars = 0;
  int reduced_clauses = 0;
  bool branch_closed = false;
  bool residual_unsat = false;
  int best_satisfied = 0;
  double per_call_budget_ms = 0.0;
  double solver_time_ms = 0.0;  ///< per-call budget times solver calls
  std::vector<int> per_iteration_satisfied;

  /// Identity of the cell this record fills in an experiment.
  std::string key() const {
    return instance + "|" + std::to_string(level) + "|" + strategy + "|" + backend + "|" + std::to_string(repeat);
  }
  std::string group_key() const { return instance + "|" + std::to_string(level) + "|" + strategy + "|" + backend; }
};

inline ordered_json to_json(const RunRecord& r) {
  ordered_json j;
  j["instance"] = r.instance;
  j["family"] = r.family;
  j["bits"] = r.bits;
  j["strategy"] = r.strategy;
  j["level"] = r.level;
  j["backend"] = r.backend;
  j["repeat"] = r.repeat;
  j["seed"] = r.seed;
  j["solved"] = r.solved;
  j["verified"] = r.verified;
  j["iterations_used"] = r.iterations_used;
  j["cap"] = r.cap;
  j["budget"] = r.budget;
  j["reduced_vars"] = r.reduced_vars;
  j["reduced_clauses"] = r.reduced_clauses;
  j["branch_closed"] = r.branch_closed;
  j["residual_unsat"] = r.residual_unsat;
  j["best_satisfied"] = r.best_satisfied;
  j["per_call_budget_ms"] = r.per_call_budget_ms;
  j["solver_time_ms"] = r.solver_time_ms;
  if (!r.per_iteration_satisfied.empty()) j["per_iteration_satisfied"] = r.per_iteration_satisfied;
  return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.instance = j.at("instance").get<std::string>();
  r.family = j.value("family", std::string{});
  r.bits = j.value("bits", 0);
  r.strategy = j.at("strategy").get<std::string>();
  r.level = j.at("level").get<int>();
  r.backend = j.at("backend").get<std::string>();
  r.repeat = j.value("repeat", 0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.solved = j.at("solved").get<bool>();
  r.verified = j.value("verified", false);
  r.iterations_used = j.at("iterations_used").get<int>();
  r.cap = j.value("cap", 0);
  r.budget = j.value("budget", 0);
  r.reduced_vars = j.value("reduced_vars", 0);
  r.reduced_clauses = j.value("reduced_clauses", 0);
  r.branch_closed = j.value("branch_closed", false);
  r.residual_unsat = j.value("residual_unsat", false);
  r.best_satisfied = j.value("best_satisfied", 0);
  r.per_call_budget_ms = j.value("per_call_budget_ms", 0.0);
  r.solver_time_ms = j.value("solver_time_ms", 0.0);
  if (j.contains("per_iteration_satisfied")) r.per_iteration_satisfied = j["per_iteration_satisfied"].get<std::vector<int>>();
  return r;
}

struct TimingRecord {
  std::string key;
  double preprocess_s = 0.0;
  double solver_wall_s = 0.0;
  double total_wall_s = 0.0;
};

inline ordered_json to_json(const TimingRecord& t) {
  ordered_json j;
  j["key"] = t.key;
  j["preprocess_s"] = t.preprocess_s;
  j["solver_wall_s"] = t.solver_wall_s;
  j["total_wall_s"] = t.total_wall_s;
  return j;
}

inline TimingRecord timing_record_from_json(const nlohmann::json& j) {
  return {j.at("key").get<std::string>(), j.value("preprocess_s", 0.0), j.value("solver_wall_s", 0.0),
          j.value("total_wall_s", 0.0)};
}

// ---------------------------------------------------------------------------
// Time to solution

struct TtsEstimate {
  int total = 0;
  int solved = 0;
  double p = 0.0;    ///< per-repeat success probability
  double t = 0.0;    ///< mean iterations of solved repeats
  double tts = std::numeric_limits<double>::infinity();
  bool finite() const { return std::isfinite(tts); }
};

/// Iterations needed to succeed with 95% confidence: t ln(0.05) / ln(1 - p),
/// t itself once p >= 0.95, infinite when nothing was solved.
inline double tts_closed_form(double p, double t) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("tts: probability outside [0, 1]");
  if (p == 0.0) return std::numeric_limits<double>::infinity();
  if (p >= 0.95) return t;
  return t * std::log(0.05) / std::log1p(-p);
}

inline TtsEstimate compute_tts(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("compute_tts: no records");
  TtsEstimate e;
  e.total = static_cast<int>(records.size());
  double iters = 0.0;
  for (const auto& r : records)
    if (r.solved) {
      ++e.solved;
      iters += r.iterations_used;
    }
  e.p = static_cast<double>(e.solved) / e.total;
  e.t = e.solved ? iters / e.solved : 0.0;
  e.tts = tts_closed_form(e.p, e.t);
  return e;
}

}  // namespace isingsat

#endif  // ISINGSAT_RUN_RECORD_HPP
