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

// Decomposition of a (preprocessed) CNF into spin-budget sized subproblems.
//
// Each iteration picks a start variable from an unsatisfied clause, walks the
// variable interaction graph breadth- or depth-first until the spin budget is
// used, freezes every other variable to its best-known value, solves the
// resulting MaxSAT sub-CNF as an Ising model and merges the answer back when
// it does not lower the global satisfied-clause count.

#ifndef ISINGSAT_DECOMPOSE_HPP
#define ISINGSAT_DECOMPOSE_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "isingsat/cnf.hpp"
#include "isingsat/preprocess.hpp"
#include "isingsat/qubo.hpp"
#include "isingsat/solver.hpp"
#include "isingsat/vig.hpp"

namespace isingsat {

enum class Strategy { Bfs, Dfs };

inline const char* to_string(Strategy s) { return s == Strategy::Bfs ? "bfs" : "dfs"; }

inline Strategy parse_strategy(const std::string& s) {
  if (s == "bfs") return Strategy::Bfs;
  if (s == "dfs") return Strategy::Dfs;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

/// Variable filtering: a variable selected `window` iterations in a row is
/// cooled for the next `window` iterations.
class FilterState {
 public:
  FilterState() = default;
  explicit FilterState(int num_vars, int window = 5)
      : window_(window),
        consecutive_(static_cast<std::size_t>(num_vars) + 1, 0),
        cooldown_(static_cast<std::size_t>(num_vars) + 1, 0) {}

  int window() const { return window_; }
  bool cooled(Var v) const { return cooldown_.at(v) > 0; }
  int consecutive(Var v) const { return consecutive_.at(v); }
  int cooldown(Var v) const { return cooldown_.at(v); }

  void update(const std::vector<Var>& selected) {
    for (auto& c : cooldown_)
      if (c > 0) --c;
    std::vector<char> in(consecutive_.size(), 0);
    for (Var v : selected) in.at(v) = 1;
    for (std::size_t v = 1; v < consecutive_.size(); ++v) {
      if (!in[v]) {
        consecutive_[v] = 0;
        continue;
      }
      if (++consecutive_[v] >= window_ && window_ > 0) {
        cooldown_[v] = window_;
        consecutive_[v] = 0;
      }
    }
  }

 private:
  int window_ = 5;
  std::vector<int> consecutive_;
  std::vector<int> cooldown_;
};

/// VIG plus three-literal clause occurrence lists, for ancilla-aware
/// selection. Built once per CNF.
class SubproblemSelector {
 public:
  explicit SubproblemSelector(const Cnf& cnf) : vig_(cnf), wide_of_(static_cast<std::size_t>(cnf.num_vars) + 1) {
    for (const auto& c : cnf.clauses) {
      if (c.size() != 3) continue;
      wide_size_.push_back(static_cast<int>(clause_vars(c).size()));
      for (Var v : clause_vars(c)) wide_of_[v].push_back(static_cast<int>(wide_size_.size()) - 1);
    }
    by_degree_.resize(wide_of_.size());
    for (Var v = 1; v <= vig_.num_vars(); ++v) {
      by_degree_[v] = vig_.neighbors(v);
      std::stable_sort(by_degree_[v].begin(), by_degree_[v].end(),
                       [&](Var a, Var b) { return vig_.degree(a) < vig_.degree(b); });
    }
  }

  const Vig& vig() const { return vig_; }

  /// |S| plus the number of three-literal clauses whose variables all lie in S.
  int spin_cost(const std::vector<Var>& selected) const {
    std::vector<int> hits(wide_size_.size(), 0);
    int cost = 0;
    for (Var v : selected) {
      ++cost;
      for (int k : wide_of_.at(v))
        if (++hits[k] == wide_size_[k]) ++cost;
    }
    return cost;
  }

  /// Selected variables in traversal order. Cooled variables are walked
  /// through but only taken after every other reachable variable; when a
  /// component is exhausted the walk restarts at the lowest unvisited
  /// variable. Stops at the first variable that would exceed the budget.
  std::vector<Var> select(Strategy strategy, int budget, Var start, const FilterState* filter = nullptr) const {
    if (budget < 1) throw std::invalid_argument("select: budget must be >= 1");
    const int n = vig_.num_vars();
    std::vector<char> visited(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> hits(wide_size_.size(), 0);
    std::vector<Var> selected, deferred;
    int cost = 0;
    bool full = false;

    auto try_add = [&](Var v) {
      int extra = 1;
      for (int k : wide_of_[v])
        if (hits[k] + 1 == wide_size_[k]) ++extra;
      if (cost + extra > budget) return false;
      cost += extra;
      for (int k : wide_of_[v]) ++hits[k];
      selected.push_back(v);
      return true;
    };
    auto emit = [&](Var v) {
      if (full) return;
      if (filter && filter->cooled(v))
        deferred.push_back(v);
      else if (!try_add(v))
        full = true;
    };

    auto walk_bfs = [&](Var root) {
      std::deque<Var> queue{root};
      visited[root] = 1;
      while (!queue.empty() && !full) {
        Var u = queue.front();
        queue.pop_front();
        emit(u);
        for (Var w : vig_.neighbors(u))
          if (!visited[w]) {
            visited[w] = 1;
            queue.push_back(w);
          }
      }
    };
    auto walk_dfs = [&](Var root) {
      std::vector<std::pair<Var, std::size_t>> stack{{root, 0}};
      visited[root] = 1;
      emit(root);
      while (!stack.empty() && !full) {
        auto& [u, pos] = stack.back();
        const auto& nbrs = by_degree_[u];
        while (pos < nbrs.size() && visited[nbrs[pos]]) ++pos;
        if (pos == nbrs.size()) {
          stack.pop_back();
          continue;
        }
        Var w = nbrs[pos++];
        visited[w] = 1;
        emit(w);
        stack.push_back({w, 0});
      }
    };
    auto walk = [&](Var root) { strategy == Strategy::Bfs ? walk_bfs(root) : walk_dfs(root); };

    if (start >= 1 && start <= n && vig_.present(start)) walk(start);
    for (Var v = 1; v <= n && !full; ++v)
      if (vig_.present(v) && !visited[v]) walk(v);
    for (Var v : deferred)
      if (full || !try_add(v)) break;
    return selected;
  }

 private:
  Vig vig_;
  std::vector<std::vector<int>> wide_of_;
  std::vector<int> wide_size_;
  std::vector<std::vector<Var>> by_degree_;
};

inline std::vector<Var> select_bfs(const SubproblemSelector& sel, int budget, Var start, const FilterState* filter = nullptr) {
  return sel.select(Strategy::Bfs, budget, start, filter);
}

inline std::vector<Var> select_dfs(const SubproblemSelector& sel, int budget, Var start, const FilterState* filter = nullptr) {
  return sel.select(Strategy::Dfs, budget, start, filter);
}

// ---------------------------------------------------------------------------
// Freezing

struct Subproblem {
  std::vector<Var> selected;      ///< ascending; local variable i+1 is selected[i]
  Cnf sub_cnf;                    ///< over local variables 1..k, clauses verbatim
  QuboModel qubo;                 ///< offset includes clauses falsified by frozen values
  int spin_cost = 0;
  int satisfied_by_frozen = 0;    ///< clauses made true by frozen values
  int falsified_by_frozen = 0;    ///< clauses with every literal frozen false
};

/// Substitutes frozen values (from `global`) for every unselected variable.
/// No other simplification is applied: conflicting units stay as they are.
inline Subproblem freeze_and_extract(const Cnf& cnf, std::vector<Var> selected, const Assignment& global,
                                     int spin_budget = std::numeric_limits<int>::max()) {
  if (selected.empty()) throw std::invalid_argument("freeze_and_extract: empty selection");
  std::sort(selected.begin(), selected.end());
  std::vector<int> local(static_cast<std::size_t>(cnf.num_vars) + 1, 0);
  for (std::size_t i = 0; i < selected.size(); ++i) local.at(selected[i]) = static_cast<int>(i) + 1;

  Subproblem sp;
  sp.sub_cnf.num_vars = static_cast<int>(selected.size());
  for (const auto& c : cnf.clauses) {
    Clause kept;
    bool sat = false;
    for (Literal l : c) {
      if (local[l.var()])
        kept.push_back(Literal(local[l.var()], l.negated()));
      else if (l.holds(global[l.var()])) {
        sat = true;
        break;
      }
    }
    if (sat)
      ++sp.satisfied_by_frozen;
    else if (kept.empty())
      ++sp.falsified_by_frozen;
    else
      sp.sub_cnf.clauses.push_back(std::move(kept));
  }
  sp.spin_cost = sp.sub_cnf.num_vars + count_wide_clauses(sp.sub_cnf);
  if (sp.spin_cost > spin_budget)
    throw std::invalid_argument("freeze_and_extract: spin cost " + std::to_string(sp.spin_cost) + " exceeds budget " +
                                std::to_string(spin_budget));
  sp.qubo = cnf_to_qubo(sp.sub_cnf);
  sp.qubo.offset += sp.falsified_by_frozen;
  sp.selected = std::move(selected);
  return sp;
}

// ---------------------------------------------------------------------------
// Global state and the iteration loop

struct GlobalState {
  Assignment best;
  int best_satisfied = 0;
  int iteration = 0;
  std::vector<std::size_t> unsatisfied;  ///< clause indices falsified by `best`
  FilterState filter;
  std::mt19937_64 rng;

  GlobalState(const Cnf& cnf, std::uint64_t seed, int filter_window = 5)
      : best(cnf.num_vars), filter(cnf.num_vars, filter_window), rng(seed) {
    for (Var v = 1; v <= cnf.num_vars; ++v) best.set(v, (rng() >> 63) != 0);
    rescore(cnf);
  }

  void rescore(const Cnf& cnf) {
    unsatisfied.clear();
    for (std::size_t k = 0; k < cnf.clauses.size(); ++k)
      if (!clause_satisfied(cnf.clauses[k], best)) unsatisfied.push_back(k);
    best_satisfied = static_cast<int>(cnf.clauses.size() - unsatisfied.size());
  }

  bool solved() const { return unsatisfied.empty(); }
};

/// A random variable of a random unsatisfied clause, or 0 when none is left.
inline Var pick_start(const Cnf& cnf, GlobalState& g) {
  if (g.unsatisfied.empty()) return 0;
  const Clause& c = cnf.clauses[g.unsatisfied[g.rng() % g.unsatisfied.size()]];
  if (c.empty()) return 0;
  return c[g.rng() % c.size()].var();
}

/// Overwrites the selected variables with the subproblem answer and keeps the
/// result if the satisfied count does not drop. Returns true if accepted.
inline bool update_global(GlobalState& g, const Cnf& cnf, const Subproblem& sp, const Bits& sub_solution,
                          bool allow_plateau = true) {
  if (sub_solution.size() < sp.selected.size()) throw std::invalid_argument("update_global: short sub-solution");
  Assignment candidate = g.best;
  for (std::size_t i = 0; i < sp.selected.size(); ++i) candidate.set(sp.selected[i], sub_solution[i] != 0);
  int count = 0;
  for (const auto& c : cnf.clauses) count += clause_satisfied(c, candidate) ? 1 : 0;
  g.filter.update(sp.selected);
  ++g.iteration;
  const bool accept = allow_plateau ? count >= g.best_satisfied : count > g.best_satisfied;
  if (!accept) return false;
  g.best = std::move(candidate);
  g.rescore(cnf);
  return true;
}

struct IterateOptions {
  Strategy strategy = Strategy::Dfs;
  Backend backend = Backend::Emulator;
  ChipProfile chip;
  int cap = 5000;
  int filter_window = 5;
  bool allow_plateau = true;
  bool record_per_iteration = false;
  AnnealSchedule schedule;
  TabuParams tabu;
  int num_samples = 1;
  /// Called after every solver call with the 1-based iteration; turns on
  /// anneal traces when set.
  std::function<void(int, const SolveResult&)> on_solve;
};

struct IterateOutcome {
  bool solved = false;    ///< reconstructed assignment satisfies the original CNF
  bool residual_unsat = false;
  int iterations = 0;     ///< solver calls
  int best_satisfied = 0;
  int num_clauses = 0;
  Assignment assignment;  ///< over the original variables
  std::vector<int> per_iteration_satisfied;
  double solver_time = 0.0;
  double wall_time = 0.0;
};

/// Runs the decomposition loop on a preprocessed instance until every reduced
/// clause holds or `cap` solver calls are spent; on success the assignment is
/// rebuilt and checked against `original`.
inline IterateOutcome iterate(const Cnf& original, const LadderResult& pre, std::uint64_t seed,
                              const IterateOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  IterateOutcome out;
  const Cnf& cnf = pre.cnf;
  out.num_clauses = static_cast<int>(cnf.clauses.size());
  if (pre.unsat || pre.branch.closed || has_empty_clause(cnf)) {
    out.residual_unsat = true;
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  GlobalState g(cnf, seed, opts.filter_window);
  const SubproblemSelector selector(cnf);
  std::mt19937_64 solver_seeds(seed ^ 0x9e3779b97f4a7c15ULL);
  while (!g.solved() && out.iterations < opts.cap) {
    Var start = pick_start(cnf, g);
    auto selected = selector.select(opts.strategy, opts.chip.spin_budget, start, &g.filter);
    Subproblem sp = freeze_and_extract(cnf, selected, g.best, opts.chip.spin_budget);

    SolveRequest req;
    req.backend = opts.backend;
    req.seed = solver_seeds();
    req.num_samples = opts.num_samples;
    req.schedule = opts.schedule;
    req.tabu = opts.tabu;
    req.chip = opts.chip;
    req.record_trace = static_cast<bool>(opts.on_solve);
    IsingModel ising = qubo_to_ising(sp.qubo);
    req.model = opts.backend == Backend::Emulator ? scale_to_chip(ising, opts.chip).model : std::move(ising);
    SolveResult res = solve(req);
    out.solver_time += res.wall_time;
    ++out.iterations;
    if (opts.on_solve) opts.on_solve(out.iterations, res);

    Bits bits = spins_to_bits(res.best);
    update_global(g, cnf, sp, bits, opts.allow_plateau);
    if (opts.record_per_iteration) out.per_iteration_satisfied.push_back(g.best_satisfied);
  }
  out.best_satisfied = g.best_satisfied;
  if (g.solved()) {
    out.assignment = reconstruct(g.best, pre.cond, pre.branch);
    out.solved = evaluate(original, out.assignment).all_satisfied;
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace isingsat

#endif  // ISINGSAT_DECOMPOSE_HPP
