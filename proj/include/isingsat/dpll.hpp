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

// Small complete DPLL solver (unit propagation, shortest-clause branching).
// Used to plant backbones and to check residual formulas; not a fast solver.

#ifndef ISINGSAT_DPLL_HPP
#define ISINGSAT_DPLL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "isingsat/cnf.hpp"

namespace isingsat {

enum class SatStatus { Sat, Unsat, Unknown };

struct DpllResult {
  SatStatus status = SatStatus::Unknown;
  Assignment model;  ///< complete when status == Sat
  long nodes = 0;
};

namespace detail {

class Dpll {
 public:
  explicit Dpll(const Cnf& cnf)
      : cnf_(cnf), value_(static_cast<std::size_t>(cnf.num_vars) + 1, -1),
        watch_(2 * static_cast<std::size_t>(cnf.num_vars) + 2) {
    for (std::size_t k = 0; k < cnf.clauses.size(); ++k)
      for (Literal l : cnf.clauses[k]) watch_[slot(l)].push_back(static_cast<int>(k));
  }

  DpllResult run(const std::vector<Literal>& assumptions, long node_limit) {
    node_limit_ = node_limit;
    DpllResult r;
    for (const auto& c : cnf_.clauses)
      if (c.empty()) {
        r.status = SatStatus::Unsat;
        return r;
      }
    bool ok = true;
    for (Literal a : assumptions) ok = ok && assign(a);
    for (std::size_t k = 0; ok && k < cnf_.clauses.size(); ++k)
      if (cnf_.clauses[k].size() == 1) ok = assign(cnf_.clauses[k][0]);
    int res = ok ? search() : 0;
    r.nodes = nodes_;
    if (res < 0) return r;
    r.status = res ? SatStatus::Sat : SatStatus::Unsat;
    if (res) {
      r.model = Assignment(cnf_.num_vars);
      for (Var v = 1; v <= cnf_.num_vars; ++v) r.model.set(v, value_[v] == 1);
    }
    return r;
  }

 private:
  static std::size_t slot(Literal l) { return 2 * static_cast<std::size_t>(l.var()) + (l.negated() ? 1 : 0); }

  int lit_value(Literal l) const {
    const int v = value_[l.var()];
    return v < 0 ? -1 : (l.holds(v == 1) ? 1 : 0);
  }

  bool assign(Literal l) {
    const int cur = lit_value(l);
    if (cur == 1) return true;
    if (cur == 0) return false;
    value_[l.var()] = l.negated() ? 0 : 1;
    trail_.push_back(l.var());
    return true;
  }

  bool propagate() {
    while (head_ < trail_.size()) {
      const Var v = trail_[head_++];
      const Literal falsified(v, value_[v] == 1);  // the literal of v that just became false
      for (int k : watch_[slot(falsified)]) {
        const Clause& c = cnf_.clauses[k];
        int open = 0;
        Literal last;
        bool sat = false;
        for (Literal l : c) {
          const int lv = lit_value(l);
          if (lv == 1) {
            sat = true;
            break;
          }
          if (lv < 0) {
            ++open;
            last = l;
          }
        }
        if (sat) continue;
        if (open == 0) return false;
        if (open == 1) assign(last);
      }
    }
    return true;
  }

  Var pick() const {
    int best_open = 1 << 30;
    Var best = 0;
    for (const auto& c : cnf_.clauses) {
      int open = 0;
      Var first = 0;
      bool sat = false;
      for (Literal l : c) {
        const int lv = lit_value(l);
        if (lv == 1) {
          sat = true;
          break;
        }
        if (lv < 0) {
          ++open;
          if (!first) first = l.var();
        }
      }
      if (!sat && open > 0 && open < best_open) {
        best_open = open;
        best = first;
      }
    }
    return best;
  }

  void undo(std::size_t size) {
    while (trail_.size() > size) {
      value_[trail_.back()] = -1;
      trail_.pop_back();
    }
    head_ = size;
  }

  /// 1 sat, 0 unsat, -1 node limit reached.
  int search() {
    if (node_limit_ >= 0 && nodes_ >= node_limit_) return -1;
    ++nodes_;
    if (!propagate()) return 0;
    const Var v = pick();
    if (v == 0) return 1;
    const std::size_t mark = trail_.size();
    for (bool val : {true, false}) {
      assign(Literal(v, !val));
      const int r = search();
      if (r != 0) return r;
      undo(mark);
    }
    return 0;
  }

  const Cnf& cnf_;
  std::vector<int> value_;
  std::vector<std::vector<int>> watch_;
  std::vector<Var> trail_;
  std::size_t head_ = 0;
  long nodes_ = 0;
  long node_limit_ = -1;
};

}  // namespace detail

/// Decides `cnf` under the given assumption literals. A negative node limit
/// means no limit; otherwise Unknown is returned once it is reached.
inline DpllResult dpll_solve(const Cnf& cnf, const std::vector<Literal>& assumptions = {}, long node_limit = -1) {
  detail::Dpll solver(cnf);
  return solver.run(assumptions, node_limit);
}

}  // namespace isingsat

#endif  // ISINGSAT_DPLL_HPP
