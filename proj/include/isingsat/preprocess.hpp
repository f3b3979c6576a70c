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

// CNF simplification ladder for Ising targets.
//
// Every pass takes a Cnf by const reference and returns the simplified Cnf.
// Unsatisfiability is a value: a pass that derives a conflict returns a Cnf
// holding one empty clause (see make_unsat). Passes that assign or merge
// variables record that in a ConditionList so full assignments can be rebuilt
// with reconstruct().

#ifndef ISINGSAT_PREPROCESS_HPP
#define ISINGSAT_PREPROCESS_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "isingsat/circuit.hpp"
#include "isingsat/cnf.hpp"
#include "isingsat/vig.hpp"

namespace isingsat {

// ---------------------------------------------------------------------------
// Condition list

enum class VarRole { Unassigned, Master, Replaced };

struct FixedEntry {
  Var var;
  bool value;
  friend bool operator==(const FixedEntry&, const FixedEntry&) = default;
};

/// replaced == master when same_sign, replaced == !master otherwise.
struct Relation {
  Var replaced;
  Var master;
  bool same_sign;
  friend bool operator==(const Relation&, const Relation&) = default;
};

struct Resolved {
  Var root;
  bool same_sign;
};

class ConditionList {
 public:
  ConditionList() = default;
  explicit ConditionList(int num_vars)
      : fixed_index_(static_cast<std::size_t>(num_vars) + 1, -1),
        relation_index_(static_cast<std::size_t>(num_vars) + 1, -1),
        dependents_(static_cast<std::size_t>(num_vars) + 1, 0) {}

  int num_vars() const { return fixed_index_.empty() ? 0 : static_cast<int>(fixed_index_.size()) - 1; }

  /// Returns false if v is already fixed to the opposite value.
  bool fix(Var v, bool value) {
    int idx = fixed_index_.at(v);
    if (idx >= 0) return fixed_[idx].value == value;
    fixed_index_[v] = static_cast<int>(fixed_.size());
    fixed_.push_back({v, value});
    return true;
  }

  std::optional<bool> fixed_value(Var v) const {
    int idx = fixed_index_.at(v);
    if (idx < 0) return std::nullopt;
    return fixed_[idx].value;
  }
  bool is_fixed(Var v) const { return fixed_index_.at(v) >= 0; }

  VarRole role(Var v) const {
    if (relation_index_.at(v) >= 0) return VarRole::Replaced;
    return dependents_.at(v) > 0 ? VarRole::Master : VarRole::Unassigned;
  }

  const Relation* relation_of(Var v) const {
    int idx = relation_index_.at(v);
    return idx < 0 ? nullptr : &relations_[idx];
  }

  void relate(Var replaced, Var master, bool same_sign) {
    if (replaced == master) throw std::logic_error("relate: variable related to itself");
    if (relation_index_.at(replaced) >= 0) throw std::logic_error("relate: variable already replaced");
    if (relation_index_.at(master) >= 0) throw std::logic_error("relate: master is itself replaced");
    relation_index_[replaced] = static_cast<int>(relations_.size());
    relations_.push_back({replaced, master, same_sign});
    ++dependents_[master];
  }

  /// Follows master links to the root. Chains may exist until collapse().
  Resolved resolve(Var v) const {
    bool same = true;
    for (int idx = relation_index_.at(v); idx >= 0; idx = relation_index_[v]) {
      same = same == relations_[idx].same_sign;
      v = relations_[idx].master;
    }
    return {v, same};
  }

  /// Path compression: afterwards every relation names a root master.
  void collapse() {
    for (auto& r : relations_) {
      Resolved root = resolve(r.master);
      if (root.root == r.master) continue;
      --dependents_[r.master];
      r.same_sign = r.same_sign == root.same_sign;
      r.master = root.root;
      ++dependents_[r.master];
    }
  }

  const std::vector<FixedEntry>& fixed() const { return fixed_; }
  const std::vector<Relation>& relations() const { return relations_; }
  std::size_t size() const { return fixed_.size() + relations_.size(); }

  /// Variables that are neither fixed nor replaced.
  std::vector<Var> surviving_vars() const {
    std::vector<Var> out;
    for (Var v = 1; v <= num_vars(); ++v)
      if (!is_fixed(v) && role(v) != VarRole::Replaced) out.push_back(v);
    return out;
  }

  friend bool operator==(const ConditionList& a, const ConditionList& b) {
    return a.fixed_ == b.fixed_ && a.relations_ == b.relations_ && a.num_vars() == b.num_vars();
  }

 private:
  std::vector<FixedEntry> fixed_;
  std::vector<Relation> relations_;
  std::vector<int> fixed_index_;
  std::vector<int> relation_index_;
  std::vector<int> dependents_;
};

// ---------------------------------------------------------------------------
// Gate detection

using Signature = std::vector<int>;

struct GateGroup {
  std::vector<Var> vars;               ///< sorted distinct variables
  std::vector<std::size_t> clause_ids; ///< in CNF order
  Signature signature;                 ///< sorted negative-literal counts
};

inline int negative_count(const Clause& c) {
  return static_cast<int>(std::count_if(c.begin(), c.end(), [](Literal l) { return l.negated(); }));
}

inline std::vector<Var> clause_vars(const Clause& c) {
  std::vector<Var> vars;
  vars.reserve(c.size());
  for (Literal l : c) vars.push_back(l.var());
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

/// Groups clauses by their variable set, in order of first appearance.
inline std::vector<GateGroup> detect_gate_groups(const Cnf& cnf) {
  std::map<std::vector<Var>, std::size_t> index;
  std::vector<GateGroup> groups;
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
    auto vars = clause_vars(cnf.clauses[i]);
    auto [it, inserted] = index.try_emplace(vars, groups.size());
    if (inserted) groups.push_back(GateGroup{std::move(vars), {}, {}});
    auto& g = groups[it->second];
    g.clause_ids.push_back(i);
    g.signature.push_back(negative_count(cnf.clauses[i]));
  }
  for (auto& g : groups) std::sort(g.signature.begin(), g.signature.end());
  return groups;
}

/// Signature lookup for the canonical (uncomplemented-input) gate forms.
inline std::optional<GateKind> classify_signature(const Signature& s) {
  static const std::map<Signature, GateKind> table = {
      {{0, 2}, GateKind::Not},          {{1, 1}, GateKind::Buffer},     {{1, 1, 1, 2}, GateKind::Or},
      {{1, 2, 2, 2}, GateKind::And},    {{1, 1, 1, 3}, GateKind::Xor},  {{0, 2, 2, 2}, GateKind::Xnor},
      {{0, 1, 1, 3}, GateKind::Nand},   {{0, 2, 2, 3}, GateKind::Nor},
  };
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

/// A complete (Option-1) encoding of z = f(x, y) recovered from four clauses.
struct TwoInputGate {
  Var x, y, z;
  std::array<bool, 4> truth;  ///< f at (x,y) = 00, 01, 10, 11
  int ones() const { return static_cast<int>(std::count(truth.begin(), truth.end(), true)); }
};

/// Finds an output variable for which the four clauses each exclude one
/// distinct input row. Returns the first AND/OR-like reading if there is one.
inline std::optional<TwoInputGate> match_two_input_gate(const Cnf& cnf, const GateGroup& g) {
  if (g.vars.size() != 3 || g.clause_ids.size() != 4) return std::nullopt;
  for (auto id : g.clause_ids)
    if (cnf.clauses[id].size() != 3) return std::nullopt;
  std::optional<TwoInputGate> fallback;
  for (int zi = 0; zi < 3; ++zi) {
    Var z = g.vars[zi];
    Var x = g.vars[zi == 0 ? 1 : 0];
    Var y = g.vars[zi == 2 ? 1 : 2];
    std::array<int, 4> seen{0, 0, 0, 0};
    TwoInputGate gate{x, y, z, {}};
    bool ok = true;
    for (auto id : g.clause_ids) {
      bool ex = false, ey = false, ez = false;  // the excluded row
      for (Literal l : cnf.clauses[id]) {
        if (l.var() == x) ex = l.negated();
        if (l.var() == y) ey = l.negated();
        if (l.var() == z) ez = l.negated();
      }
      int row = (ex ? 2 : 0) + (ey ? 1 : 0);
      if (seen[row]++) {
        ok = false;
        break;
      }
      gate.truth[row] = !ez;
    }
    if (!ok) continue;
    if (gate.ones() == 1 || gate.ones() == 3) return gate;
    if (!fallback) fallback = gate;
  }
  return fallback;
}

inline std::vector<Clause> implication_encoding(const TwoInputGate& g) {
  const Literal z(g.z, false);
  if (g.ones() == 1) {
    int row = static_cast<int>(std::find(g.truth.begin(), g.truth.end(), true) - g.truth.begin());
    Literal lx(g.x, !(row & 2)), ly(g.y, !(row & 1));  // true exactly on the one-row
    return {{z, ~lx, ~ly}, {~z, lx}, {~z, ly}};
  }
  int row = static_cast<int>(std::find(g.truth.begin(), g.truth.end(), false) - g.truth.begin());
  Literal lx(g.x, (row & 2) != 0), ly(g.y, (row & 1) != 0);  // false exactly on the zero-row
  return {{~z, lx, ly}, {~lx, z}, {~ly, z}};
}

/// Replaces every Option-1 AND/OR/NAND/NOR group with its three-clause
/// implication form. XOR/XNOR groups have no such form and are kept.
inline Cnf reencode_option2(const Cnf& cnf) {
  std::vector<char> drop(cnf.clauses.size(), 0);
  std::map<std::size_t, std::vector<Clause>> insert_at;
  for (const auto& g : detect_gate_groups(cnf)) {
    auto gate = match_two_input_gate(cnf, g);
    if (!gate || (gate->ones() != 1 && gate->ones() != 3)) continue;
    for (auto id : g.clause_ids) drop[id] = 1;
    insert_at[g.clause_ids.front()] = implication_encoding(*gate);
  }
  Cnf out = cnf;
  out.clauses.clear();
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
    if (auto it = insert_at.find(i); it != insert_at.end())
      for (auto& c : it->second) out.clauses.push_back(c);
    if (!drop[i]) out.clauses.push_back(cnf.clauses[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1SAT propagation

inline bool has_unit_clause(const Cnf& cnf) {
  return std::any_of(cnf.clauses.begin(), cnf.clauses.end(), [](const Clause& c) { return c.size() == 1; });
}

/// Unit propagation to fixpoint. Assigned variables are recorded as fixed
/// entries; satisfied clauses are dropped and false literals removed.
inline Cnf propagate_1sat(const Cnf& cnf, ConditionList& cond) {
  if (has_empty_clause(cnf)) return make_unsat(cnf.num_vars);
  Cnf cur = cnf;
  std::vector<std::int8_t> value(static_cast<std::size_t>(cnf.num_vars) + 1, -1);
  for (;;) {
    bool any = false;
    for (const auto& c : cur.clauses) {
      if (c.size() != 1) continue;
      const Literal l = c.front();
      const std::int8_t want = l.negated() ? 0 : 1;
      if (value[l.var()] == want) continue;
      if (value[l.var()] != -1 || !cond.fix(l.var(), want == 1)) return make_unsat(cnf.num_vars);
      value[l.var()] = want;
      any = true;
    }
    if (!any) return cur;
    std::vector<Clause> next;
    next.reserve(cur.clauses.size());
    for (auto& c : cur.clauses) {
      bool sat = false;
      Clause kept;
      for (Literal l : c) {
        const std::int8_t v = value[l.var()];
        if (v == -1)
          kept.push_back(l);
        else if (l.holds(v == 1)) {
          sat = true;
          break;
        }
      }
      if (sat) continue;
      if (kept.empty()) return make_unsat(cnf.num_vars);
      next.push_back(std::move(kept));
    }
    cur.clauses = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// 2SAT conditioning

struct ConditioningStats {
  int traversals = 0;
  int not_pairs = 0;
  int buffer_pairs = 0;
  int triples = 0;
  int redundant = 0;
  int promotions = 0;
};

namespace detail {

/// Records lhs == rhs (same_sign) or lhs == !rhs. Returns false on contradiction.
inline bool record_condition(ConditionList& cond, Var lhs, Var rhs, bool same_sign, ConditioningStats& stats) {
  const Resolved ru = cond.resolve(lhs), rv = cond.resolve(rhs);
  // lhs = root_u ^ !su, rhs = root_v ^ !sv, lhs = rhs ^ !same
  const bool roots_same = (ru.same_sign == rv.same_sign) == same_sign;
  if (ru.root == rv.root) {
    if (!roots_same) return false;
    ++stats.redundant;
    return true;
  }
  const bool mu = cond.role(ru.root) == VarRole::Master;
  const bool mv = cond.role(rv.root) == VarRole::Master;
  Var keep, drop;
  if (mu != mv) {
    keep = mu ? ru.root : rv.root;  // an unassigned root joins the existing master
    drop = mu ? rv.root : ru.root;
  } else {
    keep = std::min(ru.root, rv.root);  // lower index is master, or grand master
    drop = std::max(ru.root, rv.root);
    if (mu) ++stats.promotions;
  }
  cond.relate(drop, keep, roots_same);
  return true;
}

}  // namespace detail

/// Removes NOT/BUFFER clause pairs and records them as conditions, in exactly
/// two traversals of the clause list. Three distinct 2-clauses over one
/// variable pair become two unit clauses appended to the result.
inline Cnf condition_2sat(const Cnf& cnf, ConditionList& cond, ConditioningStats* stats_out = nullptr) {
  ConditioningStats stats;
  if (has_empty_clause(cnf)) return make_unsat(cnf.num_vars);

  // Traversal 1: bucket two-variable binary clauses by variable pair.
  struct PairGroup {
    std::vector<std::size_t> ids;
    std::array<bool, 4> present{false, false, false, false};  // by (neg_lo, neg_hi)
  };
  std::map<std::pair<Var, Var>, PairGroup> pairs;
  std::vector<std::pair<Var, Var>> order;
  ++stats.traversals;
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
    const Clause& c = cnf.clauses[i];
    if (c.size() != 2 || c[0].var() == c[1].var()) continue;
    Literal lo = c[0], hi = c[1];
    if (lo.var() > hi.var()) std::swap(lo, hi);
    auto key = std::make_pair(lo.var(), hi.var());
    auto [it, inserted] = pairs.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.ids.push_back(i);
    it->second.present[(lo.negated() ? 2 : 0) + (hi.negated() ? 1 : 0)] = true;
  }

  std::vector<char> drop(cnf.clauses.size(), 0);
  std::vector<Clause> units;
  for (const auto& key : order) {
    const PairGroup& g = pairs[key];
    const int distinct = static_cast<int>(std::count(g.present.begin(), g.present.end(), true));
    const auto [lo, hi] = key;
    if (distinct == 4) return make_unsat(cnf.num_vars);
    if (distinct == 3) {
      int free_row = static_cast<int>(std::find(g.present.begin(), g.present.end(), false) - g.present.begin());
      // clause with negation pattern (nl, nh) excludes lo = nl, hi = nh
      units.push_back({Literal(lo, (free_row & 2) == 0)});
      units.push_back({Literal(hi, (free_row & 1) == 0)});
      ++stats.triples;
    } else if (distinct == 2 && g.present[0] && g.present[3]) {
      if (!detail::record_condition(cond, hi, lo, false, stats)) return make_unsat(cnf.num_vars);
      ++stats.not_pairs;
    } else if (distinct == 2 && g.present[1] && g.present[2]) {
      if (!detail::record_condition(cond, hi, lo, true, stats)) return make_unsat(cnf.num_vars);
      ++stats.buffer_pairs;
    } else {
      continue;
    }
    for (auto id : g.ids) drop[id] = 1;
  }
  cond.collapse();

  // Traversal 2: substitute replaced variables by their masters.
  ++stats.traversals;
  auto substitute = [&](Literal l) {
    if (cond.role(l.var()) != VarRole::Replaced) return l;
    Resolved r = cond.resolve(l.var());
    return Literal(r.root, l.negated() == r.same_sign);
  };
  Cnf out = cnf;
  out.clauses.clear();
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
    if (drop[i]) continue;
    Clause c = cnf.clauses[i];
    for (auto& l : c) l = substitute(l);
    out.clauses.push_back(std::move(c));
  }
  for (auto& u : units) out.clauses.push_back({substitute(u.front())});
  if (stats_out) *stats_out = stats;
  return out;
}

// ---------------------------------------------------------------------------
// Replaced value propagation

/// Fixes every replaced variable whose master is fixed, cascading through
/// uncollapsed chains. Returns the number of newly fixed variables.
inline int propagate_replaced_values_inplace(ConditionList& cond) {
  int added = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : cond.relations()) {
      if (cond.is_fixed(r.replaced)) continue;
      auto mv = cond.fixed_value(r.master);
      if (!mv) continue;
      cond.fix(r.replaced, r.same_sign ? *mv : !*mv);
      ++added;
      changed = true;
    }
  }
  return added;
}

inline ConditionList propagate_replaced_values(ConditionList cond) {
  propagate_replaced_values_inplace(cond);
  return cond;
}

// ---------------------------------------------------------------------------
// Clause cleaning, subsumption, pure literals

/// Drops repeated literals and removes tautological clauses.
inline Cnf clean_clauses(const Cnf& cnf) {
  Cnf out = cnf;
  out.clauses.clear();
  for (const auto& c : cnf.clauses) {
    Clause kept;
    bool tautology = false;
    for (Literal l : c) {
      if (std::find(kept.begin(), kept.end(), ~l) != kept.end()) {
        tautology = true;
        break;
      }
      if (std::find(kept.begin(), kept.end(), l) == kept.end()) kept.push_back(l);
    }
    if (!tautology) out.clauses.push_back(std::move(kept));
  }
  return out;
}

/// Removes every clause whose literal set contains another clause's literal
/// set. Of two identical clauses the first is kept.
inline Cnf subsume(const Cnf& cnf) {
  const std::size_t m = cnf.clauses.size();
  std::vector<Clause> sets(m);
  for (std::size_t i = 0; i < m; ++i) {
    sets[i] = cnf.clauses[i];
    std::sort(sets[i].begin(), sets[i].end());
    sets[i].erase(std::unique(sets[i].begin(), sets[i].end()), sets[i].end());
  }
  auto slot = [&](Literal l) { return static_cast<std::size_t>(2 * l.var() + (l.negated() ? 1 : 0)); };
  std::vector<std::vector<std::size_t>> occurs(2 * static_cast<std::size_t>(cnf.num_vars) + 2);
  for (std::size_t i = 0; i < m; ++i)
    for (Literal l : sets[i]) occurs[slot(l)].push_back(i);

  std::vector<char> removed(m, 0);
  for (std::size_t d = 0; d < m; ++d) {
    if (sets[d].empty()) continue;
    Literal pivot = *std::min_element(sets[d].begin(), sets[d].end(), [&](Literal a, Literal b) {
      return occurs[slot(a)].size() < occurs[slot(b)].size();
    });
    for (std::size_t c : occurs[slot(pivot)]) {
      if (c == d || removed[c] || sets[c].size() < sets[d].size()) continue;
      if (sets[c].size() == sets[d].size() && c < d) continue;  // identical sets: keep the first
      if (std::includes(sets[c].begin(), sets[c].end(), sets[d].begin(), sets[d].end())) removed[c] = 1;
    }
  }
  Cnf out = cnf;
  out.clauses.clear();
  for (std::size_t i = 0; i < m; ++i)
    if (!removed[i]) out.clauses.push_back(cnf.clauses[i]);
  return out;
}

/// Fixes single-polarity variables to their satisfying value and removes
/// their clauses, to fixpoint.
inline Cnf eliminate_pure_literals(const Cnf& cnf, ConditionList& cond) {
  Cnf cur = cnf;
  for (;;) {
    std::vector<std::uint8_t> polarity(static_cast<std::size_t>(cnf.num_vars) + 1, 0);  // bit0 pos, bit1 neg
    for (const auto& c : cur.clauses)
      for (Literal l : c) polarity[l.var()] |= l.negated() ? 2 : 1;
    std::vector<std::int8_t> pure(polarity.size(), -1);
    bool any = false;
    for (Var v = 1; v <= cnf.num_vars; ++v) {
      if (polarity[v] == 1 || polarity[v] == 2) {
        pure[v] = polarity[v] == 1 ? 1 : 0;
        cond.fix(v, pure[v] == 1);
        any = true;
      }
    }
    if (!any) return cur;
    std::vector<Clause> next;
    for (auto& c : cur.clauses) {
      bool hit = std::any_of(c.begin(), c.end(), [&](Literal l) { return pure[l.var()] != -1; });
      if (!hit) next.push_back(std::move(c));
    }
    cur.clauses = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Tightly-constrained variable branching

struct BranchGuess {
  Var var;
  bool value;
  friend bool operator==(const BranchGuess&, const BranchGuess&) = default;
};

struct BranchRecord {
  std::vector<BranchGuess> guesses;
  /// Propagating the guesses derived a conflict: this branch has no solution.
  bool closed = false;
  friend bool operator==(const BranchRecord&, const BranchRecord&) = default;
};

struct BranchOptions {
  double degree_factor = 1.5;  ///< candidate needs degree >= factor * mean degree
  int max_vars = 1;
  std::optional<bool> forced_value;  ///< overrides the random guess
};

/// Variables eligible for branching, highest degree first.
inline std::vector<Var> tight_variables(const Cnf& cnf, const BranchOptions& opts = {}) {
  Vig vig(cnf);
  const double threshold = opts.degree_factor * vig.mean_degree();
  std::vector<Var> cands;
  for (Var v : vig.nodes())
    if (vig.degree(v) > 0 && vig.degree(v) >= threshold) cands.push_back(v);
  std::stable_sort(cands.begin(), cands.end(), [&](Var a, Var b) { return vig.degree(a) > vig.degree(b); });
  if (static_cast<int>(cands.size()) > opts.max_vars) cands.resize(static_cast<std::size_t>(opts.max_vars));
  return cands;
}

struct BranchOutcome {
  Cnf cnf;
  BranchRecord record;
};

inline BranchOutcome branch_tight_variable(const Cnf& cnf, ConditionList& cond, std::uint64_t seed,
                                           const BranchOptions& opts = {}) {
  BranchOutcome out{cnf, {}};
  std::mt19937_64 rng(seed);
  for (Var v : tight_variables(cnf, opts)) {
    bool value = opts.forced_value ? *opts.forced_value : (rng() >> 63) != 0;
    out.record.guesses.push_back({v, value});
    out.cnf.clauses.push_back({Literal(v, !value)});
  }
  out.cnf = propagate_1sat(out.cnf, cond);
  out.record.closed = has_empty_clause(out.cnf);
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction

/// Rebuilds a complete assignment over the original variables. Values of
/// fixed and replaced variables in `reduced` are ignored; variables that
/// nothing constrains default to false.
inline Assignment reconstruct(const Assignment& reduced, const ConditionList& cond, const BranchRecord& branch = {}) {
  const int n = cond.num_vars();
  Assignment out(n);
  for (Var v = 1; v <= std::min(n, reduced.num_vars()); ++v)
    if (reduced.is_assigned(v) && !cond.is_fixed(v) && cond.role(v) != VarRole::Replaced) out.set(v, reduced[v]);
  for (const auto& f : cond.fixed()) out.set(f.var, f.value);
  for (const auto& g : branch.guesses) out.set(g.var, g.value);
  for (const auto& r : cond.relations()) {
    if (cond.is_fixed(r.replaced)) continue;
    Resolved root = cond.resolve(r.replaced);
    if (!out.is_assigned(root.root))
      throw std::invalid_argument("reconstruct: no value for master variable " + std::to_string(root.root));
    out.set(r.replaced, root.same_sign ? out[root.root] : !out[root.root]);
  }
  for (Var v = 1; v <= n; ++v)
    if (!out.is_assigned(v)) out.set(v, false);
  return out;
}

// ---------------------------------------------------------------------------
// The ladder

enum class PassKind {
  Original,
  Option2Encoding,
  UnitPropagation,
  TwoSatConditioning,
  ReplacedValuePropagation,
  ClauseCleaning,
  Subsumption,
  PureLiteral,
  Branching,
};

inline const char* to_string(PassKind p) {
  switch (p) {
    case PassKind::Original: return "original";
    case PassKind::Option2Encoding: return "cnf_encodings";
    case PassKind::UnitPropagation: return "1sat_propagation";
    case PassKind::TwoSatConditioning: return "2sat_conditioning";
    case PassKind::ReplacedValuePropagation: return "replaced_value_propagation";
    case PassKind::ClauseCleaning: return "clause_cleaning";
    case PassKind::Subsumption: return "subsumption";
    case PassKind::PureLiteral: return "pure_literal";
    case PassKind::Branching: return "branching";
  }
  return "?";
}

/// Preprocessing level of a pass; subsumption and pure literal share level 6.
inline int level_of(PassKind p) {
  switch (p) {
    case PassKind::Original: return 0;
    case PassKind::Option2Encoding: return 1;
    case PassKind::UnitPropagation: return 2;
    case PassKind::TwoSatConditioning: return 3;
    case PassKind::ReplacedValuePropagation: return 4;
    case PassKind::ClauseCleaning: return 5;
    case PassKind::Subsumption:
    case PassKind::PureLiteral: return 6;
    case PassKind::Branching: return 7;
  }
  return 0;
}

constexpr int kMaxLevel = 7;

struct PassReport {
  std::string pass;
  int level = 0;
  int vars_before = 0;
  int vars_after = 0;
  std::size_t clauses_before = 0;
  std::size_t clauses_after = 0;
  int new_unit_clauses = 0;
  int conditions_added = 0;
  double wall_time = 0.0;  ///< seconds
};

struct LadderOptions {
  BranchOptions branch;
};

struct LadderResult {
  Cnf cnf;
  ConditionList cond;
  BranchRecord branch;
  std::vector<PassReport> reports;
  bool unsat = false;
};

namespace detail {

inline int count_units(const Cnf& cnf) {
  return static_cast<int>(
      std::count_if(cnf.clauses.begin(), cnf.clauses.end(), [](const Clause& c) { return c.size() == 1; }));
}

class LadderRun {
 public:
  LadderRun(const Cnf& cnf) : cnf_(cnf), cond_(cnf.num_vars) {}

  /// Re-applies every enabled pass up to `stage` until nothing changes.
  void settle(PassKind stage) {
    auto enabled = [&](PassKind p) { return static_cast<int>(p) <= static_cast<int>(stage); };
    while (!unsat_) {
      if (enabled(PassKind::UnitPropagation) && has_unit_clause(cnf_)) {
        apply(propagate_1sat(cnf_, cond_));
        continue;
      }
      if (enabled(PassKind::TwoSatConditioning) && try_apply(condition_2sat(cnf_, cond_))) continue;
      if (enabled(PassKind::ClauseCleaning) && try_apply(clean_clauses(cnf_))) continue;
      if (enabled(PassKind::Subsumption) && try_apply(subsume(cnf_))) continue;
      if (enabled(PassKind::PureLiteral) && try_apply(eliminate_pure_literals(cnf_, cond_))) continue;
      break;
    }
    if (!unsat_ && enabled(PassKind::ReplacedValuePropagation)) propagate_replaced_values_inplace(cond_);
  }

  void run_pass(PassKind pass, std::uint64_t seed, const LadderOptions& opts) {
    PassReport rep;
    rep.pass = to_string(pass);
    rep.level = level_of(pass);
    rep.vars_before = count_occurring_vars(cnf_);
    rep.clauses_before = cnf_.clauses.size();
    const std::size_t cond_before = cond_.size();
    const auto t0 = std::chrono::steady_clock::now();

    if (!unsat_) {
      switch (pass) {
        case PassKind::Original: break;
        case PassKind::Option2Encoding: apply(reencode_option2(cnf_)); break;
        case PassKind::UnitPropagation: apply(propagate_1sat(cnf_, cond_)); break;
        case PassKind::TwoSatConditioning: apply(condition_2sat(cnf_, cond_)); break;
        case PassKind::ReplacedValuePropagation: propagate_replaced_values_inplace(cond_); break;
        case PassKind::ClauseCleaning: apply(clean_clauses(cnf_)); break;
        case PassKind::Subsumption: apply(subsume(cnf_)); break;
        case PassKind::PureLiteral: apply(eliminate_pure_literals(cnf_, cond_)); break;
        case PassKind::Branching: {
          auto outcome = branch_tight_variable(cnf_, cond_, seed, opts.branch);
          branch_ = outcome.record;
          apply(std::move(outcome.cnf));
          break;
        }
      }
      rep.new_unit_clauses = unsat_ ? 0 : count_units(cnf_);
      if (pass != PassKind::Original && pass != PassKind::Option2Encoding) settle(pass);
    }

    rep.vars_after = count_occurring_vars(cnf_);
    rep.clauses_after = cnf_.clauses.size();
    rep.conditions_added = static_cast<int>(cond_.size() - cond_before);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    reports_.push_back(std::move(rep));
  }

  LadderResult finish() && {
    return LadderResult{std::move(cnf_), std::move(cond_), std::move(branch_), std::move(reports_), unsat_};
  }

 private:
  void apply(Cnf next) {
    cnf_ = std::move(next);
    if (has_empty_clause(cnf_)) unsat_ = true;
  }
  bool try_apply(Cnf next) {
    if (next == cnf_) return false;
    apply(std::move(next));
    return true;
  }

  Cnf cnf_;
  ConditionList cond_;
  BranchRecord branch_;
  std::vector<PassReport> reports_;
  bool unsat_ = false;
};

}  // namespace detail

/// Passes applied at a level, in ladder order.
inline std::vector<PassKind> ladder_passes(int level) {
  std::vector<PassKind> out;
  for (int p = static_cast<int>(PassKind::Option2Encoding); p <= static_cast<int>(PassKind::Branching); ++p)
    if (level_of(static_cast<PassKind>(p)) <= level) out.push_back(static_cast<PassKind>(p));
  return out;
}

/// Applies the cumulative ladder up to `level`. One report per pass; a pass
/// that creates unit clauses (or new NOT/BUFFER pairs, duplicates, ...) is
/// followed by the enabled earlier passes until the formula settles.
inline LadderResult run_ladder(const Cnf& cnf, int level, std::uint64_t seed, const LadderOptions& opts = {}) {
  if (level < 0 || level > kMaxLevel) throw std::invalid_argument("run_ladder: level must be in [0, 7]");
  detail::LadderRun run(cnf);
  if (level == 0) run.run_pass(PassKind::Original, seed, opts);
  for (PassKind p : ladder_passes(level)) run.run_pass(p, seed, opts);
  return std::move(run).finish();
}

}  // namespace isingsat

#endif  // ISINGSAT_PREPROCESS_HPP
