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

// (Max)SAT to QUBO and Ising conversion.
//
// QUBO variables are 0-indexed: CNF variable v maps to index v-1 and the
// ancilla of the k-th three-literal clause to num_vars + k. Each clause
// contributes a penalty that is 0 when the clause holds and exactly 1 when it
// is falsified (minimised over its ancilla), so the minimum energy of a model
// equals the minimum number of falsified clauses.

#ifndef ISINGSAT_QUBO_HPP
#define ISINGSAT_QUBO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isingsat/cnf.hpp"

namespace isingsat {

using Bits = std::vector<std::uint8_t>;
using Spins = std::vector<std::int8_t>;

struct QuboModel {
  int num_vars = 0;
  std::map<int, double> linear;
  std::map<std::pair<int, int>, double> quadratic;  ///< keys have i < j
  double offset = 0.0;
  std::map<std::size_t, int> ancilla_map;           ///< clause index -> ancilla
  std::vector<Var> source_var;                      ///< QUBO index -> CNF var, 0 for ancillas

  void add_linear(int i, double c) {
    if (c != 0.0) linear[i] += c;
  }
  void add_quadratic(int i, int j, double c) {
    if (c == 0.0) return;
    if (i == j) {  // x*x == x
      add_linear(i, c);
      return;
    }
    quadratic[{std::min(i, j), std::max(i, j)}] += c;
  }

  double energy(const Bits& x) const {
    double e = offset;
    for (const auto& [i, c] : linear) e += c * x.at(i);
    for (const auto& [ij, c] : quadratic) e += c * x.at(ij.first) * x.at(ij.second);
    return e;
  }

  std::size_t num_ancillas() const { return ancilla_map.size(); }
};

struct IsingModel {
  int num_spins = 0;
  std::map<int, double> h;
  std::map<std::pair<int, int>, double> J;  ///< keys have i < j
  double offset = 0.0;

  double energy(const Spins& s) const {
    double e = offset;
    for (const auto& [i, c] : h) e += c * s.at(i);
    for (const auto& [ij, c] : J) e += c * s.at(ij.first) * s.at(ij.second);
    return e;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [i, c] : h) m = std::max(m, std::abs(c));
    for (const auto& [ij, c] : J) m = std::max(m, std::abs(c));
    return m;
  }
};

inline Spins bits_to_spins(const Bits& x) {
  Spins s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? 1 : -1;
  return s;
}

inline Bits spins_to_bits(const Spins& s) {
  Bits x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) x[i] = s[i] > 0 ? 1 : 0;
  return x;
}

struct ChipProfile {
  int spin_budget = 45;
  int coeff_min = -14;
  int coeff_max = 14;
  bool all_to_all = true;

  void validate() const {
    if (spin_budget <= 0) throw std::invalid_argument("chip profile: spin budget must be positive");
    if (!(coeff_min < 0 && 0 < coeff_max)) throw std::invalid_argument("chip profile: need coeff_min < 0 < coeff_max");
  }
};

// ---------------------------------------------------------------------------
// Clause gadgets

/// Adds the penalty of one clause to `q`. A literal l contributes y = x for a
/// positive literal and y = 1 - x for a negative one; with k literals
///   width 1: 1 - y1
///   width 2: 1 - y1 - y2 + y1 y2
///   width 3: 1 - Σy + Σ_{i<j} y_i y_j + w (2 - Σy)
/// where w is a fresh ancilla. Returns the ancilla index, or -1.
inline int clause_gadget(const Clause& clause, QuboModel& q, int& next_ancilla) {
  if (clause.empty()) throw std::invalid_argument("clause_gadget: empty clause");
  if (clause.size() > 3) throw std::invalid_argument("clause_gadget: clause width exceeds 3");

  // y = s*x + t with (s, t) = (1, 0) or (-1, 1)
  struct Affine {
    int idx;
    double s, t;
  };
  std::vector<Affine> ys;
  for (Literal l : clause) ys.push_back({l.var() - 1, l.negated() ? -1.0 : 1.0, l.negated() ? 1.0 : 0.0});

  auto add_y = [&](const Affine& y, double c) {  // c * y
    q.offset += c * y.t;
    q.add_linear(y.idx, c * y.s);
  };
  auto add_yy = [&](const Affine& a, const Affine& b, double c) {  // c * ya * yb
    q.offset += c * a.t * b.t;
    q.add_linear(a.idx, c * a.s * b.t);
    q.add_linear(b.idx, c * b.s * a.t);
    q.add_quadratic(a.idx, b.idx, c * a.s * b.s);
  };

  q.offset += 1.0;
  for (const auto& y : ys) add_y(y, -1.0);
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (std::size_t j = i + 1; j < ys.size(); ++j) add_yy(ys[i], ys[j], 1.0);
  if (ys.size() < 3) return -1;

  const int w = next_ancilla++;
  q.add_linear(w, 2.0);
  const Affine wy{w, 1.0, 0.0};
  for (const auto& y : ys) add_yy(wy, y, -1.0);
  return w;
}

namespace detail {
inline void prune_zeros(QuboModel& q) {
  std::erase_if(q.linear, [](const auto& kv) { return kv.second == 0.0; });
  std::erase_if(q.quadratic, [](const auto& kv) { return kv.second == 0.0; });
}
}  // namespace detail

inline int count_wide_clauses(const Cnf& cnf) {
  return static_cast<int>(
      std::count_if(cnf.clauses.begin(), cnf.clauses.end(), [](const Clause& c) { return c.size() == 3; }));
}

/// Sum of clause gadgets. Uses num_vars + (#three-literal clauses) variables.
inline QuboModel cnf_to_qubo(const Cnf& cnf) {
  QuboModel q;
  q.num_vars = cnf.num_vars + count_wide_clauses(cnf);
  q.source_var.assign(static_cast<std::size_t>(q.num_vars), 0);
  for (Var v = 1; v <= cnf.num_vars; ++v) q.source_var[v - 1] = v;
  int next = cnf.num_vars;
  for (std::size_t k = 0; k < cnf.clauses.size(); ++k) {
    int w = clause_gadget(cnf.clauses[k], q, next);
    if (w >= 0) q.ancilla_map[k] = w;
  }
  detail::prune_zeros(q);
  return q;
}

/// Penalty of `cnf` at assignment `x` over CNF variables with the ancillas
/// chosen optimally: equals the number of falsified clauses.
inline Bits optimal_ancillas(const QuboModel& q, const Cnf& cnf, Bits x) {
  x.resize(static_cast<std::size_t>(q.num_vars), 0);
  for (const auto& [k, w] : q.ancilla_map) {
    int trues = 0;
    for (Literal l : cnf.clauses[k]) trues += l.holds(x[l.var() - 1] != 0) ? 1 : 0;
    // w=0 costs 1-k+C(k,2), w=1 costs 3-2k+C(k,2) for k true literals
    x[w] = trues >= 2 ? 1 : 0;
  }
  return x;
}

// ---------------------------------------------------------------------------
// QUBO <-> Ising

/// Substitutes x_i = (1 + s_i) / 2. Energies agree exactly for every state.
inline IsingModel qubo_to_ising(const QuboModel& q) {
  IsingModel m;
  m.num_spins = q.num_vars;
  m.offset = q.offset;
  for (const auto& [i, a] : q.linear) {
    m.h[i] += a / 2.0;
    m.offset += a / 2.0;
  }
  for (const auto& [ij, b] : q.quadratic) {
    m.J[ij] += b / 4.0;
    m.h[ij.first] += b / 4.0;
    m.h[ij.second] += b / 4.0;
    m.offset += b / 4.0;
  }
  std::erase_if(m.h, [](const auto& kv) { return kv.second == 0.0; });
  std::erase_if(m.J, [](const auto& kv) { return kv.second == 0.0; });
  return m;
}

/// Inverse substitution s_i = 2 x_i - 1.
inline QuboModel ising_to_qubo(const IsingModel& m) {
  QuboModel q;
  q.num_vars = m.num_spins;
  q.offset = m.offset;
  for (const auto& [i, c] : m.h) {
    q.add_linear(i, 2.0 * c);
    q.offset -= c;
  }
  for (const auto& [ij, c] : m.J) {
    q.add_quadratic(ij.first, ij.second, 4.0 * c);
    q.add_linear(ij.first, -2.0 * c);
    q.add_linear(ij.second, -2.0 * c);
    q.offset += c;
  }
  detail::prune_zeros(q);
  return q;
}

// ---------------------------------------------------------------------------
// Chip scaling

struct Distortion {
  double scale = 1.0;
  double max_relative_error = 0.0;  ///< over nonzero scaled coefficients
  int clamped = 0;
  int zeroed = 0;                   ///< nonzero coefficients rounded to 0
  bool levels_collapsed = false;    ///< zeroed > 0 or fewer distinct magnitudes
};

struct ScaledIsing {
  IsingModel model;
  Distortion distortion;
};

/// Maps the model onto the chip's integer coefficient range: uniform positive
/// scaling so that max|coeff| hits the range limit, then round half away from
/// zero and clamp. Models that already fit are returned unchanged.
inline ScaledIsing scale_to_chip(const IsingModel& m, const ChipProfile& chip = {}) {
  chip.validate();
  if (m.num_spins > chip.spin_budget)
    throw std::invalid_argument("scale_to_chip: " + std::to_string(m.num_spins) + " spins exceed budget " +
                                std::to_string(chip.spin_budget));
  auto fits = [&](double c) { return c == std::round(c) && c >= chip.coeff_min && c <= chip.coeff_max; };
  bool all_fit = true;
  for (const auto& [i, c] : m.h) all_fit = all_fit && fits(c);
  for (const auto& [ij, c] : m.J) all_fit = all_fit && fits(c);
  ScaledIsing out{m, {}};
  if (all_fit) return out;

  const double limit = std::min<double>(chip.coeff_max, -chip.coeff_min);
  const double maxc = m.max_abs_coeff();
  const double scale = maxc > 0.0 ? limit / maxc : 1.0;
  Distortion& d = out.distortion;
  d.scale = scale;
  std::set<double> before, after;
  auto convert = [&](double c) {
    const double scaled = c * scale;
    double r = std::round(scaled);
    if (r > chip.coeff_max || r < chip.coeff_min) {
      r = std::clamp(r, static_cast<double>(chip.coeff_min), static_cast<double>(chip.coeff_max));
      ++d.clamped;
    }
    if (scaled != 0.0) d.max_relative_error = std::max(d.max_relative_error, std::abs(r - scaled) / std::abs(scaled));
    if (c != 0.0 && r == 0.0) ++d.zeroed;
    before.insert(std::abs(c));
    after.insert(std::abs(r));
    return r;
  };
  for (auto& [i, c] : out.model.h) c = convert(c);
  for (auto& [ij, c] : out.model.J) c = convert(c);
  out.model.offset = m.offset * scale;
  d.levels_collapsed = d.zeroed > 0 || after.size() < before.size();
  std::erase_if(out.model.h, [](const auto& kv) { return kv.second == 0.0; });
  std::erase_if(out.model.J, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

// ---------------------------------------------------------------------------
// Export

/// Sparse triplets "i j value", one per line; diagonal entries carry the
/// linear terms. The offset is written as a comment.
inline std::string to_triplets(const QuboModel& q) {
  std::ostringstream os;
  os.precision(17);
  os << "# vars " << q.num_vars << " offset " << q.offset << '\n';
  for (const auto& [i, c] : q.linear) os << i << ' ' << i << ' ' << c << '\n';
  for (const auto& [ij, c] : q.quadratic) os << ij.first << ' ' << ij.second << ' ' << c << '\n';
  return os.str();
}

}  // namespace isingsat

#endif  // ISINGSAT_QUBO_HPP
