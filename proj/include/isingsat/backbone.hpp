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

// Random 3-SAT with a planted backbone, standing in for the SATLIB
// controlled-backbone-size (CBS) sets when those files are not at hand.
//
// A hidden assignment sigma is drawn together with a backbone set B. Witness
// assignments agree with sigma on B and disagree with it on every other
// variable, and all random clauses are satisfied by sigma and the witnesses,
// so no variable outside B can be a backbone variable. Each v in B is then
// pinned: while the DPLL solver finds a model tau with tau(v) != sigma(v), a
// random clause is replaced by one that sigma satisfies through v and tau
// falsifies.

#ifndef ISINGSAT_BACKBONE_HPP
#define ISINGSAT_BACKBONE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "isingsat/cnf.hpp"
#include "isingsat/dpll.hpp"

namespace isingsat {

inline constexpr std::array<int, 8> kCbsClauseCounts{403, 411, 418, 423, 429, 435, 441, 449};
inline constexpr std::array<int, 5> kCbsBackbonePercent{10, 30, 50, 70, 90};
inline constexpr int kCbsVars = 100;

struct BackboneSpec {
  int n = kCbsVars;
  int m = 429;
  int backbone_percent = 50;
  int witnesses = 1;
  int retry_budget = 5000;  ///< total clause replacements before giving up

  int backbone_size() const {
    return static_cast<int>(std::ceil(backbone_percent * static_cast<double>(n) / 100.0 - 1e-9));
  }

  bool on_cbs_grid() const {
    return n == kCbsVars &&
           std::find(kCbsClauseCounts.begin(), kCbsClauseCounts.end(), m) != kCbsClauseCounts.end() &&
           std::find(kCbsBackbonePercent.begin(), kCbsBackbonePercent.end(), backbone_percent) !=
               kCbsBackbonePercent.end();
  }

  /// Same clause density as a CBS clause count, at a different variable count.
  static BackboneSpec scaled(int n, int cbs_clause_count, int backbone_percent) {
    BackboneSpec s;
    s.n = n;
    s.m = static_cast<int>(std::lround(cbs_clause_count * static_cast<double>(n) / kCbsVars));
    s.backbone_percent = backbone_percent;
    return s;
  }
};

struct BackboneInstance {
  Cnf cnf;
  Assignment planted;
  std::vector<Var> backbone;  ///< ascending
  int replacements = 0;
};

inline BackboneInstance generate_backbone_instance(const BackboneSpec& spec, std::uint64_t seed, bool force = false) {
  if (!force && !spec.on_cbs_grid())
    throw std::invalid_argument("backbone spec n=" + std::to_string(spec.n) + " m=" + std::to_string(spec.m) +
                                " b=" + std::to_string(spec.backbone_percent) + "% is off the CBS grid");
  if (spec.n < 3 || spec.m < 1) throw std::invalid_argument("backbone spec: need n >= 3 and m >= 1");
  if (spec.backbone_percent < 0 || spec.backbone_percent > 100)
    throw std::invalid_argument("backbone spec: percentage out of range");

  std::mt19937_64 rng(seed);
  auto coin = [&] { return (rng() >> 63) != 0; };
  auto below = [&](int k) { return static_cast<int>(rng() % static_cast<std::uint64_t>(k)); };

  BackboneInstance out;
  out.planted = Assignment(spec.n);
  for (Var v = 1; v <= spec.n; ++v) out.planted.set(v, coin());
  std::vector<Var> perm(static_cast<std::size_t>(spec.n));
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(static_cast<std::size_t>(spec.backbone_size()));
  std::sort(perm.begin(), perm.end());
  out.backbone = perm;
  std::vector<char> in_backbone(static_cast<std::size_t>(spec.n) + 1, 0);
  for (Var v : out.backbone) in_backbone[v] = 1;

  // the first witness flips every non-backbone variable; later ones are random there
  std::vector<Assignment> keep{out.planted};
  for (int w = 0; w < std::max(spec.witnesses, 1); ++w) {
    Assignment a = out.planted;
    for (Var v = 1; v <= spec.n; ++v)
      if (!in_backbone[v]) a.set(v, w == 0 ? !out.planted[v] : coin());
    keep.push_back(std::move(a));
  }
  auto keeps_all = [&](const Clause& c) {
    return std::all_of(keep.begin(), keep.end(), [&](const Assignment& a) { return clause_satisfied(c, a); });
  };

  Cnf& cnf = out.cnf;
  cnf.num_vars = spec.n;
  for (int tries = 0; static_cast<int>(cnf.clauses.size()) < spec.m; ++tries) {
    if (tries > 1000 * spec.m) throw std::runtime_error("backbone generator: cannot sample admissible clauses");
    Var a = 1 + below(spec.n), b = 1 + below(spec.n), c = 1 + below(spec.n);
    if (a == b || b == c || a == c) continue;
    Clause cl{Literal(a, coin()), Literal(b, coin()), Literal(c, coin())};
    if (keeps_all(cl)) cnf.clauses.push_back(std::move(cl));
  }

  std::vector<char> pinned(cnf.clauses.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (Var v : out.backbone) {
      for (;;) {
        DpllResult r = dpll_solve(cnf, {Literal(v, out.planted[v])});
        if (r.status == SatStatus::Unsat) break;
        if (r.status != SatStatus::Sat || ++out.replacements > spec.retry_budget)
          throw std::runtime_error("backbone generator: retry budget exhausted");
        std::vector<std::size_t> free_slots;
        for (std::size_t k = 0; k < pinned.size(); ++k)
          if (!pinned[k]) free_slots.push_back(k);
        if (free_slots.empty()) throw std::runtime_error("backbone generator: no replaceable clause left");
        // prefer backbone variables on which tau already agrees with sigma:
        // once B is pinned the new clause then excludes every flip of v
        std::vector<Var> agree;
        for (Var u : out.backbone)
          if (u != v && r.model[u] == out.planted[u]) agree.push_back(u);
        Var x, y;
        if (agree.size() >= 2) {
          std::shuffle(agree.begin(), agree.end(), rng);
          x = agree[0];
          y = agree[1];
        } else {
          do x = 1 + below(spec.n); while (x == v);
          do y = 1 + below(spec.n); while (y == v || y == x);
        }
        const std::size_t slot = free_slots[rng() % free_slots.size()];
        cnf.clauses[slot] = {Literal(v, !out.planted[v]), Literal(x, r.model[x]), Literal(y, r.model[y])};
        pinned[slot] = 1;
        changed = true;
      }
    }
  }

  cnf.provenance = "backbone-n" + std::to_string(spec.n) + "-m" + std::to_string(spec.m) + "-b" +
                   std::to_string(spec.backbone_percent) + "-s" + std::to_string(seed);
  cnf.comments.push_back("planted backbone size " + std::to_string(out.backbone.size()));
  return out;
}

}  // namespace isingsat

#endif  // ISINGSAT_BACKBONE_HPP
