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

// Solution-set comparison between a formula and its preprocessed form,
// shared by the preprocess tests and the acceptance binary.

#ifndef ISINGSAT_TESTS_LADDER_CHECK_HPP
#define ISINGSAT_TESTS_LADDER_CHECK_HPP

#include <map>
#include <set>
#include <string>

#include "isingsat/preprocess.hpp"
#include "oracle.hpp"

namespace ladder_check {

struct Mapping {
  std::set<oracle::Mask> image;  ///< reconstructed assignments
  bool injective = true;         ///< distinct reduced solutions give distinct results
  bool all_valid = true;         ///< every reconstructed assignment is a model
};

/// Reconstructs every model of the reduced formula. Reduced models that only
/// differ on fixed or replaced variables count as the same solution.
inline Mapping map_solutions(const isingsat::Cnf& original, const isingsat::LadderResult& r) {
  Mapping out;
  if (r.unsat || r.branch.closed || isingsat::has_empty_clause(r.cnf)) return out;
  const auto surviving = r.cond.surviving_vars();
  oracle::Mask keep = 0;
  for (auto v : surviving) keep |= oracle::Mask{1} << (v - 1);
  std::map<oracle::Mask, oracle::Mask> seen;  // projected reduced model -> image
  const auto orig = oracle::raw(original);
  // only surviving variables and those still mentioned can matter
  std::set<int> free_set(surviving.begin(), surviving.end());
  for (const auto& c : r.cnf.clauses)
    for (auto l : c) free_set.insert(l.var());
  for (auto m : oracle::models_over(r.cnf, std::vector<int>(free_set.begin(), free_set.end()))) {
    const oracle::Mask key = m & keep;
    if (seen.count(key)) continue;
    auto a = isingsat::reconstruct(isingsat::Assignment::from_bits(r.cnf.num_vars, m), r.cond, r.branch);
    const oracle::Mask img = oracle::to_mask(a);
    out.all_valid = out.all_valid && oracle::falsified(orig, img) == 0;
    if (!out.image.insert(img).second) out.injective = false;
    seen[key] = img;
  }
  return out;
}

struct Verdict {
  bool ok = true;
  std::string detail;
};

/// Exact check at one level against the known model set; level 7 is run
/// with both guess values.
inline Verdict check_level(const isingsat::Cnf& cnf, const std::set<oracle::Mask>& truth, int level,
                           std::uint64_t seed = 1) {
  Verdict v;
  auto fail = [&](const std::string& why) {
    v.ok = false;
    v.detail = why;
    return v;
  };
  if (level < isingsat::kMaxLevel) {
    auto r = isingsat::run_ladder(cnf, level, seed);
    if (r.unsat || isingsat::has_empty_clause(r.cnf)) return truth.empty() ? v : fail("unsat reported for sat formula");
    auto m = map_solutions(cnf, r);
    if (!m.all_valid) return fail("reconstructed assignment falsifies the original");
    if (!m.injective) return fail("two reduced solutions reconstruct to one assignment");
    if (m.image != truth)
      return fail("solution sets differ: " + std::to_string(m.image.size()) + " vs " + std::to_string(truth.size()));
    return v;
  }
  std::set<oracle::Mask> all;
  for (bool value : {false, true}) {
    isingsat::LadderOptions opts;
    opts.branch.forced_value = value;
    auto r = isingsat::run_ladder(cnf, level, seed, opts);
    auto m = map_solutions(cnf, r);
    if (!m.all_valid) return fail("reconstructed assignment falsifies the original");
    if (!m.injective) return fail("two reduced solutions reconstruct to one assignment");
    all.insert(m.image.begin(), m.image.end());
  }
  if (all != truth)
    return fail("branch union differs: " + std::to_string(all.size()) + " vs " + std::to_string(truth.size()));
  return v;
}

inline Verdict check_level(const isingsat::Cnf& cnf, int level, std::uint64_t seed = 1) {
  return check_level(cnf, oracle::models(cnf), level, seed);
}

}  // namespace ladder_check

#endif  // ISINGSAT_TESTS_LADDER_CHECK_HPP
