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

#ifndef ISINGSAT_VIG_HPP
#define ISINGSAT_VIG_HPP

#include <algorithm>
#include <vector>

#include "isingsat/cnf.hpp"

namespace isingsat {

/// Variable interaction graph: an edge joins two variables that share a clause.
class Vig {
 public:
  Vig() = default;

  explicit Vig(const Cnf& cnf)
      : adj_(static_cast<std::size_t>(cnf.num_vars) + 1),
        present_(static_cast<std::size_t>(cnf.num_vars) + 1, 0) {
    std::vector<Var> vars;
    for (const auto& c : cnf.clauses) {
      vars.clear();
      for (Literal l : c) vars.push_back(l.var());
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      for (std::size_t i = 0; i < vars.size(); ++i) {
        present_[vars[i]] = 1;
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
          adj_[vars[i]].push_back(vars[j]);
          adj_[vars[j]].push_back(vars[i]);
        }
      }
    }
    for (auto& nbrs : adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }

  int num_vars() const { return adj_.empty() ? 0 : static_cast<int>(adj_.size()) - 1; }
  const std::vector<Var>& neighbors(Var v) const { return adj_.at(v); }
  int degree(Var v) const { return static_cast<int>(adj_.at(v).size()); }
  bool present(Var v) const { return present_.at(v) != 0; }
  bool has_edge(Var u, Var v) const { return std::binary_search(adj_.at(u).begin(), adj_.at(u).end(), v); }

  /// Variables that occur in some clause, ascending.
  std::vector<Var> nodes() const {
    std::vector<Var> out;
    for (Var v = 1; v <= num_vars(); ++v)
      if (present(v)) out.push_back(v);
    return out;
  }

  std::size_t num_edges() const {
    std::size_t twice = 0;
    for (const auto& n : adj_) twice += n.size();
    return twice / 2;
  }

  double mean_degree() const {
    auto ns = nodes();
    if (ns.empty()) return 0.0;
    double sum = 0;
    for (Var v : ns) sum += degree(v);
    return sum / static_cast<double>(ns.size());
  }

 private:
  std::vector<std::vector<Var>> adj_;
  std::vector<char> present_;
};

inline Vig build_vig(const Cnf& cnf) { return Vig(cnf); }

}  // namespace isingsat

#endif  // ISINGSAT_VIG_HPP
