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

#ifndef ISINGSAT_CNF_HPP
#define ISINGSAT_CNF_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isingsat {

/// Variables are 1-indexed, as in DIMACS.
using Var = int;

class Literal {
 public:
  constexpr Literal() = default;
  constexpr Literal(Var var, bool negated) : code_(negated ? -var : var) {}

  static Literal from_dimacs(int code) {
    if (code == 0) throw std::invalid_argument("literal code 0 is reserved");
    Literal l;
    l.code_ = code;
    return l;
  }

  constexpr Var var() const { return code_ < 0 ? -code_ : code_; }
  constexpr bool negated() const { return code_ < 0; }
  constexpr int dimacs() const { return code_; }
  constexpr Literal operator~() const { return from_code(-code_); }

  /// Truth value of the literal when its variable takes `value`.
  constexpr bool holds(bool value) const { return value != negated(); }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal a, Literal b) {
    // order by variable first, positive before negative
    if (a.var() != b.var()) return a.var() <=> b.var();
    return a.negated() <=> b.negated();
  }

 private:
  static constexpr Literal from_code(int code) {
    Literal l;
    l.code_ = code;
    return l;
  }
  int code_ = 0;
};

/// A disjunction of literals. An empty clause is the falsified clause and
/// marks an unsatisfiable formula.
using Clause = std::vector<Literal>;

struct Cnf {
  int num_vars = 0;
  std::vector<Clause> clauses;
  std::string provenance;
  std::vector<std::string> comments;
  /// Set by the parser when the header clause count disagrees with the body.
  bool clause_count_mismatch = false;

  std::size_t num_clauses() const { return clauses.size(); }

  bool operator==(const Cnf& other) const {
    return num_vars == other.num_vars && clauses == other.clauses &&
           provenance == other.provenance && comments == other.comments;
  }
};

inline bool has_empty_clause(const Cnf& cnf) {
  return std::any_of(cnf.clauses.begin(), cnf.clauses.end(),
                     [](const Clause& c) { return c.empty(); });
}

/// The canonical unsatisfiable result: a single falsified clause.
inline Cnf make_unsat(int num_vars) {
  Cnf out;
  out.num_vars = num_vars;
  out.clauses.emplace_back();
  return out;
}

/// Clause width histogram, index k holds the number of k-literal clauses.
inline std::vector<int> width_histogram(const Cnf& cnf) {
  std::vector<int> h(4, 0);
  for (const auto& c : cnf.clauses) {
    if (c.size() >= h.size()) h.resize(c.size() + 1, 0);
    ++h[c.size()];
  }
  return h;
}

/// Number of distinct variables that occur in at least one clause.
inline int count_occurring_vars(const Cnf& cnf) {
  std::vector<char> seen(static_cast<std::size_t>(cnf.num_vars) + 1, 0);
  int count = 0;
  for (const auto& c : cnf.clauses)
    for (Literal l : c)
      if (!seen[l.var()]) {
        seen[l.var()] = 1;
        ++count;
      }
  return count;
}

// ---------------------------------------------------------------------------
// Assignment

class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int num_vars)
      : values_(static_cast<std::size_t>(num_vars) + 1, kUnset) {}

  int num_vars() const { return values_.empty() ? 0 : static_cast<int>(values_.size()) - 1; }

  bool is_assigned(Var v) const { return values_.at(v) != kUnset; }
  bool operator[](Var v) const { return values_.at(v) == 1; }
  void set(Var v, bool value) { values_.at(v) = value ? 1 : 0; }
  void unset(Var v) { values_.at(v) = kUnset; }

  bool complete() const {
    return std::none_of(values_.begin() + (values_.empty() ? 0 : 1), values_.end(),
                        [](std::int8_t x) { return x == kUnset; });
  }

  bool satisfies(Literal l) const { return is_assigned(l.var()) && l.holds((*this)[l.var()]); }

  /// Bit string over variables 1..n, '0', '1' or '-' for unassigned.
  std::string to_string() const {
    std::string s;
    for (std::size_t v = 1; v < values_.size(); ++v)
      s.push_back(values_[v] == kUnset ? '-' : static_cast<char>('0' + values_[v]));
    return s;
  }

  static Assignment from_bits(int num_vars, std::uint64_t bits) {
    Assignment a(num_vars);
    for (int v = 1; v <= num_vars; ++v) a.set(v, (bits >> (v - 1)) & 1U);
    return a;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  static constexpr std::int8_t kUnset = -1;
  std::vector<std::int8_t> values_;
};

// ---------------------------------------------------------------------------
// DIMACS

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline Cnf parse_dimacs(std::istream& in) {
  Cnf cnf;
  bool have_header = false;
  long declared_clauses = 0;
  Clause current;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    char lead = line[first];
    if (lead == 'c') {
      std::string text = line.substr(first + 1);
      if (!text.empty() && text.front() == ' ') text.erase(0, 1);
      constexpr std::string_view kProv = "provenance: ";
      if (text.rfind(kProv, 0) == 0)
        cnf.provenance = text.substr(kProv.size());
      else
        cnf.comments.push_back(text);
      continue;
    }
    if (lead == '%') break;  // SATLIB trailer
    if (lead == 'p') {
      if (have_header) throw ParseError(lineno, "duplicate header");
      std::istringstream hs(line.substr(first + 1));
      std::string fmt;
      long n = -1, m = -1;
      if (!(hs >> fmt >> n >> m) || fmt != "cnf" || n < 0 || m < 0)
        throw ParseError(lineno, "malformed header, expected 'p cnf <vars> <clauses>'");
      cnf.num_vars = static_cast<int>(n);
      declared_clauses = m;
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(lineno, "clause before 'p cnf' header");

    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      long code = std::strtol(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0') throw ParseError(lineno, "bad token '" + tok + "'");
      if (code == 0) {
        if (tok[0] == '-') throw ParseError(lineno, "literal index 0");
        if (current.empty()) throw ParseError(lineno, "literal index 0 with no preceding literal (empty clause)");
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (std::labs(code) > cnf.num_vars)
        throw ParseError(lineno, "variable " + std::to_string(std::labs(code)) +
                                     " exceeds declared count " + std::to_string(cnf.num_vars));
      current.push_back(Literal::from_dimacs(static_cast<int>(code)));
    }
  }
  if (!have_header) throw ParseError(lineno, "missing 'p cnf' header");
  if (!current.empty()) cnf.clauses.push_back(std::move(current));  // unterminated final clause
  cnf.clause_count_mismatch = static_cast<long>(cnf.clauses.size()) != declared_clauses;
  return cnf;
}

inline Cnf parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

inline std::string write_dimacs(const Cnf& cnf) {
  std::string out;
  for (const auto& c : cnf.comments) {
    out += c.empty() ? "c" : "c " + c;
    out += '\n';
  }
  if (!cnf.provenance.empty()) out += "c provenance: " + cnf.provenance + "\n";
  out += "p cnf " + std::to_string(cnf.num_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& clause : cnf.clauses) {
    for (Literal l : clause) {
      out += std::to_string(l.dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Evaluation {
  int satisfied_count = 0;
  bool all_satisfied = false;
};

inline bool clause_satisfied(const Clause& c, const Assignment& a) {
  return std::any_of(c.begin(), c.end(), [&](Literal l) { return l.holds(a[l.var()]); });
}

inline Evaluation evaluate(const Cnf& cnf, const Assignment& a) {
  if (a.num_vars() < cnf.num_vars || !a.complete())
    throw std::invalid_argument("evaluate: assignment does not cover all variables");
  Evaluation e;
  for (const auto& c : cnf.clauses)
    if (clause_satisfied(c, a)) ++e.satisfied_count;
  e.all_satisfied = e.satisfied_count == static_cast<int>(cnf.clauses.size());
  return e;
}

/// Every satisfying complete assignment, by exhaustive enumeration.
/// Clauses are compiled to bit masks; variables beyond 64 are rejected.
inline std::set<Assignment> brute_force_solutions(const Cnf& cnf, int var_cap = 26) {
  if (cnf.num_vars > var_cap)
    throw std::invalid_argument("brute_force_solutions: " + std::to_string(cnf.num_vars) +
                                " variables exceeds cap " + std::to_string(var_cap));
  if (cnf.num_vars > 62) throw std::invalid_argument("brute_force_solutions: too many variables");
  struct Mask {
    std::uint64_t pos = 0, neg = 0;
  };
  std::vector<Mask> masks;
  masks.reserve(cnf.clauses.size());
  for (const auto& c : cnf.clauses) {
    Mask m;
    for (Literal l : c) (l.negated() ? m.neg : m.pos) |= std::uint64_t{1} << (l.var() - 1);
    masks.push_back(m);
  }
  // short clauses first: they reject most assignments
  std::stable_sort(masks.begin(), masks.end(), [](const Mask& x, const Mask& y) {
    return __builtin_popcountll(x.pos | x.neg) < __builtin_popcountll(y.pos | y.neg);
  });
  std::set<Assignment> out;
  const std::uint64_t total = std::uint64_t{1} << cnf.num_vars;
  for (std::uint64_t x = 0; x < total; ++x) {
    bool ok = true;
    for (const Mask& m : masks)
      if (((x & m.pos) | (~x & m.neg)) == 0) {
        ok = false;
        break;
      }
    if (ok) out.insert(Assignment::from_bits(cnf.num_vars, x));
  }
  return out;
}

}  // namespace isingsat

#endif  // ISINGSAT_CNF_HPP
