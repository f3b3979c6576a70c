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

// Semiprime factoring benchmarks from schoolbook array multipliers.
//
// Variable layout of a generated instance (all bit vectors LSB first):
//   1 .. wa                 factor a
//   wa+1 .. wa+wb           factor b
//   wa+wb+1 ..              gate outputs in creation order
// The product bits are gate outputs; product bit i is output_bits[i].

#ifndef ISINGSAT_CIRCUIT_HPP
#define ISINGSAT_CIRCUIT_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isingsat/cnf.hpp"

namespace isingsat {

enum class GateKind { And, Or, Nand, Nor, Xor, Xnor, Not, Buffer };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Nand: return "NAND";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buffer: return "BUFFER";
  }
  return "?";
}

inline bool gate_function(GateKind k, bool x, bool y) {
  switch (k) {
    case GateKind::And: return x && y;
    case GateKind::Or: return x || y;
    case GateKind::Nand: return !(x && y);
    case GateKind::Nor: return !(x || y);
    case GateKind::Xor: return x != y;
    case GateKind::Xnor: return x == y;
    case GateKind::Not: return !x;
    case GateKind::Buffer: return x;
  }
  return false;
}

inline int gate_arity(GateKind k) { return k == GateKind::Not || k == GateKind::Buffer ? 1 : 2; }

struct Gate {
  GateKind kind;
  std::vector<Var> inputs;
  Var output;
};

struct GateNetlist {
  std::vector<Gate> gates;
  std::vector<Var> input_bits_a;
  std::vector<Var> input_bits_b;
  std::vector<Var> output_bits;
  int num_vars = 0;

  std::map<GateKind, int> gate_counts() const {
    std::map<GateKind, int> counts;
    for (const auto& g : gates) ++counts[g.kind];
    return counts;
  }
};

/// Carry logic of the full adders.
enum class AdderStyle {
  Majority,   ///< cout = (x&y) | (x&c) | (y&c): 2 XOR, 3 AND, 2 OR
  Propagate,  ///< cout = (x&y) | (c&(x^y)):   2 XOR, 2 AND, 1 OR
};

enum class EncodingOption { Option1, Option2 };

namespace detail {

class NetlistBuilder {
 public:
  explicit NetlistBuilder(GateNetlist& nl) : nl_(nl) {}

  Var gate(GateKind kind, std::vector<Var> inputs) {
    Var out = ++nl_.num_vars;
    nl_.gates.push_back(Gate{kind, std::move(inputs), out});
    return out;
  }

  std::array<Var, 2> half_adder(Var x, Var y) {
    return {gate(GateKind::Xor, {x, y}), gate(GateKind::And, {x, y})};
  }

  std::array<Var, 2> full_adder(Var x, Var y, Var c, AdderStyle style) {
    Var t = gate(GateKind::Xor, {x, y});
    Var sum = gate(GateKind::Xor, {t, c});
    if (style == AdderStyle::Majority) {
      Var xy = gate(GateKind::And, {x, y});
      Var xc = gate(GateKind::And, {x, c});
      Var yc = gate(GateKind::And, {y, c});
      Var o = gate(GateKind::Or, {xy, xc});
      return {sum, gate(GateKind::Or, {o, yc})};
    }
    Var g = gate(GateKind::And, {x, y});
    Var p = gate(GateKind::And, {t, c});
    return {sum, gate(GateKind::Or, {g, p})};
  }

 private:
  GateNetlist& nl_;
};

}  // namespace detail

/// Array multiplier: AND partial products, then one ripple-carry row per bit
/// of b. Each row adds b_r * a at offset r into the running sum.
inline GateNetlist build_multiplier(int bits_a, int bits_b, AdderStyle style = AdderStyle::Majority) {
  if (bits_a < 2 || bits_b < 2) throw std::invalid_argument("build_multiplier: factor widths must be >= 2");
  GateNetlist nl;
  for (int i = 0; i < bits_a; ++i) nl.input_bits_a.push_back(++nl.num_vars);
  for (int i = 0; i < bits_b; ++i) nl.input_bits_b.push_back(++nl.num_vars);
  detail::NetlistBuilder b(nl);

  auto pp = [&](int i, int r) { return b.gate(GateKind::And, {nl.input_bits_a[i], nl.input_bits_b[r]}); };

  // acc[k] holds the running sum bit of weight 2^k.
  std::vector<Var> acc;
  for (int i = 0; i < bits_a; ++i) acc.push_back(pp(i, 0));
  for (int r = 1; r < bits_b; ++r) {
    std::optional<Var> carry;
    for (int i = 0; i < bits_a; ++i) {
      const std::size_t pos = static_cast<std::size_t>(r + i);
      Var x = pp(i, r);
      const bool have_acc = pos < acc.size();
      Var sum;
      if (have_acc && carry) {
        auto [s, c] = b.full_adder(x, acc[pos], *carry, style);
        sum = s;
        carry = c;
      } else if (have_acc || carry) {
        auto [s, c] = b.half_adder(x, have_acc ? acc[pos] : *carry);
        sum = s;
        carry = c;
      } else {
        sum = x;
      }
      if (have_acc)
        acc[pos] = sum;
      else
        acc.push_back(sum);
    }
    acc.push_back(*carry);
  }
  nl.output_bits = acc;
  return nl;
}

/// Evaluates the netlist on concrete factors. Returns the product value.
inline std::uint64_t simulate(const GateNetlist& nl, std::uint64_t a, std::uint64_t b) {
  std::vector<char> val(static_cast<std::size_t>(nl.num_vars) + 1, 0);
  for (std::size_t i = 0; i < nl.input_bits_a.size(); ++i) val[nl.input_bits_a[i]] = (a >> i) & 1U;
  for (std::size_t i = 0; i < nl.input_bits_b.size(); ++i) val[nl.input_bits_b[i]] = (b >> i) & 1U;
  for (const auto& g : nl.gates) {
    bool x = val[g.inputs[0]];
    bool y = g.inputs.size() > 1 ? static_cast<bool>(val[g.inputs[1]]) : false;
    val[g.output] = gate_function(g.kind, x, y);
  }
  std::uint64_t p = 0;
  for (std::size_t i = 0; i < nl.output_bits.size(); ++i)
    if (val[nl.output_bits[i]]) p |= std::uint64_t{1} << i;
  return p;
}

/// Complete encoding: one clause per excluded row of the gate's truth table,
/// rows in lexicographic input order.
inline std::vector<Clause> encode_option1(const Gate& g) {
  std::vector<Clause> out;
  const int arity = gate_arity(g.kind);
  for (int row = 0; row < (1 << arity); ++row) {
    bool x = (row >> (arity - 1)) & 1;
    bool y = arity == 2 ? (row & 1) : false;
    bool f = gate_function(g.kind, x, y);
    Clause c;
    c.emplace_back(g.inputs[0], x);
    if (arity == 2) c.emplace_back(g.inputs[1], y);
    c.emplace_back(g.output, !f);  // excludes output == !f
    out.push_back(std::move(c));
  }
  return out;
}

inline bool has_option2(GateKind k) {
  return k == GateKind::And || k == GateKind::Or || k == GateKind::Nand || k == GateKind::Nor;
}

/// Implication (Tseitin) encoding for AND/OR/NAND/NOR.
inline std::vector<Clause> encode_option2(const Gate& g) {
  if (!has_option2(g.kind)) throw std::invalid_argument("encode_option2: no implication form for this gate");
  const Var a = g.inputs[0], b = g.inputs[1];
  const bool inverted = g.kind == GateKind::Nand || g.kind == GateKind::Nor;
  const Literal c(g.output, inverted);  // c stands for the non-inverted function
  if (g.kind == GateKind::Or || g.kind == GateKind::Nor)
    return {{~c, Literal(a, false), Literal(b, false)}, {Literal(a, true), c}, {Literal(b, true), c}};
  return {{c, Literal(a, true), Literal(b, true)}, {~c, Literal(a, false)}, {~c, Literal(b, false)}};
}

struct EncodeOptions {
  EncodingOption option = EncodingOption::Option1;
  bool force_factor_msb = true;
};

inline Cnf encode_netlist(const GateNetlist& nl, std::uint64_t product, const EncodeOptions& opts = {}) {
  const std::size_t width = nl.output_bits.size();
  if (width < 64 && (product >> width) != 0)
    throw std::invalid_argument("encode_netlist: product " + std::to_string(product) + " does not fit in " +
                                std::to_string(width) + " output bits");
  Cnf cnf;
  cnf.num_vars = nl.num_vars;
  int fallbacks = 0;
  for (const auto& g : nl.gates) {
    const bool use2 = opts.option == EncodingOption::Option2 && has_option2(g.kind);
    if (opts.option == EncodingOption::Option2 && !use2) ++fallbacks;
    for (auto& c : use2 ? encode_option2(g) : encode_option1(g)) cnf.clauses.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < width; ++i) cnf.clauses.push_back({Literal(nl.output_bits[i], !((product >> i) & 1U))});
  if (opts.force_factor_msb) {
    cnf.clauses.push_back({Literal(nl.input_bits_a.back(), false)});
    cnf.clauses.push_back({Literal(nl.input_bits_b.back(), false)});
  }

  auto span = [](const std::vector<Var>& v) {
    return std::to_string(v.front()) + ".." + std::to_string(v.back());
  };
  std::string outs;
  for (Var v : nl.output_bits) outs += (outs.empty() ? "" : " ") + std::to_string(v);
  cnf.comments.push_back("semiprime factoring, schoolbook array multiplier " +
                         std::to_string(nl.input_bits_a.size()) + "x" + std::to_string(nl.input_bits_b.size()));
  cnf.comments.push_back("bit order: LSB first");
  cnf.comments.push_back("semiprime " + std::to_string(product));
  cnf.comments.push_back("factor_a vars " + span(nl.input_bits_a));
  cnf.comments.push_back("factor_b vars " + span(nl.input_bits_b));
  cnf.comments.push_back("product vars " + outs);
  std::string mix;
  for (auto [kind, count] : nl.gate_counts()) mix += std::string(" ") + to_string(kind) + "=" + std::to_string(count);
  cnf.comments.push_back("gates " + std::to_string(nl.gates.size()) + mix);
  cnf.comments.push_back(std::string("encoding ") + (opts.option == EncodingOption::Option1 ? "opt1" : "opt2"));
  if (fallbacks > 0)
    cnf.comments.push_back("notice: " + std::to_string(fallbacks) + " XOR/XNOR gates kept in option-1 form");
  return cnf;
}

// ---------------------------------------------------------------------------
// Benchmark catalog

struct SemiprimeEntry {
  std::uint64_t semiprime;
  std::uint64_t p;  ///< factor of width ceil(B/2)
  std::uint64_t q;  ///< factor of width floor(B/2)
  friend bool operator==(const SemiprimeEntry&, const SemiprimeEntry&) = default;
};

inline bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t d = 2; d * d <= x; ++d)
    if (x % d == 0) return false;
  return true;
}

inline int factor_width_a(int bit_width) { return (bit_width + 1) / 2; }
inline int factor_width_b(int bit_width) { return bit_width / 2; }

/// Odd semiprimes p*q where p and q are primes with their top bit set at
/// widths ceil(B/2) and floor(B/2). Unordered pairs when the widths agree.
inline std::vector<SemiprimeEntry> semiprime_catalog(int bit_width) {
  if (bit_width < 4 || bit_width > 16) throw std::invalid_argument("semiprime_catalog: bit width must be in [4, 16]");
  const int wa = factor_width_a(bit_width), wb = factor_width_b(bit_width);
  std::vector<SemiprimeEntry> out;
  for (std::uint64_t p = std::uint64_t{1} << (wa - 1); p < (std::uint64_t{1} << wa); ++p) {
    if (p == 2 || !is_prime(p)) continue;
    for (std::uint64_t q = std::uint64_t{1} << (wb - 1); q < (std::uint64_t{1} << wb); ++q) {
      if (q == 2 || !is_prime(q)) continue;
      if (wa == wb && q > p) continue;
      out.push_back({p * q, p, q});
    }
  }
  std::sort(out.begin(), out.end(), [](const SemiprimeEntry& x, const SemiprimeEntry& y) {
    return x.semiprime != y.semiprime ? x.semiprime < y.semiprime : x.p < y.p;
  });
  return out;
}

/// Convenience: netlist + encoding for a catalog width.
inline Cnf generate_semiprime_instance(int bit_width, std::uint64_t semiprime, const EncodeOptions& opts = {},
                                       AdderStyle style = AdderStyle::Majority) {
  GateNetlist nl = build_multiplier(factor_width_a(bit_width), factor_width_b(bit_width), style);
  Cnf cnf = encode_netlist(nl, semiprime, opts);
  cnf.provenance = "semiprime-" + std::to_string(bit_width) + "bit-" + std::to_string(semiprime);
  return cnf;
}

/// Reads the factor values back out of a complete assignment.
inline std::pair<std::uint64_t, std::uint64_t> decode_factors(const GateNetlist& nl, const Assignment& a) {
  std::uint64_t x = 0, y = 0;
  for (std::size_t i = 0; i < nl.input_bits_a.size(); ++i)
    if (a[nl.input_bits_a[i]]) x |= std::uint64_t{1} << i;
  for (std::size_t i = 0; i < nl.input_bits_b.size(); ++i)
    if (a[nl.input_bits_b[i]]) y |= std::uint64_t{1} << i;
  return {x, y};
}

}  // namespace isingsat

#endif  // ISINGSAT_CIRCUIT_HPP
