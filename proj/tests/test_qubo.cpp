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

#include <cmath>
#include <random>
#include <set>

#include <catch_amalgamated.hpp>

#include "isingsat/circuit.hpp"
#include "isingsat/qubo.hpp"
#include "oracle.hpp"

using namespace isingsat;
using Catch::Approx;

namespace {

Literal pos(Var v) { return Literal(v, false); }
Literal neg(Var v) { return Literal(v, true); }

Cnf make(int n, std::vector<Clause> cs) {
  Cnf c;
  c.num_vars = n;
  c.clauses = std::move(cs);
  return c;
}

/// Penalty of x (bits over CNF variables, QUBO index v-1) minimised over the ancillas.
double min_over_ancillas(const QuboModel& q, int n, oracle::Mask x) {
  const int extra = q.num_vars - n;
  double best = INFINITY;
  for (oracle::Mask w = 0; w < (oracle::Mask{1} << extra); ++w) best = std::min(best, oracle::qubo_energy(q, x | (w << n)));
  return best;
}

IsingModel random_ising(int n, std::uint64_t seed, double scale = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  IsingModel m;
  m.num_spins = n;
  for (int i = 0; i < n; ++i) m.h[i] = u(rng);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng() % 3 == 0) m.J[{i, j}] = u(rng);
  m.offset = u(rng);
  return m;
}

}  // namespace

TEST_CASE("gadget penalty is 0 on satisfying rows and exactly 1 otherwise") {
  for (int width = 1; width <= 3; ++width)
    for (int polarity = 0; polarity < (1 << width); ++polarity) {
      Clause c;
      for (int i = 0; i < width; ++i) c.emplace_back(i + 1, ((polarity >> i) & 1) != 0);
      Cnf cnf = make(width, {c});
      QuboModel q = cnf_to_qubo(cnf);
      CHECK(q.num_vars == width + (width == 3 ? 1 : 0));
      const auto raw = oracle::raw(cnf);
      for (oracle::Mask x = 0; x < (oracle::Mask{1} << width); ++x) {
        const double p = min_over_ancillas(q, width, x);
        if (oracle::falsified(raw, x) == 0)
          CHECK(p == 0.0);
        else
          CHECK(p == 1.0);
        // every ancilla value keeps the penalty non-negative
        for (oracle::Mask w = 0; w < (oracle::Mask{1} << (q.num_vars - width)); ++w)
          CHECK(oracle::qubo_energy(q, x | (w << width)) >= 0.0);
      }
    }
}

TEST_CASE("unit and binary gadget coefficients") {
  QuboModel q = cnf_to_qubo(make(1, {{pos(1)}}));
  CHECK(q.offset == 1.0);
  CHECK(q.linear.at(0) == -1.0);
  CHECK(q.quadratic.empty());

  q = cnf_to_qubo(make(2, {{pos(1), pos(2)}}));
  CHECK(q.offset == 1.0);
  CHECK(q.linear.at(0) == -1.0);
  CHECK(q.linear.at(1) == -1.0);
  CHECK(q.quadratic.at({0, 1}) == 1.0);
  for (oracle::Mask x = 0; x < 4; ++x) CHECK(oracle::qubo_energy(q, x) == (x == 0 ? 1.0 : 0.0));
}

TEST_CASE("width checks") {
  QuboModel q;
  int next = 0;
  CHECK_THROWS(clause_gadget(Clause{}, q, next));
  CHECK_THROWS(clause_gadget(Clause{pos(1), pos(2), pos(3), pos(4)}, q, next));
  CHECK_THROWS(cnf_to_qubo(make_unsat(2)));
}

TEST_CASE("variable count is n plus the number of 3-literal clauses") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Cnf cnf = oracle::random_mixed(12, 30, s);
    QuboModel q = cnf_to_qubo(cnf);
    CHECK(q.num_vars == cnf.num_vars + width_histogram(cnf)[3]);
    CHECK(q.num_ancillas() == static_cast<std::size_t>(width_histogram(cnf)[3]));
    for (int i = 0; i < cnf.num_vars; ++i) CHECK(q.source_var[i] == i + 1);
    for (const auto& [k, w] : q.ancilla_map) CHECK(q.source_var[w] == 0);
  }
  Cnf gate = make(3, encode_option1(Gate{GateKind::Or, {1, 2}, 3}));
  CHECK(cnf_to_qubo(gate).num_vars == 7);
  CHECK(cnf_to_qubo(make(3, encode_option2(Gate{GateKind::Or, {1, 2}, 3}))).num_vars == 4);
}

TEST_CASE("conflicting units: minimum energy 1 at both values") {
  QuboModel q = cnf_to_qubo(make(1, {{pos(1)}, {neg(1)}}));
  CHECK(oracle::qubo_energy(q, 0) == 1.0);
  CHECK(oracle::qubo_energy(q, 1) == 1.0);
}

TEST_CASE("energy with optimal ancillas counts falsified clauses") {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const int n = 7;
    Cnf cnf = oracle::random_mixed(n, 12, s);
    QuboModel q = cnf_to_qubo(cnf);
    if (q.num_vars > 22) continue;
    const auto raw = oracle::raw(cnf);
    int best_unsat = 1 << 30;
    double best_energy = INFINITY;
    for (oracle::Mask x = 0; x < (oracle::Mask{1} << n); ++x) {
      const int f = oracle::falsified(raw, x);
      CHECK(min_over_ancillas(q, n, x) == f);
      Bits bits(n);
      for (int i = 0; i < n; ++i) bits[i] = (x >> i) & 1U;
      CHECK(q.energy(optimal_ancillas(q, cnf, bits)) == f);
      best_unsat = std::min(best_unsat, f);
      best_energy = std::min(best_energy, min_over_ancillas(q, n, x));
    }
    CHECK(best_energy == best_unsat);
  }
}

TEST_CASE("QUBO to Ising: single product term") {
  QuboModel q;
  q.num_vars = 2;
  q.add_quadratic(0, 1, 1.0);
  IsingModel m = qubo_to_ising(q);
  CHECK(m.J.at({0, 1}) == 0.25);
  CHECK(m.h.at(0) == 0.25);
  CHECK(m.h.at(1) == 0.25);
  CHECK(m.offset == 0.25);

  QuboModel zero;
  zero.num_vars = 3;
  IsingModel z = qubo_to_ising(zero);
  CHECK(z.h.empty());
  CHECK(z.J.empty());
  CHECK(z.offset == 0.0);
}

TEST_CASE("QUBO and Ising energies agree on every state") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int n = 10;
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-5, 5);
    QuboModel q;
    q.num_vars = n;
    for (int i = 0; i < n; ++i) q.add_linear(i, u(rng));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 2) q.add_quadratic(i, j, u(rng));
    q.offset = u(rng);
    IsingModel m = qubo_to_ising(q);
    QuboModel back = ising_to_qubo(m);
    for (oracle::Mask x = 0; x < (oracle::Mask{1} << n); ++x) {
      REQUIRE(oracle::ising_energy(m, x) == Approx(oracle::qubo_energy(q, x)).margin(1e-9));
      REQUIRE(oracle::qubo_energy(back, x) == Approx(oracle::qubo_energy(q, x)).margin(1e-9));
    }
  }
}

TEST_CASE("Ising energies of CNF models equal the falsified count") {
  Cnf cnf = oracle::random_ksat(8, 10, 3, 4);
  QuboModel q = cnf_to_qubo(cnf);
  IsingModel m = qubo_to_ising(q);
  for (oracle::Mask x = 0; x < (oracle::Mask{1} << q.num_vars); ++x)
    CHECK(oracle::ising_energy(m, x) == Approx(oracle::qubo_energy(q, x)).margin(1e-9));
}

TEST_CASE("scale_to_chip: integral models in range pass through") {
  IsingModel m;
  m.num_spins = 3;
  m.h = {{0, 3.0}, {1, -14.0}};
  m.J = {{{0, 2}, 14.0}};
  m.offset = 0.5;
  auto s = scale_to_chip(m);
  CHECK(s.model.h == m.h);
  CHECK(s.model.J == m.J);
  CHECK(s.model.offset == 0.5);
  CHECK(s.distortion.scale == 1.0);
  CHECK(s.distortion.max_relative_error == 0.0);
  CHECK_FALSE(s.distortion.levels_collapsed);
}

TEST_CASE("scale_to_chip: max coefficient 28 halves everything") {
  IsingModel m;
  m.num_spins = 2;
  m.J = {{{0, 1}, -28.0}};
  m.h = {{0, 10.0}, {1, -6.0}};
  m.offset = 4.0;
  auto s = scale_to_chip(m);
  CHECK(s.distortion.scale == 0.5);
  CHECK(s.model.J.at({0, 1}) == -14.0);
  CHECK(s.model.h.at(0) == 5.0);
  CHECK(s.model.h.at(1) == -3.0);
  CHECK(s.model.offset == 2.0);
  CHECK(s.distortion.clamped == 0);
}

TEST_CASE("scale_to_chip: distortion report") {
  IsingModel m;
  m.num_spins = 2;
  m.h = {{0, 100.0}, {1, 0.2}};
  auto s = scale_to_chip(m);
  CHECK(s.model.h.at(0) == 14.0);
  CHECK(s.model.h.count(1) == 0);
  CHECK(s.distortion.zeroed == 1);
  CHECK(s.distortion.levels_collapsed);

  IsingModel frac;
  frac.num_spins = 2;
  frac.h = {{0, 0.25}, {1, 0.75}};
  frac.J = {{{0, 1}, 0.5}};
  auto f = scale_to_chip(frac);
  CHECK(f.distortion.scale == Approx(14.0 / 0.75));
  CHECK(f.model.h.at(1) == 14.0);
  CHECK(f.model.h.at(0) == 5.0);  // 4.67 rounds to 5
  CHECK(f.distortion.max_relative_error == Approx((5.0 - 14.0 / 3.0) / (14.0 / 3.0)));
  for (const auto& [i, c] : f.model.h) CHECK(c == std::round(c));
}

TEST_CASE("scale_to_chip: rounding ties go away from zero") {
  IsingModel m;
  m.num_spins = 3;
  m.h = {{0, 28.0}, {1, 5.0}, {2, -5.0}};  // scale 1/2: 2.5 and -2.5
  auto s = scale_to_chip(m);
  CHECK(s.model.h.at(1) == 3.0);
  CHECK(s.model.h.at(2) == -3.0);
}

TEST_CASE("scale_to_chip rejects models over the spin budget") {
  IsingModel m;
  m.num_spins = 46;
  CHECK_THROWS_AS(scale_to_chip(m), std::invalid_argument);
  ChipProfile bad;
  bad.coeff_min = 1;
  m.num_spins = 2;
  CHECK_THROWS(scale_to_chip(m, bad));
}

TEST_CASE("positive scaling keeps the ground states") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    IsingModel m = random_ising(10, s);
    const double k = 0.1 + 0.37 * static_cast<double>(s);
    IsingModel scaled = m;
    for (auto& [i, c] : scaled.h) c *= k;
    for (auto& [ij, c] : scaled.J) c *= k;
    scaled.offset *= k;
    std::set<oracle::Mask> a, b;
    const double ma = oracle::ising_minimum(m), mb = oracle::ising_minimum(scaled);
    for (oracle::Mask x = 0; x < 1024; ++x) {
      if (oracle::ising_energy(m, x) <= ma + 1e-9) a.insert(x);
      if (oracle::ising_energy(scaled, x) <= mb + 1e-9 * k) b.insert(x);
    }
    CHECK(a == b);
  }
}

TEST_CASE("triplet export") {
  QuboModel q = cnf_to_qubo(make(2, {{pos(1), pos(2)}}));
  CHECK(to_triplets(q) == "# vars 2 offset 1\n0 0 -1\n1 1 -1\n0 1 1\n");
}
