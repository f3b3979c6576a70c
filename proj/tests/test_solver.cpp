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

#include <random>

#include <catch_amalgamated.hpp>

#include "isingsat/decompose.hpp"
#include "isingsat/solver.hpp"
#include "oracle.hpp"

using namespace isingsat;

namespace {

IsingModel random_chip_model(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IsingModel m;
  m.num_spins = n;
  for (int i = 0; i < n; ++i) m.h[i] = static_cast<double>(static_cast<int>(rng() % 7) - 3);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng() % 4 == 0) m.J[{i, j}] = static_cast<double>(static_cast<int>(rng() % 9) - 4);
  std::erase_if(m.h, [](const auto& kv) { return kv.second == 0.0; });
  std::erase_if(m.J, [](const auto& kv) { return kv.second == 0.0; });
  return m;
}

SolveRequest request(const IsingModel& m, Backend b, std::uint64_t seed) {
  SolveRequest r;
  r.model = m;
  r.backend = b;
  r.seed = seed;
  return r;
}

}  // namespace

TEST_CASE("one spin with a positive field points down") {
  IsingModel m;
  m.num_spins = 1;
  m.h[0] = 1.0;
  for (auto b : {Backend::Emulator, Backend::Tabu}) {
    auto r = solve(request(m, b, 3));
    CHECK(r.best == Spins{-1});
    CHECK(r.best_energy == -1.0);
  }
}

TEST_CASE("ferromagnetic pair aligns") {
  IsingModel m;
  m.num_spins = 2;
  m.J[{0, 1}] = -1.0;
  for (auto b : {Backend::Emulator, Backend::Tabu})
    for (std::uint64_t s = 0; s < 10; ++s) {
      auto r = solve(request(m, b, s));
      CHECK(r.best[0] == r.best[1]);
      CHECK(r.best_energy == -1.0);
    }
}

TEST_CASE("emulator finds the 20-spin ground state in most runs") {
  for (std::uint64_t inst = 0; inst < 3; ++inst) {
    const auto m = random_chip_model(20, 100 + inst);
    const double ground = oracle::ising_minimum(m);
    int hits = 0;
    for (std::uint64_t s = 0; s < 20; ++s) hits += solve(request(m, Backend::Emulator, s)).best_energy == ground;
    CHECK(hits >= 10);
    int tabu_hits = 0;
    for (std::uint64_t s = 0; s < 20; ++s) tabu_hits += solve(request(m, Backend::Tabu, s)).best_energy == ground;
    CHECK(tabu_hits >= 10);
  }
}

TEST_CASE("reported energy is the energy of the reported spins") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = random_chip_model(30, s);
    for (auto b : {Backend::Emulator, Backend::Tabu}) {
      auto req = request(m, b, s);
      req.num_samples = 3;
      auto r = solve(req);
      REQUIRE(r.samples.size() == 3);
      CHECK(r.best_energy == m.energy(r.best));
      for (const auto& smp : r.samples) {
        CHECK(smp.energy == m.energy(smp.spins));
        CHECK(r.best_energy <= smp.energy);
      }
    }
  }
}

TEST_CASE("anneal trace: geometric temperatures, best energy never rises") {
  const auto m = random_chip_model(25, 4);
  auto req = request(m, Backend::Emulator, 8);
  req.record_trace = true;
  auto r = solve(req);
  REQUIRE(r.trace.size() == 500);
  CHECK(r.trace.front().temperature == Catch::Approx(10.0));
  CHECK(r.trace.back().temperature == Catch::Approx(0.05));
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].best_energy <= r.trace[k - 1].best_energy);
    CHECK(r.trace[k].temperature < r.trace[k - 1].temperature);
  }
  CHECK(r.trace.back().best_energy == r.best_energy);
}

TEST_CASE("same seed, same answer") {
  const auto m = random_chip_model(40, 5);
  for (auto b : {Backend::Emulator, Backend::Tabu}) {
    auto x = solve(request(m, b, 77)), y = solve(request(m, b, 77));
    CHECK(x.best == y.best);
    CHECK(x.best_energy == y.best_energy);
  }
}

TEST_CASE("emulator rejects models that do not fit the chip") {
  IsingModel big;
  big.num_spins = 46;
  CHECK_THROWS(solve(request(big, Backend::Emulator, 1)));
  IsingModel frac;
  frac.num_spins = 2;
  frac.h[0] = 0.5;
  CHECK_THROWS(solve(request(frac, Backend::Emulator, 1)));
  IsingModel wide;
  wide.num_spins = 2;
  wide.J[{0, 1}] = 15.0;
  CHECK_THROWS(solve(request(wide, Backend::Emulator, 1)));
  // tabu is a software baseline without those limits
  CHECK_NOTHROW(solve(request(big, Backend::Tabu, 1)));
  CHECK_NOTHROW(solve(request(frac, Backend::Tabu, 1)));
}

TEST_CASE("frozen subproblem energy bounds the falsified count from below") {
  Cnf cnf = oracle::random_ksat(16, 70, 3, 12);
  Assignment g(16);
  for (Var v = 1; v <= 16; ++v) g.set(v, v % 3 == 0);
  std::vector<Var> sel;
  for (Var v = 1; v <= 9; ++v) sel.push_back(v);
  auto sp = freeze_and_extract(cnf, sel, g, 1000);
  // exact minimum of the QUBO equals the smallest falsified count reachable
  // by changing the selected variables
  int best = 1 << 30;
  for (oracle::Mask x = 0; x < (oracle::Mask{1} << 9); ++x) {
    Assignment a = g;
    for (int i = 0; i < 9; ++i) a.set(sel[i], (x >> i) & 1U);
    best = std::min(best, static_cast<int>(cnf.clauses.size()) - evaluate(cnf, a).satisfied_count);
  }
  auto r = solve(request(qubo_to_ising(sp.qubo), Backend::Tabu, 2));
  CHECK(r.best_energy >= best - 1e-9);
  CHECK(r.best_energy == Catch::Approx(best));
}

TEST_CASE("batch solve matches single calls") {
  std::vector<SolveRequest> reqs;
  for (std::uint64_t s = 0; s < 8; ++s) reqs.push_back(request(random_chip_model(20, s), s % 2 ? Backend::Tabu : Backend::Emulator, s));
  IsingModel bad;
  bad.num_spins = 60;
  reqs.push_back(request(bad, Backend::Emulator, 0));
  auto out = batch_solve(reqs, 4);
  REQUIRE(out.size() == reqs.size());
  for (std::size_t i = 0; i + 1 < reqs.size(); ++i) {
    auto single = solve(reqs[i]);
    CHECK(out[i].error.empty());
    CHECK(out[i].backend == reqs[i].backend);
    CHECK(out[i].best == single.best);
  }
  CHECK_FALSE(out.back().error.empty());
  CHECK(batch_solve({}).empty());
}

TEST_CASE("schedule validation") {
  AnnealSchedule s;
  CHECK_NOTHROW(s.validate());
  s.sweeps = 0;
  CHECK_THROWS(s.validate());
  s = {};
  s.t_final = 0.0;
  CHECK_THROWS(s.validate());
  s = {};
  s.t_initial = 0.01;
  CHECK_THROWS(s.validate());
  s = {};
  s.sweeps = 1;
  CHECK(s.temperature(0) == 10.0);
}
