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

// Subproblem solvers for Ising models.
//
// The emulator enforces the chip's constraints (spin capacity, all-to-all
// couplings, integer coefficients in a fixed range) and runs a Metropolis
// annealer with geometric cooling. Tabu search is the unconstrained software
// baseline. Both minimise H(s) = Σ J_ij s_i s_j + Σ h_i s_i + offset.

#ifndef ISINGSAT_SOLVER_HPP
#define ISINGSAT_SOLVER_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "isingsat/qubo.hpp"

namespace isingsat {

enum class Backend { Emulator, Tabu };

inline const char* to_string(Backend b) { return b == Backend::Emulator ? "emulator" : "tabu"; }

inline Backend parse_backend(const std::string& s) {
  if (s == "emulator") return Backend::Emulator;
  if (s == "tabu") return Backend::Tabu;
  throw std::invalid_argument("unknown backend '" + s + "'");
}

struct AnnealSchedule {
  double t_initial = 10.0;
  double t_final = 0.05;
  int sweeps = 500;

  void validate() const {
    if (sweeps < 1) throw std::invalid_argument("anneal schedule: sweeps must be >= 1");
    if (!(t_final > 0.0) || (sweeps > 1 && !(t_initial > t_final)))
      throw std::invalid_argument("anneal schedule: need t_initial > t_final > 0");
  }

  /// Temperature of sweep k, geometric from t_initial to t_final.
  double temperature(int k) const {
    if (sweeps == 1) return t_initial;
    return t_initial * std::pow(t_final / t_initial, static_cast<double>(k) / (sweeps - 1));
  }
};

struct TabuParams {
  int tenure = 10;
  int max_iterations = 10000;
  int stall_limit = 1000;   ///< stop after this many moves without a new best
  double time_budget_ms = 0.0;  ///< 0 disables the wall-clock limit
};

struct SolveRequest {
  IsingModel model;
  Backend backend = Backend::Emulator;
  std::uint64_t seed = 0;
  int num_samples = 1;
  AnnealSchedule schedule;
  TabuParams tabu;
  ChipProfile chip;
  bool record_trace = false;
};

struct TraceRow {
  int sweep;
  double temperature;
  double best_energy;
};

struct Sample {
  Spins spins;
  double energy;
};

struct SolveResult {
  Spins best;
  double best_energy = std::numeric_limits<double>::infinity();
  std::vector<Sample> samples;
  double wall_time = 0.0;  ///< seconds
  Backend backend = Backend::Emulator;
  std::vector<TraceRow> trace;
  std::string error;  ///< set by batch_solve when the request failed
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct DenseIsing {
  int n = 0;
  std::vector<double> h;
  std::vector<double> J;  ///< row-major n*n, symmetric, zero diagonal
  double offset = 0.0;

  explicit DenseIsing(const IsingModel& m)
      : n(m.num_spins), h(static_cast<std::size_t>(n), 0.0), J(static_cast<std::size_t>(n) * n, 0.0), offset(m.offset) {
    for (const auto& [i, c] : m.h) h.at(i) += c;
    for (const auto& [ij, c] : m.J) {
      J.at(static_cast<std::size_t>(ij.first) * n + ij.second) += c;
      J.at(static_cast<std::size_t>(ij.second) * n + ij.first) += c;
    }
  }

  const double* row(int i) const { return J.data() + static_cast<std::size_t>(i) * n; }

  std::vector<double> fields(const Spins& s) const {
    std::vector<double> f(h);
    for (int i = 0; i < n; ++i) {
      const double* r = row(i);
      for (int j = 0; j < n; ++j) f[i] += r[j] * s[j];
    }
    return f;
  }

  void flip(Spins& s, std::vector<double>& f, int i) const {
    s[i] = static_cast<std::int8_t>(-s[i]);
    const double* r = row(i);
    const double d = 2.0 * s[i];
    for (int j = 0; j < n; ++j) f[j] += d * r[j];
  }
};

inline Spins random_spins(int n, std::mt19937_64& rng) {
  Spins s(static_cast<std::size_t>(n));
  for (auto& x : s) x = (rng() >> 63) ? 1 : -1;
  return s;
}

inline void finish(SolveResult& r, const IsingModel& m, std::chrono::steady_clock::time_point t0) {
  for (auto& smp : r.samples) {
    smp.energy = m.energy(smp.spins);  // recomputed, not accumulated
    if (r.best.empty() || smp.energy < r.best_energy) {
      r.best = smp.spins;
      r.best_energy = smp.energy;
    }
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Throws unless the model fits the chip: spin capacity and integer
/// coefficients inside [coeff_min, coeff_max].
inline void check_chip_constraints(const IsingModel& m, const ChipProfile& chip) {
  chip.validate();
  if (m.num_spins > chip.spin_budget)
    throw std::invalid_argument("emulator: " + std::to_string(m.num_spins) + " spins exceed capacity " +
                                std::to_string(chip.spin_budget));
  auto ok = [&](double c) { return c == std::round(c) && c >= chip.coeff_min && c <= chip.coeff_max; };
  for (const auto& [i, c] : m.h)
    if (!ok(c)) throw std::invalid_argument("emulator: field h[" + std::to_string(i) + "] outside chip range");
  for (const auto& [ij, c] : m.J)
    if (!ok(c)) throw std::invalid_argument("emulator: coupling outside chip range");
}

namespace detail {

/// Metropolis sweeps over an integer model; T is wide enough for every field.
template <typename T>
void anneal_samples(const SolveRequest& req, SolveResult& result) {
  const int n = req.model.num_spins;
  std::vector<T> h(static_cast<std::size_t>(n), 0), J(static_cast<std::size_t>(n) * n, 0);
  for (const auto& [i, c] : req.model.h) h[i] = static_cast<T>(c);
  for (const auto& [ij, c] : req.model.J) {
    J[static_cast<std::size_t>(ij.first) * n + ij.second] = static_cast<T>(c);
    J[static_cast<std::size_t>(ij.second) * n + ij.first] = static_cast<T>(c);
  }
  std::mt19937_64 rng(req.seed);
  double best_overall = std::numeric_limits<double>::infinity();
  std::vector<double> temps(static_cast<std::size_t>(req.schedule.sweeps));
  for (int k = 0; k < req.schedule.sweeps; ++k) temps[k] = req.schedule.temperature(k);
  std::vector<double> boltzmann;  // exp(-delta/T) for the current sweep, by delta
  std::vector<long> seen;
  long stamp = 0;

  for (int sample = 0; sample < req.num_samples; ++sample) {
    Spins s = random_spins(n, rng);
    std::vector<T> f(h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f[i] = static_cast<T>(f[i] + J[static_cast<std::size_t>(i) * n + j] * s[j]);
    double e = req.model.energy(s);
    Spins best = s;
    double best_e = e;
    for (int k = 0; k < req.schedule.sweeps; ++k) {
      const double beta = 1.0 / temps[k];
      ++stamp;
      for (int i = 0; i < n; ++i) {
        const int delta = -2 * s[i] * f[i];
        if (delta > 0) {
          // exp(-40) is below the resolution of the 53-bit uniform draw
          if (delta * beta >= 40.0) continue;
          const auto slot = static_cast<std::size_t>(delta);
          if (slot >= boltzmann.size()) {
            boltzmann.resize(slot + 1, 0.0);
            seen.resize(slot + 1, 0);
          }
          if (seen[slot] != stamp) {
            seen[slot] = stamp;
            boltzmann[slot] = std::exp(-delta * beta);
          }
          if (!(uniform01(rng) < boltzmann[slot])) continue;
        }
        s[i] = static_cast<std::int8_t>(-s[i]);
        const T* row = J.data() + static_cast<std::size_t>(i) * n;
        const T d = static_cast<T>(2 * s[i]);
        for (int j = 0; j < n; ++j) f[j] = static_cast<T>(f[j] + d * row[j]);
        e += delta;
        if (e < best_e) {
          best_e = e;
          best = s;
        }
      }
      if (req.record_trace) {
        best_overall = std::min(best_overall, best_e);
        result.trace.push_back({sample * req.schedule.sweeps + k, temps[k], best_overall});
      }
    }
    result.samples.push_back({std::move(best), best_e});
  }
}

}  // namespace detail

inline SolveResult solve_emulator(const SolveRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  check_chip_constraints(req.model, req.chip);
  req.schedule.validate();
  if (req.num_samples < 1) throw std::invalid_argument("emulator: num_samples must be >= 1");
  SolveResult result;
  result.backend = Backend::Emulator;
  // integer coefficients make fields and energy changes exact
  const double field_bound = req.model.max_abs_coeff() * (req.model.num_spins + 1) * 2.0;
  if (field_bound < 32767.0)
    detail::anneal_samples<std::int16_t>(req, result);
  else
    detail::anneal_samples<std::int64_t>(req, result);
  detail::finish(result, req.model, t0);
  return result;
}

/// Single-flip tabu search: each move flips the best admissible spin, even
/// uphill. A flipped spin stays tabu for `tenure` moves unless flipping it
/// would beat the best energy seen.
inline SolveResult solve_tabu(const SolveRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  if (req.num_samples < 1) throw std::invalid_argument("tabu: num_samples must be >= 1");
  const detail::DenseIsing dm(req.model);
  const TabuParams& p = req.tabu;
  const int tenure = std::max(0, std::min(p.tenure, dm.n - 1));
  std::mt19937_64 rng(req.seed);
  SolveResult result;
  result.backend = Backend::Tabu;
  const auto deadline = t0 + std::chrono::duration<double, std::milli>(p.time_budget_ms);

  for (int sample = 0; sample < req.num_samples; ++sample) {
    Spins s = detail::random_spins(dm.n, rng);
    std::vector<double> f = dm.fields(s);
    std::vector<long> tabu_until(static_cast<std::size_t>(dm.n), -1);
    double e = req.model.energy(s);
    Spins best = s;
    double best_e = e;
    long since_best = 0;
    for (long it = 0; it < p.max_iterations && since_best < p.stall_limit && dm.n > 0; ++it) {
      if (p.time_budget_ms > 0.0 && std::chrono::steady_clock::now() >= deadline) break;
      int pick = -1;
      double pick_delta = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dm.n; ++i) {
        const double delta = -2.0 * s[i] * f[i];
        const bool admissible = tabu_until[i] < it || e + delta < best_e;
        if (admissible && delta < pick_delta) {
          pick = i;
          pick_delta = delta;
        }
      }
      if (pick < 0) break;
      dm.flip(s, f, pick);
      e += pick_delta;
      tabu_until[pick] = it + tenure;
      if (e < best_e - 1e-12) {
        best_e = e;
        best = s;
        since_best = 0;
      } else {
        ++since_best;
      }
    }
    result.samples.push_back({std::move(best), best_e});
  }
  detail::finish(result, req.model, t0);
  return result;
}

inline SolveResult solve(const SolveRequest& req) {
  return req.backend == Backend::Emulator ? solve_emulator(req) : solve_tabu(req);
}

/// Solves requests on worker threads. Result i belongs to request i; a
/// failing request yields a result with `error` set.
inline std::vector<SolveResult> batch_solve(const std::vector<SolveRequest>& requests, unsigned threads = 0) {
  std::vector<SolveResult> results(requests.size());
  if (requests.empty()) return results;
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(requests.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      try {
        results[i] = solve(requests[i]);
      } catch (const std::exception& ex) {
        results[i] = SolveResult{};
        results[i].backend = requests[i].backend;
        results[i].error = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace isingsat

#endif  // ISINGSAT_SOLVER_HPP
