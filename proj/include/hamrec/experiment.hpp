// Copyright 2026 The hamrec Authors
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


#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hamrec/common.hpp"
#include "hamrec/hamiltonian.hpp"
#include "hamrec/pipeline.hpp"

namespace hamrec {

// ---------------------------------------------------------------------------
// Seeds

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class SeedStream : std::uint64_t { CS = 1, NoCS = 2, Heatmap = 3, Hamiltonian = 4 };

/**
 * Trial seed = sm(sm(sm(sm(master) ^ stream) ^ point) ^ trial), sm = splitmix64.
 * `point` packs the grid position as (s << 32) | M. Seeds depend only on
 * position, never on which worker ran what first.
 */
inline std::uint64_t mix_seed(std::uint64_t master, SeedStream stream, std::uint64_t point, std::uint64_t trial) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ point);
  return splitmix64(h ^ trial);
}

inline std::uint64_t grid_point(std::size_t s, std::size_t m) {
  return (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint64_t>(m);
}

// ---------------------------------------------------------------------------
// Parallel map

inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls f(i) for i in [0, count) on `jobs` threads; f writes into slot i only.
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F&& f) {
  jobs = std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(count, 1));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Configuration

struct MRange {
  std::size_t min = 2;
  std::size_t max = 2;
  std::size_t step = 1;
};

struct ExperimentConfig {
  int n = 3;
  double eta_beta = 0.1;
  SupportPolicy policy = SupportPolicy::UniformRandom;
  std::vector<std::size_t> s{1};
  std::optional<std::vector<std::size_t>> m_list;
  std::optional<MRange> m_range;
  std::size_t grid = 16;  // heat-map resolution per axis
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double threshold = kDefaultThreshold;
  std::optional<std::size_t> circuit_length;
  SolverOptions solver;
  double noise_sigma = 0.0;
  /// Diagnostics only: one H per sparsity, fresh circuits per trial.
  bool fixed_hamiltonian = false;
  std::string out_csv;
  std::string out_svg;

  std::size_t signal_size() const { return static_cast<std::size_t>(signal_length(n)); }

  /// Spacing 1 from M = 2 up to n = 4; every tenth M from 11 beyond that.
  std::vector<std::size_t> default_m() const {
    std::vector<std::size_t> out;
    const std::size_t big_n = signal_size();
    const std::size_t first = n <= 4 ? 2 : 11;
    const std::size_t step = n <= 4 ? 1 : 10;
    for (std::size_t m = first; m <= big_n; m += step) out.push_back(m);
    return out;
  }

  std::vector<std::size_t> resolved_m() const {
    if (m_list) return *m_list;
    if (m_range) {
      std::vector<std::size_t> out;
      for (std::size_t m = m_range->min; m <= m_range->max; m += m_range->step) out.push_back(m);
      return out;
    }
    return default_m();
  }

  void validate() const {
    if (n < 1 || n > kDefaultMaxQubits) throw DomainError("config: n out of range");
    if (!(eta_beta > 0.0) || !std::isfinite(eta_beta)) throw DomainError("config: eta_beta must be positive");
    if (trials < 1) throw DomainError("config: trials must be >= 1");
    if (!(threshold > 0.0)) throw DomainError("config: threshold must be positive");
    if (!(noise_sigma >= 0.0)) throw DomainError("config: noise_sigma must be >= 0");
    if (grid < 2) throw DomainError("config: grid must be >= 2");
    if (m_list && m_range) throw DomainError("config: give either an M list or an M range, not both");
    if (m_range && (m_range->step < 1 || m_range->min < 1 || m_range->min > m_range->max)) {
      throw DomainError("config: bad M range");
    }
    if (circuit_length && *circuit_length < 1) throw DomainError("config: circuit length must be >= 1");
    solver.validate();
    const auto ms = resolved_m();
    if (ms.empty()) throw DomainError("config: empty M list");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (ms[i] < 1 || ms[i] > signal_size()) throw DomainError("config: M out of range 1 .. 4^n - 1");
      if (i > 0 && ms[i] <= ms[i - 1]) throw DomainError("config: M values must be strictly increasing");
    }
    if (s.empty()) throw DomainError("config: no sparsity given");
    for (std::size_t v : s) {
      if (v < 1 || v > admissible_size(n, policy)) throw DomainError("config: s out of range for this policy");
    }
  }

  TrialOptions trial_options() const {
    TrialOptions o;
    o.solver = solver;
    o.circuit_length = circuit_length;
    o.noise_sigma = noise_sigma;
    o.threshold = threshold;
    o.policy = policy;
    return o;
  }
};

inline nlohmann::json to_json(const SolverOptions& o) {
  return {{"feasibility_tol", o.feasibility_tol},
          {"stationarity_tol", o.stationarity_tol},
          {"max_iterations", o.max_iterations},
          {"penalty", o.penalty},
          {"residual_ball", o.residual_ball}};
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  if (!j.is_object()) throw DomainError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw DomainError(where + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace detail

inline SolverOptions solver_options_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"feasibility_tol", "stationarity_tol", "max_iterations", "penalty", "residual_ball"},
                              "solver");
  SolverOptions o;
  if (j.contains("feasibility_tol")) o.feasibility_tol = j.at("feasibility_tol").get<double>();
  if (j.contains("stationarity_tol")) o.stationarity_tol = j.at("stationarity_tol").get<double>();
  if (j.contains("max_iterations")) o.max_iterations = j.at("max_iterations").get<long>();
  if (j.contains("penalty")) o.penalty = j.at("penalty").get<double>();
  if (j.contains("residual_ball")) o.residual_ball = j.at("residual_ball").get<double>();
  o.validate();
  return o;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j = {{"n", c.n},
                      {"eta_beta", c.eta_beta},
                      {"policy", to_string(c.policy)},
                      {"s", c.s},
                      {"grid", c.grid},
                      {"trials", c.trials},
                      {"seed", c.seed},
                      {"threshold", c.threshold},
                      {"solver", to_json(c.solver)},
                      {"noise_sigma", c.noise_sigma},
                      {"fixed_hamiltonian", c.fixed_hamiltonian},
                      {"outputs", {{"csv", c.out_csv}, {"svg", c.out_svg}}}};
  if (c.m_list) j["m"] = *c.m_list;
  if (c.m_range) j["m_range"] = {{"min", c.m_range->min}, {"max", c.m_range->max}, {"step", c.m_range->step}};
  j["circuit_length"] = c.circuit_length ? nlohmann::json(*c.circuit_length) : nlohmann::json(nullptr);
  return j;
}

/// Inverse of to_json; unknown keys anywhere are an error.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j,
                              {"n", "eta_beta", "policy", "s", "m", "m_range", "grid", "trials", "seed", "threshold",
                               "circuit_length", "solver", "noise_sigma", "fixed_hamiltonian", "outputs"},
                              "config");
  ExperimentConfig c;
  if (j.contains("n")) c.n = j.at("n").get<int>();
  if (j.contains("eta_beta")) c.eta_beta = j.at("eta_beta").get<double>();
  if (j.contains("policy")) c.policy = parse_support_policy(j.at("policy").get<std::string>());
  if (j.contains("s")) {
    const auto& s = j.at("s");
    c.s = s.is_array() ? s.get<std::vector<std::size_t>>() : std::vector<std::size_t>{s.get<std::size_t>()};
  }
  if (j.contains("m")) c.m_list = j.at("m").get<std::vector<std::size_t>>();
  if (j.contains("m_range")) {
    const auto& r = j.at("m_range");
    detail::reject_unknown_keys(r, {"min", "max", "step"}, "m_range");
    MRange mr;
    mr.min = r.at("min").get<std::size_t>();
    mr.max = r.at("max").get<std::size_t>();
    if (r.contains("step")) mr.step = r.at("step").get<std::size_t>();
    c.m_range = mr;
  }
  if (j.contains("grid")) c.grid = j.at("grid").get<std::size_t>();
  if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
  if (j.contains("circuit_length") && !j.at("circuit_length").is_null()) {
    c.circuit_length = j.at("circuit_length").get<std::size_t>();
  }
  if (j.contains("solver")) c.solver = solver_options_from_json(j.at("solver"));
  if (j.contains("noise_sigma")) c.noise_sigma = j.at("noise_sigma").get<double>();
  if (j.contains("fixed_hamiltonian")) c.fixed_hamiltonian = j.at("fixed_hamiltonian").get<bool>();
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    detail::reject_unknown_keys(o, {"csv", "svg"}, "outputs");
    if (o.contains("csv")) c.out_csv = o.at("csv").get<std::string>();
    if (o.contains("svg")) c.out_svg = o.at("svg").get<std::string>();
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Statistics

/// Linear-interpolation quantile of sorted data (the usual "type 7").
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= sorted.size()) return sorted[lo];
  if (sorted[lo] == sorted[lo + 1]) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Spearman rank correlation with average ranks for ties; 0 if either side is constant.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("spearman: need two equal samples of size >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepPoint {
  std::size_t m = 0;
  double median_err = 0.0;
  double q1_err = 0.0;
  double q3_err = 0.0;
  double success_rate = 0.0;
  std::size_t unconverged = 0;  // solver hit its iteration cap
  std::size_t errors = 0;       // trial threw; counted as an infinite error
};

struct SweepCurve {
  Protocol protocol = Protocol::CS;
  int n = 3;
  std::size_t s = 1;
  SupportPolicy policy = SupportPolicy::UniformRandom;
  double eta_beta = 0.1;
  std::size_t trials = 0;
  double threshold = kDefaultThreshold;
  std::uint64_t seed = 0;
  std::vector<SweepPoint> points;  // strictly increasing M
};

/// Normalized error and flags of one trial; a thrown trial counts as a failure.
struct TrialOutcome {
  double error = std::numeric_limits<double>::infinity();
  bool success = false;
  bool converged = true;
  bool threw = false;
};

inline SweepPoint summarize(std::size_t m, std::vector<TrialOutcome> outcomes) {
  SweepPoint p;
  p.m = m;
  std::vector<double> errs;
  errs.reserve(outcomes.size());
  std::size_t ok = 0;
  for (const auto& o : outcomes) {
    errs.push_back(o.error);
    ok += o.success ? 1 : 0;
    p.unconverged += o.converged ? 0 : 1;
    p.errors += o.threw ? 1 : 0;
  }
  std::sort(errs.begin(), errs.end());
  p.median_err = sorted_quantile(errs, 0.5);
  p.q1_err = sorted_quantile(errs, 0.25);
  p.q3_err = sorted_quantile(errs, 0.75);
  p.success_rate = static_cast<double>(ok) / static_cast<double>(outcomes.size());
  return p;
}

/// One seeded trial: fresh H (unless fixed) drawn from the trial rng, then the protocol.
inline TrialResult run_seeded_trial(const ExperimentConfig& cfg, Protocol protocol, std::size_t s, std::size_t m,
                                    std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  SparseHamiltonian h;
  if (cfg.fixed_hamiltonian) {
    std::mt19937_64 hrng(mix_seed(cfg.seed, SeedStream::Hamiltonian, grid_point(s, 0), 0));
    h = random_hamiltonian(cfg.n, s, cfg.policy, hrng);
  } else {
    h = random_hamiltonian(cfg.n, s, cfg.policy, rng);
  }
  const TrialOptions opts = cfg.trial_options();
  TrialResult r = protocol == Protocol::CS ? run_cs_trial(h, cfg.eta_beta, m, rng, opts)
                                           : run_no_cs_trial(h, cfg.eta_beta, m, rng, opts);
  r.seeds.master = cfg.seed;
  r.seeds.trial = trial_seed;
  return r;
}

inline TrialOutcome outcome_of(const ExperimentConfig& cfg, Protocol protocol, std::size_t s, std::size_t m,
                               std::uint64_t trial_seed) {
  TrialOutcome o;
  try {
    const TrialResult r = run_seeded_trial(cfg, protocol, s, m, trial_seed);
    o.error = r.metrics.normalized_error;
    o.success = r.metrics.success;
    o.converged = r.diagnostics.converged;
  } catch (const std::exception&) {
    o.threw = true;
  }
  return o;
}

inline SeedStream stream_of(Protocol p) { return p == Protocol::CS ? SeedStream::CS : SeedStream::NoCS; }

/// Both protocol curves for every sparsity in the config, in (s, protocol) order.
inline std::vector<SweepCurve> run_sweeps(const ExperimentConfig& cfg, unsigned jobs = 1) {
  cfg.validate();
  const auto ms = cfg.resolved_m();
  const std::vector<Protocol> protocols{Protocol::CS, Protocol::NoCS};
  const std::size_t per_curve = ms.size() * cfg.trials;
  const std::size_t total = cfg.s.size() * protocols.size() * per_curve;
  std::vector<TrialOutcome> outcomes(total);
  parallel_for(total, jobs, [&](std::size_t i) {
    const std::size_t curve = i / per_curve;
    const std::size_t within = i % per_curve;
    const std::size_t s = cfg.s[curve / protocols.size()];
    const Protocol p = protocols[curve % protocols.size()];
    const std::size_t m = ms[within / cfg.trials];
    const std::size_t t = within % cfg.trials;
    outcomes[i] = outcome_of(cfg, p, s, m, mix_seed(cfg.seed, stream_of(p), grid_point(s, m), t));
  });

  std::vector<SweepCurve> curves;
  for (std::size_t curve = 0; curve < cfg.s.size() * protocols.size(); ++curve) {
    SweepCurve c;
    c.protocol = protocols[curve % protocols.size()];
    c.n = cfg.n;
    c.s = cfg.s[curve / protocols.size()];
    c.policy = cfg.policy;
    c.eta_beta = cfg.eta_beta;
    c.trials = cfg.trials;
    c.threshold = cfg.threshold;
    c.seed = cfg.seed;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(curve * per_curve + k * cfg.trials);
      c.points.push_back(summarize(ms[k], {first, first + static_cast<std::ptrdiff_t>(cfg.trials)}));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

/// (CS, NoCS) for a config with exactly one sparsity.
inline std::pair<SweepCurve, SweepCurve> run_sweep(const ExperimentConfig& cfg, unsigned jobs = 1) {
  if (cfg.s.size() != 1) throw DomainError("run_sweep: expected exactly one sparsity");
  auto curves = run_sweeps(cfg, jobs);
  return {std::move(curves[0]), std::move(curves[1])};
}

// ---------------------------------------------------------------------------
// Heat maps

struct HeatGrid {
  int n = 3;
  double eta_beta = 1e-4;
  SupportPolicy policy = SupportPolicy::UniformRandom;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> s_values;
  std::vector<std::size_t> m_values;
  /// Row-major [s index][M index]; empty where s > M (or s not admissible).
  std::vector<std::optional<double>> cells;

  std::size_t signal_size() const { return static_cast<std::size_t>(signal_length(n)); }
  const std::optional<double>& at(std::size_t si, std::size_t mi) const { return cells[si * m_values.size() + mi]; }
};

/// round(k N / G) for k = 1 .. G, the grid on (0, 1] in units of N.
inline std::vector<std::size_t> grid_axis(std::size_t big_n, std::size_t g) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= g; ++k) {
    const auto v = static_cast<std::size_t>(std::llround(static_cast<double>(k * big_n) / static_cast<double>(g)));
    out.push_back(std::max<std::size_t>(v, 1));
  }
  return out;
}

inline HeatGrid run_heatmap(const ExperimentConfig& cfg, unsigned jobs = 1) {
  cfg.validate();
  HeatGrid g;
  g.n = cfg.n;
  g.eta_beta = cfg.eta_beta;
  g.policy = cfg.policy;
  g.trials = cfg.trials;
  g.seed = cfg.seed;
  g.s_values = grid_axis(cfg.signal_size(), cfg.grid);
  g.m_values = grid_axis(cfg.signal_size(), cfg.grid);
  if (std::adjacent_find(g.m_values.begin(), g.m_values.end()) != g.m_values.end()) {
    throw DomainError("heatmap: grid finer than the number of Pauli strings");
  }
  const std::size_t cells = g.s_values.size() * g.m_values.size();
  const std::size_t cap = admissible_size(cfg.n, cfg.policy);
  auto feasible = [&](std::size_t cell) {
    const std::size_t s = g.s_values[cell / g.m_values.size()];
    return s <= g.m_values[cell % g.m_values.size()] && s <= cap;
  };
  std::vector<TrialOutcome> outcomes(cells * cfg.trials);
  parallel_for(outcomes.size(), jobs, [&](std::size_t i) {
    const std::size_t cell = i / cfg.trials;
    if (!feasible(cell)) return;
    const std::size_t s = g.s_values[cell / g.m_values.size()];
    const std::size_t m = g.m_values[cell % g.m_values.size()];
    const std::size_t t = i % cfg.trials;
    outcomes[i] = outcome_of(cfg, Protocol::CS, s, m, mix_seed(cfg.seed, SeedStream::Heatmap, grid_point(s, m), t));
  });
  g.cells.resize(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (!feasible(cell)) continue;
    std::size_t ok = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) ok += outcomes[cell * cfg.trials + t].success ? 1 : 0;
    g.cells[cell] = static_cast<double>(ok) / static_cast<double>(cfg.trials);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Threshold crossing and speedup

/// Smallest sampled M whose median passes with every larger sampled M passing too.
inline std::optional<std::size_t> crossing_point(const SweepCurve& c, double threshold) {
  std::optional<std::size_t> m_star;
  for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) {
    if (!(it->median_err < threshold)) break;
    m_star = it->m;
  }
  return m_star;
}

struct SpeedupReport {
  std::optional<std::size_t> m_star_cs;
  std::optional<std::size_t> m_star_nocs;
  std::optional<double> ratio;  // M*_nocs / M*_cs
  /// No-CS never crossed: ratio uses (largest sampled M + 1) and is a lower bound.
  bool lower_bound = false;
};

inline SpeedupReport speedup_report(const SweepCurve& cs, const SweepCurve& nocs, double threshold) {
  SpeedupReport r;
  r.m_star_cs = crossing_point(cs, threshold);
  r.m_star_nocs = crossing_point(nocs, threshold);
  if (!r.m_star_cs) return r;
  if (r.m_star_nocs) {
    r.ratio = static_cast<double>(*r.m_star_nocs) / static_cast<double>(*r.m_star_cs);
  } else if (!nocs.points.empty()) {
    r.ratio = static_cast<double>(nocs.points.back().m + 1) / static_cast<double>(*r.m_star_cs);
    r.lower_bound = true;
  }
  return r;
}

inline nlohmann::json to_json(const SpeedupReport& r) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"M_star_cs", opt(r.m_star_cs)},
          {"M_star_nocs", opt(r.m_star_nocs)},
          {"ratio", opt(r.ratio)},
          {"ratio_is_lower_bound", r.lower_bound},
          {"cs_crossed", r.m_star_cs.has_value()},
          {"nocs_crossed", r.m_star_nocs.has_value()}};
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw DomainError("csv: bad number '" + s + "'");
  return v;
}

inline constexpr const char* kSweepHeader =
    "protocol,n,s,policy,eta_beta,M,trials,median_err,q1_err,q3_err,success_rate,threshold,seed";
inline constexpr const char* kHeatmapHeader = "n,eta_beta,s,M,s_over_N,M_over_N,trials,success_rate,seed";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepCurve>& curves) {
  os << kSweepHeader << '\n';
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      os << to_string(c.protocol) << ',' << c.n << ',' << c.s << ',' << to_string(c.policy) << ','
         << format_double(c.eta_beta) << ',' << p.m << ',' << c.trials << ',' << format_double(p.median_err) << ','
         << format_double(p.q1_err) << ',' << format_double(p.q3_err) << ',' << format_double(p.success_rate) << ','
         << format_double(c.threshold) << ',' << c.seed << '\n';
    }
  }
}

inline void write_heatmap_csv(std::ostream& os, const HeatGrid& g) {
  os << kHeatmapHeader << '\n';
  const double big_n = static_cast<double>(g.signal_size());
  for (std::size_t si = 0; si < g.s_values.size(); ++si) {
    for (std::size_t mi = 0; mi < g.m_values.size(); ++mi) {
      const auto& cell = g.at(si, mi);
      os << g.n << ',' << format_double(g.eta_beta) << ',' << g.s_values[si] << ',' << g.m_values[mi] << ','
         << format_double(static_cast<double>(g.s_values[si]) / big_n) << ','
         << format_double(static_cast<double>(g.m_values[mi]) / big_n) << ',' << g.trials << ','
         << (cell ? format_double(*cell) : std::string("NA")) << ',' << g.seed << '\n';
    }
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

/// Reads curves back, grouped by every non-M column; rows must be sorted by M within a curve.
inline std::vector<SweepCurve> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != kSweepHeader) {
    throw DomainError("sweep csv: header does not match");
  }
  std::vector<SweepCurve> curves;
  std::map<std::tuple<std::string, int, std::size_t, std::string, std::string, std::size_t, std::string, std::uint64_t>,
           std::size_t>
      index;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 13) throw DomainError("sweep csv: row " + std::to_string(row) + " has the wrong field count");
    try {
      const auto key = std::make_tuple(f[0], std::stoi(f[1]), std::stoul(f[2]), f[3], f[4], std::stoul(f[6]), f[11],
                                       std::stoull(f[12]));
      auto it = index.find(key);
      if (it == index.end()) {
        SweepCurve c;
        c.protocol = parse_protocol(f[0]);
        c.n = std::stoi(f[1]);
        c.s = std::stoul(f[2]);
        c.policy = parse_support_policy(f[3]);
        c.eta_beta = parse_double(f[4]);
        c.trials = std::stoul(f[6]);
        c.threshold = parse_double(f[11]);
        c.seed = std::stoull(f[12]);
        it = index.emplace(key, curves.size()).first;
        curves.push_back(std::move(c));
      }
      SweepPoint p;
      p.m = std::stoul(f[5]);
      p.median_err = parse_double(f[7]);
      p.q1_err = parse_double(f[8]);
      p.q3_err = parse_double(f[9]);
      p.success_rate = parse_double(f[10]);
      auto& pts = curves[it->second].points;
      if (!pts.empty() && p.m <= pts.back().m) {
        throw DomainError("sweep csv: M not strictly increasing at row " + std::to_string(row));
      }
      pts.push_back(p);
    } catch (const std::invalid_argument&) {
      throw DomainError("sweep csv: unreadable field at row " + std::to_string(row));
    } catch (const std::out_of_range&) {
      throw DomainError("sweep csv: field out of range at row " + std::to_string(row));
    }
  }
  return curves;
}

inline HeatGrid read_heatmap_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != kHeatmapHeader) {
    throw DomainError("heatmap csv: header does not match");
  }
  HeatGrid g;
  std::map<std::pair<std::size_t, std::size_t>, std::optional<double>> cells;
  bool first = true;
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 9) throw DomainError("heatmap csv: wrong field count");
    if (first) {
      g.n = std::stoi(f[0]);
      g.eta_beta = parse_double(f[1]);
      g.trials = std::stoul(f[6]);
      g.seed = std::stoull(f[8]);
      first = false;
    }
    const std::size_t s = std::stoul(f[2]);
    const std::size_t m = std::stoul(f[3]);
    cells[{s, m}] = f[7] == "NA" ? std::optional<double>{} : std::optional<double>{parse_double(f[7])};
    if (std::find(g.s_values.begin(), g.s_values.end(), s) == g.s_values.end()) g.s_values.push_back(s);
    if (std::find(g.m_values.begin(), g.m_values.end(), m) == g.m_values.end()) g.m_values.push_back(m);
  }
  std::sort(g.s_values.begin(), g.s_values.end());
  std::sort(g.m_values.begin(), g.m_values.end());
  g.cells.resize(g.s_values.size() * g.m_values.size());
  for (std::size_t si = 0; si < g.s_values.size(); ++si) {
    for (std::size_t mi = 0; mi < g.m_values.size(); ++mi) {
      auto it = cells.find({g.s_values[si], g.m_values[mi]});
      if (it == cells.end()) throw DomainError("heatmap csv: grid has holes");
      g.cells[si * g.m_values.size() + mi] = it->second;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// SVG

/// Median error against M on a log axis, one polyline per curve.
inline void write_sweep_svg(std::ostream& os, const std::vector<SweepCurve>& curves, double threshold) {
  constexpr double w = 640, h = 400, left = 60, right = 20, top = 20, bottom = 40;
  double m_max = 1, lo = 1e-16, hi = 10;
  for (const auto& c : curves) {
    for (const auto& p : c.points) m_max = std::max(m_max, static_cast<double>(p.m));
  }
  auto px = [&](double m) { return left + (w - left - right) * m / m_max; };
  auto py = [&](double e) {
    const double v = std::clamp(std::log10(std::max(e, lo)), std::log10(lo), std::log10(hi));
    return top + (h - top - bottom) * (std::log10(hi) - v) / (std::log10(hi) - std::log10(lo));
  };
  const char* colors[] = {"#c0392b", "#2c3e50", "#27ae60", "#8e44ad", "#d35400", "#16a085"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << py(threshold) << "\" x2=\"" << w - right << "\" y2=\"" << py(threshold)
     << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (int e = -16; e <= 0; e += 4) {
    os << "<text x=\"4\" y=\"" << py(std::pow(10.0, e)) + 4 << "\" font-size=\"11\">1e" << e << "</text>\n";
  }
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" font-size=\"12\">M</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    os << "<polyline fill=\"none\" stroke=\"" << colors[k % 6] << "\" points=\"";
    for (const auto& p : c.points) os << px(static_cast<double>(p.m)) << ',' << py(p.median_err) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << w - 160 << "\" y=\"" << top + 14 * (k + 1) << "\" font-size=\"11\" fill=\"" << colors[k % 6]
       << "\">" << to_string(c.protocol) << " s=" << c.s << "</text>\n";
  }
  os << "</svg>\n";
}

/// Success rate as gray level (white = 0, black = 1); NA cells hatched red.
inline void write_heatmap_svg(std::ostream& os, const HeatGrid& g) {
  constexpr double cell = 24, margin = 40;
  const double w = margin + cell * static_cast<double>(g.m_values.size()) + 10;
  const double h = margin + cell * static_cast<double>(g.s_values.size()) + 10;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"14\" font-size=\"12\">M/N</text>\n";
  os << "<text x=\"4\" y=\"" << h / 2 << "\" font-size=\"12\">s/N</text>\n";
  for (std::size_t si = 0; si < g.s_values.size(); ++si) {
    for (std::size_t mi = 0; mi < g.m_values.size(); ++mi) {
      const auto& v = g.at(si, mi);
      const double x = margin + cell * static_cast<double>(mi);
      const double y = margin + cell * static_cast<double>(si);
      std::string fill = "#f4c7c3";
      if (v) {
        const int level = static_cast<int>(std::lround(255.0 * (1.0 - *v)));
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level, level);
        fill = buf;
      }
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
         << fill << "\" stroke=\"#ddd\"/>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace hamrec
