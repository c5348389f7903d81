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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "hamrec/circuit.hpp"
#include "hamrec/common.hpp"
#include "hamrec/hamiltonian.hpp"
#include "hamrec/recovery.hpp"
#include "hamrec/sensing.hpp"
#include "hamrec/thermal.hpp"

namespace hamrec {

inline constexpr double kDefaultThreshold = 1e-4;

enum class Protocol { CS, NoCS };

inline std::string to_string(Protocol p) { return p == Protocol::CS ? "CS" : "NoCS"; }

inline Protocol parse_protocol(const std::string& s) {
  if (s == "CS" || s == "cs") return Protocol::CS;
  if (s == "NoCS" || s == "nocs" || s == "no-cs") return Protocol::NoCS;
  throw DomainError("unknown protocol '" + s + "'");
}

struct Metrics {
  double frobenius_error_over_eta = 0.0;  // ||H_est - H||_F / eta
  double normalized_error = 0.0;          // ||H_est - H||_F / ||H||_F
  bool success = false;
  bool clipped = false;
};

/**
 * Both errors are taken between beta-scaled matrices and divided by eta*beta
 * (or by ||beta H||_F), so eta and beta never appear on their own.
 */
inline Metrics compute_metrics(const CMatrix& beta_h_est, const SparseHamiltonian& h_true, double eta_beta,
                               double threshold = kDefaultThreshold) {
  if (!(eta_beta > 0.0)) throw DomainError("compute_metrics: eta_beta must be positive");
  if (!(threshold > 0.0)) throw DomainError("compute_metrics: threshold must be positive");
  if (h_true.terms.empty()) throw DomainError("compute_metrics: H = 0 has no normalized error");
  const CMatrix beta_h = hamiltonian_matrix(h_true, eta_beta);
  if (beta_h_est.rows() != beta_h.rows() || beta_h_est.cols() != beta_h.cols()) {
    throw DomainError("compute_metrics: shapes disagree");
  }
  const double ref = beta_h.norm();
  if (ref == 0.0) throw DomainError("compute_metrics: H = 0 has no normalized error");
  const double diff = (beta_h_est - beta_h).norm();
  Metrics m;
  m.frobenius_error_over_eta = diff / eta_beta;
  m.normalized_error = diff / ref;
  m.success = m.normalized_error < threshold;
  return m;
}

struct TrialOptions {
  SolverOptions solver;
  std::optional<std::size_t> circuit_length;  // default n^8
  double noise_sigma = 0.0;
  double threshold = kDefaultThreshold;
  /// Only steers the no-CS plan: two-local runs enumerate weight classes.
  SupportPolicy policy = SupportPolicy::UniformRandom;
};

struct TrialSeeds {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;
  std::uint64_t circuit = 0;
};

struct SolverDiagnostics {
  long iterations = 0;
  double residual = 0.0;
  bool converged = true;
  bool certified = false;
  bool gram_fallback = false;
  bool physical = true;          // reconstructed state is PSD
  double min_eigenvalue = 0.0;   // of the reconstructed state
  int clipped_count = 0;
};

struct TrialResult {
  Protocol protocol = Protocol::CS;
  int n = 1;
  std::size_t s = 0;
  SupportPolicy policy = SupportPolicy::UniformRandom;
  double eta_beta = 0.0;
  std::size_t m = 0;
  Metrics metrics;
  SolverDiagnostics diagnostics;
  TrialSeeds seeds;
  std::size_t circuit_length = 0;  // 0 for no-CS
  std::vector<std::uint64_t> measured;
  double wall_seconds = 0.0;
};

namespace detail {

inline void check_trial_inputs(const SparseHamiltonian& h, double eta_beta, std::size_t m, const TrialOptions& opts) {
  h.validate();
  if (h.terms.empty()) throw DomainError("trial: H = 0 has no normalized error");
  if (!(eta_beta > 0.0)) throw DomainError("trial: eta_beta must be positive");
  if (m < 1 || m > signal_length(h.n)) throw DomainError("trial: M out of range");
  if (!(opts.noise_sigma >= 0.0)) throw DomainError("trial: noise sigma must be >= 0");
  opts.solver.validate();
}

inline void finish_trial(TrialResult& r, const PolarizationVector& v_est, const SparseHamiltonian& h,
                         double eta_beta, double threshold) {
  const StateEstimate st = state_from_polarization(v_est);
  r.diagnostics.physical = st.physical;
  r.diagnostics.min_eigenvalue = st.min_eigenvalue;
  const HamiltonianEstimate est = hamiltonian_from_state(st.rho);
  r.diagnostics.clipped_count = est.diagnostics.clipped_count;
  r.metrics = compute_metrics(est.beta_h, h, eta_beta, threshold);
  r.metrics.clipped = est.diagnostics.clipped;
}

}  // namespace detail

/**
 * One compressed-sensing trial. The rng supplies, in order: the circuit seed,
 * the measurement plan, then noise (only when sigma > 0).
 *
 * w estimates the polarization of the state before rotation: the rows of C
 * already map the original vector to the rotated measurements, so no inverse
 * rotation follows the solve.
 */
template <std::uniform_random_bit_generator Rng>
TrialResult run_cs_trial(const SparseHamiltonian& h, double eta_beta, std::size_t m, Rng& rng,
                         const TrialOptions& opts = {}) {
  detail::check_trial_inputs(h, eta_beta, m, opts);
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult r;
  r.protocol = Protocol::CS;
  r.n = h.n;
  r.s = h.sparsity();
  r.policy = opts.policy;
  r.eta_beta = eta_beta;
  r.m = m;

  const DensityMatrix state = gibbs_state(hamiltonian_matrix(h, eta_beta));
  r.seeds.circuit = rng();
  const CircuitSpec spec = sample_circuit(h.n, opts.circuit_length, r.seeds.circuit);
  r.circuit_length = spec.length;
  const CMatrix u = circuit_unitary(spec);
  const MeasurementPlan plan = select_measurements(h.n, m, rng);
  r.measured = plan.indices;
  const CompressionMatrix c = build_compression_matrix(u, plan, spec.seed);
  const RVector y = simulate_measurements(state, u, plan, opts.noise_sigma, rng);

  SolverOptions so = opts.solver;
  if (opts.noise_sigma > 0.0 && so.residual_ball == 0.0) {
    so.residual_ball = opts.noise_sigma * std::sqrt(static_cast<double>(m));
  }
  const RecoveryResult rec = basis_pursuit(c, y, so);
  r.diagnostics.iterations = rec.iterations;
  r.diagnostics.residual = rec.residual;
  r.diagnostics.converged = rec.converged;
  r.diagnostics.certified = rec.certified;
  r.diagnostics.gram_fallback = rec.gram_fallback;

  detail::finish_trial(r, PolarizationVector{h.n, rec.w}, h, eta_beta, opts.threshold);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Direct plan for the no-CS protocol (see TrialOptions::policy).
template <std::uniform_random_bit_generator Rng>
MeasurementPlan no_cs_plan(int n, std::size_t m, SupportPolicy policy, Rng& rng) {
  return policy == SupportPolicy::TwoLocal ? weight_class_measurements(n, m, rng)
                                           : select_measurements(n, m, rng, true);
}

/// Truncated tomography: measure M Paulis on rho itself, zero the rest.
template <std::uniform_random_bit_generator Rng>
TrialResult run_no_cs_trial(const SparseHamiltonian& h, double eta_beta, std::size_t m, Rng& rng,
                            const TrialOptions& opts = {}) {
  detail::check_trial_inputs(h, eta_beta, m, opts);
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult r;
  r.protocol = Protocol::NoCS;
  r.n = h.n;
  r.s = h.sparsity();
  r.policy = opts.policy;
  r.eta_beta = eta_beta;
  r.m = m;

  const DensityMatrix state = gibbs_state(hamiltonian_matrix(h, eta_beta));
  const MeasurementPlan plan = no_cs_plan(h.n, m, opts.policy, rng);
  r.measured = plan.indices;
  RVector y = measure_directly(state, plan);
  if (opts.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, opts.noise_sigma);
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += noise(rng);
  }
  detail::finish_trial(r, no_cs_estimate(plan, y), h, eta_beta, opts.threshold);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline nlohmann::json to_json(const TrialResult& r) {
  return {{"protocol", to_string(r.protocol)},
          {"n", r.n},
          {"s", r.s},
          {"policy", to_string(r.policy)},
          {"eta_beta", r.eta_beta},
          {"M", r.m},
          {"metrics",
           {{"frobenius_error_over_eta", r.metrics.frobenius_error_over_eta},
            {"normalized_error", r.metrics.normalized_error},
            {"success", r.metrics.success},
            {"clipped", r.metrics.clipped}}},
          {"solver",
           {{"iterations", r.diagnostics.iterations},
            {"residual", r.diagnostics.residual},
            {"converged", r.diagnostics.converged},
            {"certified", r.diagnostics.certified},
            {"gram_fallback", r.diagnostics.gram_fallback},
            {"physical", r.diagnostics.physical},
            {"min_eigenvalue", r.diagnostics.min_eigenvalue},
            {"clipped_count", r.diagnostics.clipped_count}}},
          {"seeds", {{"master", r.seeds.master}, {"trial", r.seeds.trial}, {"circuit", r.seeds.circuit}}},
          {"circuit_length", r.circuit_length},
          {"measured", r.measured},
          {"wall_seconds", r.wall_seconds}};
}

}  // namespace hamrec
