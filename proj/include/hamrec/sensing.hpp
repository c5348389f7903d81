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
#include <random>
#include <vector>

#include "hamrec/common.hpp"
#include "hamrec/hamiltonian.hpp"
#include "hamrec/pauli.hpp"
#include "hamrec/thermal.hpp"

namespace hamrec {

/// Ordered list of the Pauli strings to measure.
struct MeasurementPlan {
  int n = 1;
  std::vector<std::uint64_t> indices;
  bool weight_ordered = true;

  std::size_t size() const { return indices.size(); }
};

/// M rows of the Pauli-basis matrix of conjugation by U.
struct CompressionMatrix {
  RMatrix rows;  // M x (4^n - 1)
  std::uint64_t circuit_seed = 0;
  MeasurementPlan plan;
};

inline void stable_sort_by_weight(MeasurementPlan& plan) {
  std::stable_sort(plan.indices.begin(), plan.indices.end(),
                   [n = plan.n](std::uint64_t a, std::uint64_t b) { return weight(n, a) < weight(n, b); });
}

/// M distinct indices drawn uniformly from 1 .. 4^n - 1, optionally sorted by weight.
template <std::uniform_random_bit_generator Rng>
MeasurementPlan select_measurements(int n, std::size_t m, Rng& rng, bool weight_ordered = true) {
  if (n < 1 || n > kDefaultMaxQubits) throw DomainError("select_measurements: bad qubit count");
  if (m < 1 || m > signal_length(n)) throw DomainError("select_measurements: M out of range");
  MeasurementPlan plan;
  plan.n = n;
  plan.weight_ordered = weight_ordered;
  plan.indices = sample_without_replacement(admissible_support(n, SupportPolicy::UniformRandom), m, rng);
  if (weight_ordered) stable_sort_by_weight(plan);
  return plan;
}

/// Every weight-1 index in random order, then every weight-2 index, and so on; first M kept.
template <std::uniform_random_bit_generator Rng>
MeasurementPlan weight_class_measurements(int n, std::size_t m, Rng& rng) {
  if (n < 1 || n > kDefaultMaxQubits) throw DomainError("weight_class_measurements: bad qubit count");
  if (m < 1 || m > signal_length(n)) throw DomainError("weight_class_measurements: M out of range");
  MeasurementPlan plan;
  plan.n = n;
  plan.weight_ordered = true;
  for (int w = 1; w <= n && plan.indices.size() < m; ++w) {
    auto cls = indices_of_weight(n, w);
    const std::size_t k = cls.size();
    cls = sample_without_replacement(std::move(cls), k, rng);
    for (std::uint64_t a : cls) {
      if (plan.indices.size() == m) break;
      plan.indices.push_back(a);
    }
  }
  return plan;
}

namespace detail {

inline void require_unitary(const CMatrix& u, const char* what) {
  if (u.rows() != u.cols() || u.rows() < 2 ||
      (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-9) {
    throw DomainError(std::string(what) + ": U is not unitary");
  }
}

// U^dagger lambda_k U, using lambda_k U = phased row permutation of U.
inline CMatrix heisenberg_pauli(const CMatrix& u, int n, std::uint64_t k) {
  const PauliAction act = pauli_action(n, k);
  CMatrix lu(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.rows(); ++j) {
    const auto uj = static_cast<std::uint64_t>(j);
    lu.row(static_cast<Eigen::Index>(uj ^ act.flip)) = act.phase(uj) * u.row(j);
  }
  return u.adjoint() * lu;
}

inline RVector compression_row_unchecked(const CMatrix& u, int n, std::uint64_t k) {
  const CMatrix a = heisenberg_pauli(u, n, k);
  const std::uint64_t len = signal_length(n);
  const double scale = 1.0 / static_cast<double>(hilbert_dim(n));
  RVector row(static_cast<Eigen::Index>(len));
  for (std::uint64_t b = 1; b <= len; ++b) {
    row(static_cast<Eigen::Index>(b - 1)) = scale * trace_with_pauli(pauli_action(n, b), a).real();
  }
  return row;
}

}  // namespace detail

/// Row k of C: C_kb = 2^-n Tr(lambda_k U lambda_b U^dagger), b = 1 .. 4^n - 1.
inline RVector compression_row(const CMatrix& u, std::uint64_t k) {
  detail::require_unitary(u, "compression_row");
  const int n = qubits_of(u);
  if (k < 1 || k > signal_length(n)) throw DomainError("compression_row: index out of range");
  return detail::compression_row_unchecked(u, n, k);
}

inline CompressionMatrix build_compression_matrix(const CMatrix& u, const MeasurementPlan& plan,
                                                  std::uint64_t circuit_seed = 0) {
  detail::require_unitary(u, "build_compression_matrix");
  const int n = qubits_of(u);
  if (n != plan.n) throw DomainError("build_compression_matrix: plan is for a different n");
  CompressionMatrix c;
  c.circuit_seed = circuit_seed;
  c.plan = plan;
  c.rows.resize(static_cast<Eigen::Index>(plan.size()), static_cast<Eigen::Index>(signal_length(n)));
  for (std::size_t r = 0; r < plan.size(); ++r) {
    const std::uint64_t k = plan.indices[r];
    if (k < 1 || k > signal_length(n)) throw DomainError("build_compression_matrix: index out of range");
    c.rows.row(static_cast<Eigen::Index>(r)) = detail::compression_row_unchecked(u, n, k).transpose();
  }
  return c;
}

/**
 * y_k = Tr(lambda_k U rho U^dagger), plus i.i.d. N(0, sigma^2) noise when
 * sigma > 0. The rng is only consumed when sigma > 0.
 */
template <std::uniform_random_bit_generator Rng>
RVector simulate_measurements(const DensityMatrix& state, const CMatrix& u, const MeasurementPlan& plan,
                              double noise_sigma, Rng& rng) {
  if (!(noise_sigma >= 0.0)) throw DomainError("simulate_measurements: sigma must be >= 0");
  if (state.n != plan.n || qubits_of(u) != plan.n) {
    throw DomainError("simulate_measurements: qubit counts disagree");
  }
  const CMatrix rotated = u * state.rho * u.adjoint();
  RVector y(static_cast<Eigen::Index>(plan.size()));
  for (std::size_t r = 0; r < plan.size(); ++r) {
    y(static_cast<Eigen::Index>(r)) = trace_with_pauli(pauli_action(plan.n, plan.indices[r]), rotated).real();
  }
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Eigen::Index r = 0; r < y.size(); ++r) y(r) += noise(rng);
  }
  return y;
}

/// Direct measurement Tr(lambda_k rho), i.e. the U = I path.
inline RVector measure_directly(const DensityMatrix& state, const MeasurementPlan& plan) {
  if (state.n != plan.n) throw DomainError("measure_directly: qubit counts disagree");
  RVector y(static_cast<Eigen::Index>(plan.size()));
  for (std::size_t r = 0; r < plan.size(); ++r) {
    y(static_cast<Eigen::Index>(r)) = trace_with_pauli(pauli_action(plan.n, plan.indices[r]), state.rho).real();
  }
  return y;
}

}  // namespace hamrec
