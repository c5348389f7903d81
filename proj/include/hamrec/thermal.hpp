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
#include <cmath>

#include <Eigen/Eigenvalues>

#include "hamrec/common.hpp"
#include "hamrec/pauli.hpp"

namespace hamrec {

struct DensityMatrix {
  int n = 1;
  CMatrix rho;
};

/// v_a = Tr(lambda_a rho) for a = 1 .. 4^n - 1, stored at position a - 1.
struct PolarizationVector {
  int n = 1;
  RVector v;
};

/// Eigenvalues below this are raised to it before taking a logarithm.
inline constexpr double kLogClip = 1e-12;

namespace detail {

inline Eigen::SelfAdjointEigenSolver<CMatrix> hermitian_eigen(const CMatrix& a, const char* what) {
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": Hermitian eigendecomposition failed");
  }
  return es;
}

}  // namespace detail

/// rho = exp(-betaH) / Tr exp(-betaH), spectrum shifted by its minimum first.
inline DensityMatrix gibbs_state(const CMatrix& beta_h) {
  require_hermitian(beta_h, 1e-10, "gibbs_state");
  const int n = qubits_of(beta_h);
  const auto es = detail::hermitian_eigen(beta_h, "gibbs_state");
  const RVector& energies = es.eigenvalues();
  const double e_min = energies.minCoeff();
  RVector weights = (-(energies.array() - e_min)).exp().matrix();
  weights /= weights.sum();
  const CMatrix& vecs = es.eigenvectors();
  CMatrix rho = vecs * weights.cast<Complex>().asDiagonal() * vecs.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  return {n, std::move(rho)};
}

inline PolarizationVector polarization_vector(const DensityMatrix& state) {
  const int n = state.n;
  if (qubits_of(state.rho) != n) throw DomainError("polarization_vector: size does not match n");
  const std::uint64_t len = signal_length(n);
  PolarizationVector out{n, RVector(static_cast<Eigen::Index>(len))};
  for (std::uint64_t a = 1; a <= len; ++a) {
    out.v(static_cast<Eigen::Index>(a - 1)) = trace_with_pauli(pauli_action(n, a), state.rho).real();
  }
  return out;
}

/// 2^-n (I + sum_a v_a lambda_a) plus the outcome of a positivity check.
struct StateEstimate {
  CMatrix rho;
  double min_eigenvalue = 0.0;
  bool physical = true;
};

inline StateEstimate state_from_polarization(const PolarizationVector& pv) {
  if (static_cast<std::uint64_t>(pv.v.size()) != signal_length(pv.n)) {
    throw DomainError("state_from_polarization: length must be 4^n - 1");
  }
  RVector c(pv.v.size() + 1);
  c(0) = 1.0;
  c.tail(pv.v.size()) = pv.v;
  StateEstimate est;
  est.rho = matrix_from_coefficients(c) / static_cast<double>(hilbert_dim(pv.n));
  const auto es = detail::hermitian_eigen(est.rho, "state_from_polarization");
  est.min_eigenvalue = es.eigenvalues().minCoeff();
  est.physical = est.min_eigenvalue >= -1e-10;
  return est;
}

struct LogDiagnostics {
  bool clipped = false;
  int clipped_count = 0;
  double min_eigenvalue = 0.0;
};

struct HamiltonianEstimate {
  CMatrix beta_h;  // beta * H_est, traceless
  LogDiagnostics diagnostics;
};

/**
 * beta*H_est = 2^-n Tr(ln rho) I - ln rho.
 *
 * Eigenvalues below kLogClip are clipped before the logarithm and the
 * diagnostics record it; the trial continues with the clipped spectrum.
 */
inline HamiltonianEstimate hamiltonian_from_state(const CMatrix& rho) {
  require_hermitian(rho, 1e-10, "hamiltonian_from_state");
  qubits_of(rho);
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > 1e-8) {
    throw DomainError("hamiltonian_from_state: trace is not 1");
  }
  const auto es = detail::hermitian_eigen(rho, "hamiltonian_from_state");
  RVector logs = es.eigenvalues();
  HamiltonianEstimate out;
  out.diagnostics.min_eigenvalue = logs.minCoeff();
  for (Eigen::Index i = 0; i < logs.size(); ++i) {
    if (logs(i) < kLogClip) {
      logs(i) = kLogClip;
      ++out.diagnostics.clipped_count;
    }
    logs(i) = std::log(logs(i));
  }
  out.diagnostics.clipped = out.diagnostics.clipped_count > 0;
  // Removing the mean of the log-spectrum is the trace term of the formula.
  const double mean = logs.mean();
  const RVector shifted = (mean - logs.array()).matrix();
  const CMatrix& vecs = es.eigenvectors();
  out.beta_h = vecs * shifted.cast<Complex>().asDiagonal() * vecs.adjoint();
  out.beta_h = 0.5 * (out.beta_h + out.beta_h.adjoint());
  return out;
}

}  // namespace hamrec
