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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hamrec/circuit.hpp"
#include "hamrec/hamiltonian.hpp"
#include "hamrec/pauli.hpp"
#include "hamrec/pipeline.hpp"
#include "hamrec/recovery.hpp"
#include "hamrec/sensing.hpp"
#include "hamrec/thermal.hpp"

namespace hamrec {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// A fast invariant suite (seconds at n <= 3) used by `hamrec selftest`.
inline std::vector<CheckResult> run_selftest(std::uint64_t seed = 1) {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, const std::function<std::string()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = std::move(name);
    try {
      r.detail = body();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  std::mt19937_64 rng(seed);

  check("pauli_orthogonality", [&]() -> std::string {
    PauliMatrixTable table(2);
    for (std::uint64_t a = 0; a < 16; ++a) {
      for (std::uint64_t b = 0; b < 16; ++b) {
        const Complex tr = (table.get(a) * table.get(b)).trace();
        if (std::abs(tr - Complex(a == b ? 4.0 : 0.0, 0.0)) > 1e-12) return "Tr(l_a l_b) != 4 delta_ab";
      }
    }
    return {};
  });

  check("hamiltonian_round_trip", [&]() -> std::string {
    for (int k = 0; k < 10; ++k) {
      const auto h = random_hamiltonian(3, 1 + k % 6, SupportPolicy::UniformRandom, rng);
      const DensityMatrix st = gibbs_state(hamiltonian_matrix(h, 0.1));
      const auto est = hamiltonian_from_state(state_from_polarization(polarization_vector(st)).rho);
      if (compute_metrics(est.beta_h, h, 0.1).normalized_error > 1e-9) return "exact-vector round trip error";
    }
    return {};
  });

  check("compression_orthonormal", [&]() -> std::string {
    const CMatrix u = circuit_unitary(sample_circuit(3, std::nullopt, rng()));
    MeasurementPlan plan{3, {}, false};
    for (std::uint64_t a = 1; a <= 63; ++a) plan.indices.push_back(a);
    const RMatrix c = build_compression_matrix(u, plan).rows;
    if ((c * c.transpose() - RMatrix::Identity(63, 63)).cwiseAbs().maxCoeff() > 1e-9) return "C C^T != I";
    return {};
  });

  check("sparse_recovery", [&]() -> std::string {
    const CMatrix u = circuit_unitary(sample_circuit(3, std::nullopt, rng()));
    const auto plan = select_measurements(3, 30, rng);
    const RMatrix c = build_compression_matrix(u, plan).rows;
    RVector w = RVector::Zero(63);
    w(4) = 0.7;
    w(40) = -0.3;
    const auto r = basis_pursuit(c, c * w);
    if (!r.converged || (r.w - w).cwiseAbs().maxCoeff() > 1e-8) return "planted 2-sparse vector not recovered";
    return {};
  });

  check("full_measurement_limit", [&]() -> std::string {
    const auto h = random_hamiltonian(3, 3, SupportPolicy::UniformRandom, rng);
    std::mt19937_64 trng(rng());
    const auto r = run_cs_trial(h, 0.1, 63, trng);
    if (!(r.metrics.normalized_error < 1e-6)) return "CS with M = N is not exact";
    return {};
  });

  check("seed_determinism", [&]() -> std::string {
    const auto h = random_hamiltonian(3, 2, SupportPolicy::UniformRandom, rng);
    std::mt19937_64 a(99), b(99);
    const auto ra = run_cs_trial(h, 0.1, 12, a);
    const auto rb = run_cs_trial(h, 0.1, 12, b);
    if (ra.metrics.normalized_error != rb.metrics.normalized_error || ra.measured != rb.measured) {
      return "identical seeds gave different trials";
    }
    return {};
  });

  return out;
}

}  // namespace hamrec
