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


#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hamrec/circuit.hpp"
#include "hamrec/pauli.hpp"
#include "oracles.hpp"

namespace hamrec {
namespace {

oracle::CMatrix dense_gate(const Gate& g, int n) {
  const Complex i(0.0, 1.0);
  oracle::CMatrix m(2, 2);
  switch (g.kind) {
    case GateKind::Hadamard: m << 1, 1, 1, -1; m /= std::sqrt(2.0); break;
    case GateKind::Phase: m << 1, 0, 0, i; break;
    case GateKind::PhaseDagger: m << 1, 0, 0, -i; break;
    case GateKind::T: m << 1, 0, 0, std::exp(i * std::numbers::pi / 4.0); break;
    case GateKind::CNOT: return oracle::cnot(n, g.control, g.target);
  }
  return oracle::embed1(n, g.target, m);
}

TEST(GateSet, Sizes) {
  EXPECT_EQ(gate_set_size(1), 4U);
  EXPECT_EQ(gate_set_size(2), 10U);
  EXPECT_EQ(gate_set_size(3), 18U);
  for (int n = 1; n <= 5; ++n) EXPECT_EQ(gate_set(n).size(), gate_set_size(n));
}

TEST(GateSet, DistinctAndValid) {
  const auto set = gate_set(4);
  for (std::size_t a = 0; a < set.size(); ++a) {
    EXPECT_GE(set[a].target, 1);
    EXPECT_LE(set[a].target, 4);
    if (set[a].kind == GateKind::CNOT) {
      EXPECT_NE(set[a].control, set[a].target);
    }
    for (std::size_t b = a + 1; b < set.size(); ++b) EXPECT_FALSE(set[a] == set[b]);
  }
}

TEST(SampleCircuit, DefaultLengths) {
  EXPECT_EQ(sample_circuit(3, std::nullopt, 1).gates.size(), 6561U);
  EXPECT_EQ(default_circuit_length(5), 390625U);
  const auto spec = sample_circuit(3, 100, 1);
  EXPECT_EQ(spec.length, 100U);
  EXPECT_FALSE(spec.default_length());
}

TEST(SampleCircuit, Deterministic) {
  EXPECT_EQ(sample_circuit(3, 500, 42).gates, sample_circuit(3, 500, 42).gates);
  EXPECT_NE(sample_circuit(3, 500, 42).gates, sample_circuit(3, 500, 43).gates);
}

TEST(SampleCircuit, UniformOverGateSet) {
  const auto set = gate_set(3);
  const auto spec = sample_circuit(3, 180000, 7);
  std::map<std::size_t, int> counts;
  for (const Gate& g : spec.gates) {
    counts[static_cast<std::size_t>(std::find(set.begin(), set.end(), g) - set.begin())]++;
  }
  const double p = 1.0 / static_cast<double>(set.size());
  const double sd = std::sqrt(180000 * p * (1 - p));
  ASSERT_EQ(counts.size(), set.size());
  for (const auto& [k, c] : counts) EXPECT_LT(std::abs(c - 180000 * p), 5 * sd) << "gate " << k;
}

TEST(CircuitUnitary, Examples) {
  CircuitSpec empty{1, 0, 0, {}};
  EXPECT_EQ(circuit_unitary(empty), CMatrix::Identity(2, 2));

  CircuitSpec h{1, 1, 0, {{GateKind::Hadamard, 1, 0}}};
  CMatrix had(2, 2);
  had << 1, 1, 1, -1;
  had /= std::sqrt(2.0);
  EXPECT_LT((circuit_unitary(h) - had).cwiseAbs().maxCoeff(), 1e-15);

  CircuitSpec hh{1, 2, 0, {{GateKind::Hadamard, 1, 0}, {GateKind::Hadamard, 1, 0}}};
  EXPECT_LT((circuit_unitary(hh) - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CircuitUnitary, MatchesDenseProductOracle) {
  for (int n = 1; n <= 4; ++n) {
    const auto spec = sample_circuit(n, 300, 100 + static_cast<std::uint64_t>(n));
    oracle::CMatrix want = oracle::CMatrix::Identity(1 << n, 1 << n);
    for (const Gate& g : spec.gates) want = (dense_gate(g, n) * want).eval();
    EXPECT_LT((circuit_unitary(spec) - want).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
  }
}

TEST(CircuitUnitary, OrderIsFirstGateFirst) {
  // T then H differs from H then T; U must equal H * T for the list [T, H].
  CircuitSpec spec{1, 2, 0, {{GateKind::T, 1, 0}, {GateKind::Hadamard, 1, 0}}};
  const oracle::CMatrix want = dense_gate({GateKind::Hadamard, 1, 0}, 1) * dense_gate({GateKind::T, 1, 0}, 1);
  EXPECT_LT((circuit_unitary(spec) - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CircuitUnitary, CnotUsesControlAndTarget) {
  CircuitSpec spec{2, 1, 0, {{GateKind::CNOT, 2, 1}}};
  const CMatrix u = circuit_unitary(spec);
  // Control is qubit 1 (most significant bit): |10> -> |11>.
  EXPECT_EQ(u(3, 2), Complex(1.0, 0.0));
  EXPECT_EQ(u(1, 1), Complex(1.0, 0.0));
}

TEST(CircuitUnitary, UnitaryAtDefaultLength) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    EXPECT_LT(unitarity_defect(circuit_unitary(sample_circuit(3, std::nullopt, seed))), 1e-9);
  }
}

TEST(CircuitUnitary, ConjugationPreservesPauliSpectrum) {
  const CMatrix u = circuit_unitary(sample_circuit(3, std::nullopt, 5));
  for (std::uint64_t a : {1ULL, 18ULL, 63ULL}) {
    const CMatrix c = u * pauli_matrix(PauliIndex(3, a)) * u.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (c + c.adjoint()));
    const RVector ev = es.eigenvalues();
    for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(ev(k), -1.0, 1e-8);
    for (Eigen::Index k = 4; k < 8; ++k) EXPECT_NEAR(ev(k), 1.0, 1e-8);
  }
}

TEST(CircuitUnitary, RejectsInvalidGates) {
  CircuitSpec bad{2, 1, 0, {{GateKind::CNOT, 2, 2}}};
  EXPECT_THROW(circuit_unitary(bad), DomainError);
  CircuitSpec out_of_range{2, 1, 0, {{GateKind::Hadamard, 3, 0}}};
  EXPECT_THROW(circuit_unitary(out_of_range), DomainError);
}

TEST(CircuitJson, RoundTripRegeneratesGates) {
  const auto spec = sample_circuit(3, 50, 77);
  const auto j = to_json(spec);
  EXPECT_FALSE(j.contains("gates"));
  EXPECT_EQ(circuit_from_json(j).gates, spec.gates);
}

}  // namespace
}  // namespace hamrec
