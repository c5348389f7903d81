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
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "hamrec/circuit.hpp"
#include "hamrec/hamiltonian.hpp"
#include "hamrec/sensing.hpp"
#include "hamrec/thermal.hpp"
#include "oracles.hpp"

namespace hamrec {
namespace {

CMatrix hadamard() {
  CMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

MeasurementPlan full_plan(int n) {
  MeasurementPlan p{n, {}, false};
  for (std::uint64_t a = 1; a <= signal_length(n); ++a) p.indices.push_back(a);
  return p;
}

TEST(SelectMeasurements, Exhaustive) {
  std::mt19937_64 rng(1);
  const auto plan = select_measurements(3, 63, rng);
  ASSERT_EQ(plan.size(), 63U);
  EXPECT_EQ(std::set<std::uint64_t>(plan.indices.begin(), plan.indices.end()).size(), 63U);
  for (std::size_t k = 1; k < plan.size(); ++k) EXPECT_LE(weight(3, plan.indices[k - 1]), weight(3, plan.indices[k]));
}

TEST(SelectMeasurements, SingleQubitIsPermutation) {
  std::mt19937_64 rng(2);
  auto plan = select_measurements(1, 3, rng);
  std::sort(plan.indices.begin(), plan.indices.end());
  EXPECT_EQ(plan.indices, (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST(SelectMeasurements, SortingKeepsTheSameSet) {
  std::mt19937_64 a(3), b(3);
  auto sorted = select_measurements(3, 20, a, true);
  auto raw = select_measurements(3, 20, b, false);
  EXPECT_FALSE(raw.weight_ordered);
  std::sort(sorted.indices.begin(), sorted.indices.end());
  std::sort(raw.indices.begin(), raw.indices.end());
  EXPECT_EQ(sorted.indices, raw.indices);
}

TEST(SelectMeasurements, RangeChecks) {
  std::mt19937_64 rng(4);
  EXPECT_THROW(select_measurements(3, 0, rng), DomainError);
  EXPECT_THROW(select_measurements(3, 64, rng), DomainError);
}

TEST(WeightClassMeasurements, EnumeratesLowWeightFirst) {
  std::mt19937_64 rng(5);
  const auto plan = weight_class_measurements(3, 40, rng);
  ASSERT_EQ(plan.size(), 40U);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(weight(3, plan.indices[k]), 1);
  for (std::size_t k = 9; k < 36; ++k) EXPECT_EQ(weight(3, plan.indices[k]), 2);
  for (std::size_t k = 36; k < 40; ++k) EXPECT_EQ(weight(3, plan.indices[k]), 3);
  EXPECT_EQ(std::set<std::uint64_t>(plan.indices.begin(), plan.indices.end()).size(), 40U);
}

TEST(CompressionRow, IdentityGivesBasisVectors) {
  const CMatrix u = CMatrix::Identity(8, 8);
  for (std::uint64_t k : {1ULL, 17ULL, 63ULL}) {
    RVector e = RVector::Zero(63);
    e(static_cast<Eigen::Index>(k - 1)) = 1.0;
    EXPECT_LT((compression_row(u, k) - e).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(CompressionRow, HadamardExamples) {
  EXPECT_LT((compression_row(hadamard(), 1) - (RVector(3) << 0, 0, 1).finished()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((compression_row(hadamard(), 2) - (RVector(3) << 0, -1, 0).finished()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CompressionRow, MatchesTraceDefinition) {
  const CMatrix u = circuit_unitary(sample_circuit(2, 200, 9));
  for (std::uint64_t k = 1; k <= 15; ++k) {
    const RVector row = compression_row(u, k);
    for (std::uint64_t b = 1; b <= 15; ++b) {
      const Complex want = (oracle::pauli(2, k) * u * oracle::pauli(2, b) * u.adjoint()).trace() / 4.0;
      EXPECT_NEAR(row(static_cast<Eigen::Index>(b - 1)), want.real(), 1e-12);
      EXPECT_NEAR(want.imag(), 0.0, 1e-12);
    }
    EXPECT_NEAR(row.norm(), 1.0, 1e-12);
  }
}

TEST(CompressionRow, RejectsNonUnitary) {
  EXPECT_THROW(compression_row(2.0 * CMatrix::Identity(2, 2), 1), DomainError);
}

TEST(BuildCompressionMatrix, IdentityAndRowCount) {
  MeasurementPlan p{1, {1, 2, 3}, false};
  EXPECT_LT((build_compression_matrix(CMatrix::Identity(2, 2), p).rows - RMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(),
            1e-15);
  std::mt19937_64 rng(6);
  const auto plan = select_measurements(3, 17, rng);
  const auto c = build_compression_matrix(circuit_unitary(sample_circuit(3, 100, 1)), plan, 1);
  EXPECT_EQ(c.rows.rows(), 17);
  EXPECT_EQ(c.rows.cols(), 63);
  EXPECT_EQ(c.circuit_seed, 1U);
}

TEST(BuildCompressionMatrix, FullMatrixIsOrthogonalIsometry) {
  const CMatrix u = circuit_unitary(sample_circuit(3, std::nullopt, 8));
  const RMatrix c = build_compression_matrix(u, full_plan(3)).rows;
  EXPECT_LT((c * c.transpose() - RMatrix::Identity(63, 63)).cwiseAbs().maxCoeff(), 1e-9);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  RVector v(63);
  for (Eigen::Index i = 0; i < 63; ++i) v(i) = g(rng);
  EXPECT_NEAR((c * v).norm(), v.norm(), 1e-8);
  EXPECT_LE((c.topRows(20) * v).norm(), v.norm() + 1e-12);
}

TEST(SimulateMeasurements, Examples) {
  std::mt19937_64 rng(8);
  const CMatrix u = circuit_unitary(sample_circuit(3, 100, 2));
  const auto plan = select_measurements(3, 10, rng);
  EXPECT_LT(simulate_measurements(DensityMatrix{3, CMatrix::Identity(8, 8) / 8.0}, u, plan, 0.0, rng)
                .cwiseAbs()
                .maxCoeff(),
            1e-15);

  const auto st = gibbs_state(-0.1 * oracle::sigma(3));
  const RVector y = simulate_measurements(st, CMatrix::Identity(2, 2), MeasurementPlan{1, {3}, true}, 0.0, rng);
  EXPECT_NEAR(y(0), std::tanh(0.1), 1e-15);
}

TEST(SimulateMeasurements, LinearModelConsistency) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 5; ++k) {
    const auto h = random_hamiltonian(3, 4, SupportPolicy::UniformRandom, rng);
    const auto st = gibbs_state(hamiltonian_matrix(h, 0.5));
    const CMatrix u = circuit_unitary(sample_circuit(3, std::nullopt, rng()));
    const auto plan = select_measurements(3, 25, rng);
    const RVector y = simulate_measurements(st, u, plan, 0.0, rng);
    const RVector model = build_compression_matrix(u, plan).rows * polarization_vector(st).v;
    EXPECT_LT((y - model).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(y.cwiseAbs().maxCoeff(), 1.0);
    // Heisenberg picture gives the same numbers.
    for (std::size_t r = 0; r < plan.size(); ++r) {
      const CMatrix heis = u.adjoint() * oracle::pauli(3, plan.indices[r]) * u;
      EXPECT_NEAR((heis * st.rho).trace().real(), y(static_cast<Eigen::Index>(r)), 1e-10);
    }
  }
}

TEST(SimulateMeasurements, NoiseOnlyWhenAsked) {
  const CMatrix u = CMatrix::Identity(4, 4);
  const DensityMatrix st{2, CMatrix::Identity(4, 4) / 4.0};
  MeasurementPlan plan{2, {1, 2, 3, 4, 5}, false};
  std::mt19937_64 rng(10);
  const auto before = rng;
  simulate_measurements(st, u, plan, 0.0, rng);
  EXPECT_EQ(rng, before);
  const RVector noisy = simulate_measurements(st, u, plan, 0.01, rng);
  EXPECT_GT(noisy.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(noisy.cwiseAbs().maxCoeff(), 0.1);
  EXPECT_THROW(simulate_measurements(st, u, plan, -1.0, rng), DomainError);
}

TEST(MeasureDirectly, EqualsPolarizationComponents) {
  std::mt19937_64 rng(11);
  const auto h = random_hamiltonian(3, 5, SupportPolicy::UniformRandom, rng);
  const auto st = gibbs_state(hamiltonian_matrix(h, 0.3));
  const auto v = polarization_vector(st).v;
  const auto plan = select_measurements(3, 30, rng);
  const RVector y = measure_directly(st, plan);
  for (std::size_t r = 0; r < plan.size(); ++r) {
    EXPECT_NEAR(y(static_cast<Eigen::Index>(r)), v(static_cast<Eigen::Index>(plan.indices[r] - 1)), 1e-14);
  }
}

}  // namespace
}  // namespace hamrec
