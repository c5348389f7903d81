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
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "hamrec/circuit.hpp"
#include "hamrec/hamiltonian.hpp"
#include "hamrec/recovery.hpp"
#include "hamrec/sensing.hpp"
#include "hamrec/thermal.hpp"
#include "oracles.hpp"

namespace hamrec {
namespace {

RVector planted(int ncols, int k, std::mt19937_64& rng) {
  RVector w = RVector::Zero(ncols);
  std::vector<int> idx(static_cast<std::size_t>(ncols));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  for (int i = 0; i < k; ++i) w(idx[static_cast<std::size_t>(i)]) = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
  return w;
}

TEST(Norms, Examples) {
  EXPECT_EQ(l1_norm(RVector::Zero(4)), 0.0);
  EXPECT_EQ(l1_norm((RVector(3) << 1, -2, 3).finished()), 6.0);
  EXPECT_EQ(l2_norm((RVector(2) << 3, 4).finished()), 5.0);
}

TEST(BasisPursuit, ZeroData) {
  std::mt19937_64 rng(1);
  const RMatrix c = oracle::random_orthonormal_rows(4, 15, rng);
  const auto r = basis_pursuit(c, RVector::Zero(4));
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_EQ(r.w, RVector::Zero(15));
}

TEST(BasisPursuit, SingleIdentityRow) {
  RMatrix c = RMatrix::Zero(1, 3);
  c(0, 0) = 1.0;
  const auto r = basis_pursuit(c, (RVector(1) << 0.5).finished());
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.w - (RVector(3) << 0.5, 0, 0).finished()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BasisPursuit, SquareOrthogonal) {
  std::mt19937_64 rng(2);
  const RMatrix c = oracle::random_orthonormal_rows(15, 15, rng);
  RVector y(15);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < 15; ++i) y(i) = g(rng);
  const auto r = basis_pursuit(c, y);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.w - c.transpose() * y).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(BasisPursuit, PlantedTwoSparseConfirmedByEnumeration) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int attempt = 0; attempt < 50 && checked < 5; ++attempt) {
    const RMatrix c = oracle::random_orthonormal_rows(6, 15, rng);
    RVector w0 = planted(15, 2, rng);
    for (Eigen::Index i = 0; i < 15; ++i) {
      if (w0(i) != 0.0) w0(i) = w0(i) > 0 ? 1.0 : -1.0;
    }
    const RVector y = c * w0;
    const auto best = oracle::l1_by_enumeration(c, y);
    // Only instances where w0 is the unique minimizer are meaningful here.
    if (std::abs(best.objective - 2.0) > 1e-9 || (best.w - w0).cwiseAbs().maxCoeff() > 1e-9) continue;
    const auto r = basis_pursuit(c, y);
    EXPECT_TRUE(r.converged);
    EXPECT_LT((r.w - w0).cwiseAbs().maxCoeff(), 1e-6);
    ++checked;
  }
  EXPECT_EQ(checked, 5);
}

TEST(BasisPursuit, MatchesEnumerationOracle) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const int m = 4 + k % 5;
    const RMatrix c = oracle::random_orthonormal_rows(m, 15, rng);
    const RVector w0 = planted(15, 1 + k % 3, rng);
    const RVector y = c * w0;
    const auto best = oracle::l1_by_enumeration(c, y);
    const auto r = basis_pursuit(c, y);
    ASSERT_TRUE(r.converged) << "instance " << k;
    EXPECT_NEAR(l1_norm(r.w), best.objective, 1e-6) << "instance " << k;
    EXPECT_LT((c * r.w - y).norm(), 1e-9);
    EXPECT_LE(l1_norm(r.w), l1_norm(w0) + 1e-8);
  }
}

TEST(BasisPursuit, GramFallbackForNonOrthonormalRows) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  RMatrix c(6, 15);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = g(rng);
  }
  const RVector y = c * planted(15, 2, rng);
  const auto r = basis_pursuit(c, y);
  EXPECT_TRUE(r.gram_fallback);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(l1_norm(r.w), oracle::l1_by_enumeration(c, y).objective, 1e-6);
}

TEST(BasisPursuit, RejectsBadShapes) {
  EXPECT_THROW(basis_pursuit(RMatrix::Identity(3, 3), RVector::Zero(2)), DomainError);
  EXPECT_THROW(basis_pursuit(RMatrix::Identity(4, 3), RVector::Zero(4)), DomainError);
  RMatrix dependent = RMatrix::Zero(2, 4);
  dependent(0, 0) = dependent(1, 0) = 1.0;
  EXPECT_THROW(basis_pursuit(dependent, RVector::Ones(2)), DomainError);
  SolverOptions bad;
  bad.penalty = 0.0;
  EXPECT_THROW(basis_pursuit(RMatrix::Identity(2, 2), RVector::Ones(2), bad), DomainError);
}

TEST(BasisPursuit, IterationCapIsReportedHonestly) {
  std::mt19937_64 rng(6);
  const RMatrix c = oracle::random_orthonormal_rows(6, 15, rng);
  const RVector y = c * planted(15, 3, rng);
  SolverOptions opts;
  opts.max_iterations = 1;
  const auto r = basis_pursuit(c, y, opts);
  EXPECT_EQ(r.iterations, 1);
  if (!r.converged) {
    EXPECT_FALSE(r.certified);
    EXPECT_EQ(r.w.size(), 15);
  }
}

TEST(BasisPursuit, ScaleCovariant) {
  std::mt19937_64 rng(7);
  const RMatrix c = oracle::random_orthonormal_rows(7, 15, rng);
  const RVector y = c * planted(15, 2, rng);
  const auto base = basis_pursuit(c, y);
  for (double alpha : {0.5, 2.0}) {
    const auto r = basis_pursuit(c, alpha * y);
    EXPECT_LT((r.w - alpha * base.w).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(BasisPursuit, RowPermutationInvariant) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 5; ++k) {
    const auto h = random_hamiltonian(3, 3, SupportPolicy::UniformRandom, rng);
    const auto st = gibbs_state(hamiltonian_matrix(h, 0.1));
    const CMatrix u = circuit_unitary(sample_circuit(3, std::nullopt, rng()));
    const auto plan = select_measurements(3, 20, rng);
    const RMatrix c = build_compression_matrix(u, plan).rows;
    const RVector y = simulate_measurements(st, u, plan, 0.0, rng);
    std::vector<Eigen::Index> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    RMatrix cp(20, 63);
    RVector yp(20);
    for (Eigen::Index r = 0; r < 20; ++r) {
      cp.row(r) = c.row(perm[static_cast<std::size_t>(r)]);
      yp(r) = y(perm[static_cast<std::size_t>(r)]);
    }
    EXPECT_LT((basis_pursuit(c, y).w - basis_pursuit(cp, yp).w).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(BasisPursuit, RecoversThermalSignalAtHighTemperature) {
  // Components far below the penalty scale must still be resolved.
  std::mt19937_64 rng(9);
  const auto h = random_hamiltonian(3, 2, SupportPolicy::UniformRandom, rng);
  const auto st = gibbs_state(hamiltonian_matrix(h, 1e-4));
  const CMatrix u = circuit_unitary(sample_circuit(3, std::nullopt, rng()));
  const auto plan = select_measurements(3, 40, rng);
  const auto c = build_compression_matrix(u, plan);
  const RVector y = simulate_measurements(st, u, plan, 0.0, rng);
  const auto r = basis_pursuit(c, y);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.residual, 1e-10 * y.norm());
  EXPECT_LE(l1_norm(r.w), l1_norm(polarization_vector(st).v) + 1e-12);
}

TEST(BasisPursuit, NoisyModeStopsInsideTheBall) {
  std::mt19937_64 rng(10);
  const RMatrix c = oracle::random_orthonormal_rows(8, 15, rng);
  RVector y = c * planted(15, 2, rng);
  std::normal_distribution<double> g(0.0, 1e-3);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += g(rng);
  SolverOptions opts;
  opts.residual_ball = 1e-3 * std::sqrt(8.0);
  const auto r = basis_pursuit(c, y, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.residual, opts.residual_ball * (1 + 1e-12));
}

TEST(NoCsEstimate, Examples) {
  EXPECT_EQ(no_cs_estimate(MeasurementPlan{2, {}, true}, RVector(0)).v, RVector::Zero(15));

  std::mt19937_64 rng(11);
  const auto h = random_hamiltonian(2, 3, SupportPolicy::UniformRandom, rng);
  const auto st = gibbs_state(hamiltonian_matrix(h, 0.2));
  MeasurementPlan full{2, {}, false};
  for (std::uint64_t a = 1; a <= 15; ++a) full.indices.push_back(a);
  EXPECT_EQ(no_cs_estimate(full, measure_directly(st, full)).v, polarization_vector(st).v);

  EXPECT_THROW(no_cs_estimate(full, RVector::Zero(3)), DomainError);
}

TEST(NoCsEstimate, ZeroesTheUnmeasuredTail) {
  std::mt19937_64 rng(12);
  const auto h = random_hamiltonian(3, 4, SupportPolicy::UniformRandom, rng);
  const auto st = gibbs_state(hamiltonian_matrix(h, 0.3));
  const RVector v = polarization_vector(st).v;
  MeasurementPlan plan{3, {}, false};
  for (const auto& [a, j] : h.terms) plan.indices.push_back(a);
  const RVector est = no_cs_estimate(plan, measure_directly(st, plan)).v;
  RVector tail = v;
  for (std::uint64_t a : plan.indices) tail(static_cast<Eigen::Index>(a - 1)) = 0.0;
  EXPECT_NEAR((v - est).norm(), tail.norm(), 1e-14);
}

}  // namespace
}  // namespace hamrec
