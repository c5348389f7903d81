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


// Slow, obviously-correct reference computations used only by tests. None of
// these call into the library code they are compared against.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline CMatrix sigma(int k) {
  const Complex i(0.0, 1.0);
  CMatrix m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// sigma_{a_1} (x) ... (x) sigma_{a_n} with a_1 the most significant digit.
inline CMatrix pauli(int n, std::uint64_t a) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) {
    const int d = static_cast<int>((a >> (2 * q)) & 3);
    out = Eigen::kroneckerProduct(out, sigma(d)).eval();
  }
  return out;
}

/// Embeds a one-qubit gate on qubit t (1 = leftmost factor).
inline CMatrix embed1(int n, int t, const CMatrix& g) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 1; q <= n; ++q) {
    out = Eigen::kroneckerProduct(out, q == t ? g : CMatrix::Identity(2, 2)).eval();
  }
  return out;
}

/// |0><0| (x) I + |1><1| (x) X placed on (control, target).
inline CMatrix cnot(int n, int control, int target) {
  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CMatrix a = CMatrix::Identity(1, 1), b = CMatrix::Identity(1, 1);
  for (int q = 1; q <= n; ++q) {
    a = Eigen::kroneckerProduct(a, q == control ? p0 : CMatrix::Identity(2, 2)).eval();
    b = Eigen::kroneckerProduct(b, q == control ? p1 : (q == target ? sigma(1) : CMatrix::Identity(2, 2))).eval();
  }
  return a + b;
}

/// exp(-betaH) / Tr via the Pade/scaling-squaring matrix exponential.
inline CMatrix gibbs(const CMatrix& beta_h) {
  const CMatrix e = (-beta_h).exp();
  return e / e.trace();
}

/// 2^-n Tr(lambda_a A) for every a, by dense products.
inline RVector coefficients(const CMatrix& a, int n) {
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  RVector c(static_cast<Eigen::Index>(count));
  const double d = static_cast<double>(std::uint64_t{1} << n);
  for (std::uint64_t k = 0; k < count; ++k) c(static_cast<Eigen::Index>(k)) = (pauli(n, k) * a).trace().real() / d;
  return c;
}

struct LpOptimum {
  double objective = std::numeric_limits<double>::infinity();
  RVector w;
};

/**
 * min ||w||_1 s.t. C w = y by enumerating every M-column basis: the optimum
 * of the split LP sits at a vertex, and every vertex is a basic solution.
 */
inline LpOptimum l1_by_enumeration(const RMatrix& c, const RVector& y) {
  const int m = static_cast<int>(c.rows());
  const int ncols = static_cast<int>(c.cols());
  LpOptimum best;
  std::vector<int> pick(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    RMatrix cs(m, m);
    for (int i = 0; i < m; ++i) cs.col(i) = c.col(pick[static_cast<std::size_t>(i)]);
    Eigen::FullPivLU<RMatrix> lu(cs);
    if (lu.rank() == m) {
      const RVector ws = lu.solve(y);
      const double obj = ws.lpNorm<1>();
      if (obj < best.objective) {
        best.objective = obj;
        best.w = RVector::Zero(ncols);
        for (int i = 0; i < m; ++i) best.w(pick[static_cast<std::size_t>(i)]) = ws(i);
      }
    }
    int k = m - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == ncols - m + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < m; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

/// M x N matrix with orthonormal rows from the QR of a Gaussian matrix.
template <class Rng>
RMatrix random_orthonormal_rows(int m, int ncols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RMatrix a(ncols, m);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = g(rng);
  }
  Eigen::HouseholderQR<RMatrix> qr(a);
  const RMatrix q = qr.householderQ() * RMatrix::Identity(ncols, m);
  return q.transpose();
}

}  // namespace oracle
