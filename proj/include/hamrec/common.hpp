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

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hamrec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Largest qubit count any dense routine will accept unless told otherwise.
inline constexpr int kDefaultMaxQubits = 6;

/// Input outside an operation's mathematical domain (bad index, wrong shape,
/// non-Hermitian matrix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Request that would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical kernel (eigensolver, unitarity check) failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest elementwise deviation of `a` from its conjugate transpose.
inline double hermiticity_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const CMatrix& a, double tol, const char* what) {
  if (a.rows() != a.cols()) {
    throw DomainError(std::string(what) + ": matrix is not square");
  }
  if (a.size() > 0 && hermiticity_defect(a) > tol) {
    throw DomainError(std::string(what) + ": matrix is not Hermitian");
  }
}

/// Dimension 2^n of the n-qubit Hilbert space.
constexpr std::size_t hilbert_dim(int n) { return std::size_t{1} << n; }

/// Number of non-identity Pauli strings, 4^n - 1.
constexpr std::uint64_t signal_length(int n) {
  return (std::uint64_t{1} << (2 * n)) - 1;
}

}  // namespace hamrec
