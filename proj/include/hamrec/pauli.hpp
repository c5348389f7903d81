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

#include <bit>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hamrec/common.hpp"

namespace hamrec {

/**
 * Index of an n-qubit Pauli string.
 *
 * `value` is read as an n-digit base-4 number a_1 a_2 ... a_n with a_1 the
 * most significant digit. Digit a_q selects the factor on qubit q
 * (0 = I, 1 = X, 2 = Y, 3 = Z) and qubit 1 is the leftmost Kronecker factor,
 * i.e. the most significant bit of a computational-basis index.
 */
class PauliIndex {
 public:
  PauliIndex(int n, std::uint64_t value, int max_qubits = kDefaultMaxQubits)
      : n_(n), value_(value) {
    if (n < 1 || n > 31) throw DomainError("PauliIndex: qubit count out of range");
    if (n > max_qubits) throw ResourceError("PauliIndex: qubit count above cap");
    if (value > signal_length(n)) throw DomainError("PauliIndex: index out of range");
  }

  int qubits() const { return n_; }
  std::uint64_t value() const { return value_; }

  /// Digit for qubit q, 1-based.
  int digit(int q) const { return static_cast<int>((value_ >> (2 * (n_ - q))) & 3U); }

  /// Parses "XIZ" style strings; leftmost character is qubit 1.
  static PauliIndex parse(std::string_view text, int max_qubits = kDefaultMaxQubits) {
    if (text.empty()) throw DomainError("PauliIndex: empty Pauli string");
    std::uint64_t a = 0;
    for (char c : text) {
      int d = 0;
      switch (c) {
        case 'I': case 'i': d = 0; break;
        case 'X': case 'x': d = 1; break;
        case 'Y': case 'y': d = 2; break;
        case 'Z': case 'z': d = 3; break;
        default: throw DomainError("PauliIndex: bad character in Pauli string");
      }
      a = (a << 2) | static_cast<std::uint64_t>(d);
    }
    return PauliIndex(static_cast<int>(text.size()), a, max_qubits);
  }

  std::string to_string() const {
    static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
    std::string out;
    out.reserve(static_cast<std::size_t>(n_));
    for (int q = 1; q <= n_; ++q) out.push_back(kLetters[digit(q)]);
    return out;
  }

  friend bool operator==(const PauliIndex&, const PauliIndex&) = default;

 private:
  int n_;
  std::uint64_t value_;
};

/// Base-4 digits [a_1, ..., a_n], most significant first.
inline std::vector<int> digits(const PauliIndex& a) {
  std::vector<int> out(static_cast<std::size_t>(a.qubits()));
  for (int q = 1; q <= a.qubits(); ++q) out[static_cast<std::size_t>(q - 1)] = a.digit(q);
  return out;
}

/// Number of non-identity factors.
inline int weight(int n, std::uint64_t a) {
  int w = 0;
  for (int q = 0; q < n; ++q) w += ((a >> (2 * q)) & 3U) != 0 ? 1 : 0;
  return w;
}

inline int weight(const PauliIndex& a) { return weight(a.qubits(), a.value()); }

/**
 * Monomial form of a Pauli string: lambda |j> = phase(j) |j ^ flip> with
 * phase(j) = i^ys * (-1)^popcount(j & sign).
 */
struct PauliAction {
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;
  int ys = 0;

  Complex phase(std::uint64_t j) const {
    static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int odd = std::popcount(j & sign) & 1;
    return kIPow[(ys + 2 * odd) & 3];
  }
};

inline PauliAction pauli_action(int n, std::uint64_t a) {
  PauliAction act;
  for (int p = 0; p < n; ++p) {
    const std::uint64_t bit = std::uint64_t{1} << p;
    switch ((a >> (2 * p)) & 3U) {
      case 1: act.flip |= bit; break;
      case 2: act.flip |= bit; act.sign |= bit; ++act.ys; break;
      case 3: act.sign |= bit; break;
      default: break;
    }
  }
  return act;
}

/// Tr(lambda_a A) in O(2^n) using the monomial structure of lambda_a.
inline Complex trace_with_pauli(const PauliAction& act, const CMatrix& a) {
  Complex acc{0, 0};
  const auto dim = static_cast<std::uint64_t>(a.rows());
  for (std::uint64_t j = 0; j < dim; ++j) {
    acc += act.phase(j) * a(static_cast<Eigen::Index>(j),
                            static_cast<Eigen::Index>(j ^ act.flip));
  }
  return acc;
}

/// Dense 2^n x 2^n matrix of lambda_a.
inline CMatrix pauli_matrix(const PauliIndex& a) {
  const int n = a.qubits();
  const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
  const PauliAction act = pauli_action(n, a.value());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto uj = static_cast<std::uint64_t>(j);
    m(static_cast<Eigen::Index>(uj ^ act.flip), j) = act.phase(uj);
  }
  return m;
}

/**
 * Lazily filled cache of dense Pauli matrices for one qubit count.
 *
 * Entries are written once and never moved, so references returned by get()
 * stay valid for the lifetime of the table and may be read from any thread.
 */
class PauliMatrixTable {
 public:
  explicit PauliMatrixTable(int n, int max_qubits = kDefaultMaxQubits)
      : n_(n), max_qubits_(max_qubits) {
    if (n > max_qubits) throw ResourceError("PauliMatrixTable: qubit count above cap");
    if (n < 1) throw DomainError("PauliMatrixTable: qubit count must be positive");
  }

  int qubits() const { return n_; }

  const CMatrix& get(std::uint64_t a) const {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(a);
    if (it == cache_.end()) {
      auto m = std::make_unique<const CMatrix>(pauli_matrix(PauliIndex(n_, a, max_qubits_)));
      it = cache_.emplace(a, std::move(m)).first;
    }
    return *it->second;
  }

  std::size_t cached() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  int n_;
  int max_qubits_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<const CMatrix>> cache_;
};

/// Qubit count of a square matrix of size 2^n.
inline int qubits_of(const CMatrix& a) {
  const auto dim = static_cast<std::uint64_t>(a.rows());
  if (a.rows() != a.cols() || dim < 2 || !std::has_single_bit(dim)) {
    throw DomainError("matrix dimension is not a power of two >= 2");
  }
  return std::countr_zero(dim);
}

/// Coefficients c_a = 2^-n Tr(lambda_a A), a = 0 .. 4^n - 1, of a Hermitian A.
inline RVector pauli_coefficients(const CMatrix& a) {
  require_hermitian(a, 1e-10, "pauli_coefficients");
  const int n = qubits_of(a);
  if (n > kDefaultMaxQubits) throw ResourceError("pauli_coefficients: qubit count above cap");
  const std::uint64_t count = signal_length(n) + 1;
  const double scale = 1.0 / static_cast<double>(hilbert_dim(n));
  RVector c(static_cast<Eigen::Index>(count));
  for (std::uint64_t k = 0; k < count; ++k) {
    c(static_cast<Eigen::Index>(k)) = scale * trace_with_pauli(pauli_action(n, k), a).real();
  }
  return c;
}

/// Sum_a c_a lambda_a for a coefficient vector of length 4^n.
inline CMatrix matrix_from_coefficients(const RVector& c) {
  const auto len = static_cast<std::uint64_t>(c.size());
  if (len < 4 || !std::has_single_bit(len) || (std::countr_zero(len) & 1) != 0) {
    throw DomainError("matrix_from_coefficients: length must be 4^n");
  }
  const int n = std::countr_zero(len) / 2;
  if (n > kDefaultMaxQubits) throw ResourceError("matrix_from_coefficients: qubit count above cap");
  const auto dim = static_cast<std::uint64_t>(hilbert_dim(n));
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t k = 0; k < len; ++k) {
    const double ck = c(static_cast<Eigen::Index>(k));
    if (ck == 0.0) continue;
    const PauliAction act = pauli_action(n, k);
    for (std::uint64_t j = 0; j < dim; ++j) {
      m(static_cast<Eigen::Index>(j ^ act.flip), static_cast<Eigen::Index>(j)) += ck * act.phase(j);
    }
  }
  return m;
}

/// All indices 1 .. 4^n - 1 of the given weight, ascending.
inline std::vector<std::uint64_t> indices_of_weight(int n, int w) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t a = 1; a <= signal_length(n); ++a) {
    if (weight(n, a) == w) out.push_back(a);
  }
  return out;
}

}  // namespace hamrec
