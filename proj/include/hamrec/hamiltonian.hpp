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
#include <concepts>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hamrec/common.hpp"
#include "hamrec/pauli.hpp"

namespace hamrec {

enum class SupportPolicy { UniformRandom, TwoLocal };

inline std::string to_string(SupportPolicy p) {
  return p == SupportPolicy::TwoLocal ? "two-local" : "random";
}

inline SupportPolicy parse_support_policy(const std::string& s) {
  if (s == "random" || s == "uniform") return SupportPolicy::UniformRandom;
  if (s == "two-local" || s == "two_local" || s == "twolocal") return SupportPolicy::TwoLocal;
  throw DomainError("unknown support policy '" + s + "'");
}

/**
 * H = -eta * sum_a J_a lambda_a with |J_a| <= 1 and a != 0.
 *
 * Only the product eta*beta ever enters a simulation, so eta is kept at 1 by
 * the samplers.
 */
struct SparseHamiltonian {
  int n = 1;
  double eta = 1.0;
  std::map<std::uint64_t, double> terms;

  std::size_t sparsity() const { return terms.size(); }

  void validate() const {
    if (n < 1 || n > kDefaultMaxQubits) throw DomainError("SparseHamiltonian: bad qubit count");
    if (!(eta > 0.0)) throw DomainError("SparseHamiltonian: eta must be positive");
    for (const auto& [a, j] : terms) {
      if (a == 0) throw DomainError("SparseHamiltonian: identity term not allowed");
      if (a > signal_length(n)) throw DomainError("SparseHamiltonian: index out of range");
      if (!(std::abs(j) <= 1.0)) throw DomainError("SparseHamiltonian: |J_a| must not exceed 1");
    }
  }
};

/// Indices a policy may place a coupling on, ascending.
inline std::vector<std::uint64_t> admissible_support(int n, SupportPolicy policy) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t a = 1; a <= signal_length(n); ++a) {
    if (policy == SupportPolicy::UniformRandom || weight(n, a) <= 2) out.push_back(a);
  }
  return out;
}

/// 3n + 9n(n-1)/2 for TwoLocal, 4^n - 1 otherwise.
inline std::uint64_t admissible_size(int n, SupportPolicy policy) {
  if (policy == SupportPolicy::UniformRandom) return signal_length(n);
  const auto un = static_cast<std::uint64_t>(n);
  return 3 * un + 9 * un * (un - 1) / 2;
}

/// Draws k distinct elements of `pool` uniformly; result is in draw order.
template <std::uniform_random_bit_generator Rng>
std::vector<std::uint64_t> sample_without_replacement(std::vector<std::uint64_t> pool,
                                                      std::size_t k, Rng& rng) {
  if (k > pool.size()) throw DomainError("cannot draw more elements than available");
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

/// s distinct admissible indices, sorted ascending.
template <std::uniform_random_bit_generator Rng>
std::vector<std::uint64_t> random_support(int n, std::size_t s, SupportPolicy policy, Rng& rng) {
  if (n < 1 || n > kDefaultMaxQubits) throw DomainError("random_support: bad qubit count");
  if (s > admissible_size(n, policy)) {
    throw DomainError("random_support: sparsity exceeds admissible set size");
  }
  auto picked = sample_without_replacement(admissible_support(n, policy), s, rng);
  std::sort(picked.begin(), picked.end());
  return picked;
}

/// Random couplings with |J_a| uniform on [0.1, 1] and a uniformly random sign.
template <std::uniform_random_bit_generator Rng>
SparseHamiltonian random_hamiltonian(int n, std::size_t s, SupportPolicy policy, Rng& rng) {
  SparseHamiltonian h;
  h.n = n;
  h.eta = 1.0;
  const auto support = random_support(n, s, policy, rng);
  std::uniform_real_distribution<double> magnitude(0.1, 1.0);
  std::bernoulli_distribution negative(0.5);
  for (std::uint64_t a : support) {
    const double m = magnitude(rng);
    h.terms[a] = negative(rng) ? -m : m;
  }
  return h;
}

/// beta*H = -(eta*beta) sum_a J_a lambda_a as a dense matrix.
inline CMatrix hamiltonian_matrix(const SparseHamiltonian& h, double eta_beta) {
  h.validate();
  RVector c = RVector::Zero(static_cast<Eigen::Index>(signal_length(h.n) + 1));
  for (const auto& [a, j] : h.terms) c(static_cast<Eigen::Index>(a)) = -eta_beta * j;
  return matrix_from_coefficients(c);
}

/// (eta J)_a = -2^-n Tr(lambda_a Hmat) for a = 1 .. 4^n - 1 (entry a-1).
inline RVector couplings_from_matrix(const CMatrix& hmat, int n) {
  require_hermitian(hmat, 1e-10, "couplings_from_matrix");
  if (qubits_of(hmat) != n) throw DomainError("couplings_from_matrix: size does not match n");
  const RVector c = pauli_coefficients(hmat);
  return -c.tail(c.size() - 1);
}

inline nlohmann::json to_json(const SparseHamiltonian& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [a, j] : h.terms) terms.push_back({a, j});
  return {{"n", h.n},
          {"eta", h.eta},
          {"convention", "a1-most-significant"},
          {"terms", terms}};
}

/// Terms may name the Pauli string either by integer index or "XIZ" text.
inline SparseHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "eta" && key != "convention" && key != "terms") {
      throw DomainError("hamiltonian file: unknown key '" + key + "'");
    }
  }
  if (j.contains("convention") && j.at("convention") != "a1-most-significant") {
    throw DomainError("hamiltonian file: unsupported index convention");
  }
  SparseHamiltonian h;
  h.n = j.at("n").get<int>();
  h.eta = j.value("eta", 1.0);
  for (const auto& term : j.at("terms")) {
    if (!term.is_array() || term.size() != 2) throw DomainError("hamiltonian file: bad term");
    std::uint64_t a = 0;
    if (term[0].is_string()) {
      const PauliIndex idx = PauliIndex::parse(term[0].get<std::string>());
      if (idx.qubits() != h.n) throw DomainError("hamiltonian file: Pauli string length != n");
      a = idx.value();
    } else {
      a = term[0].get<std::uint64_t>();
    }
    if (!h.terms.emplace(a, term[1].get<double>()).second) {
      throw DomainError("hamiltonian file: duplicate term");
    }
  }
  h.validate();
  return h;
}

}  // namespace hamrec
