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

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hamrec/common.hpp"

namespace hamrec {

enum class GateKind { Hadamard, Phase, PhaseDagger, T, CNOT };

/// One gate on 1-based qubits. `control` is only meaningful for CNOT.
struct Gate {
  GateKind kind = GateKind::Hadamard;
  int target = 1;
  int control = 0;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// 4n single-qubit gates plus n(n-1) ordered CNOT pairs.
inline std::size_t gate_set_size(int n) {
  if (n < 1) throw DomainError("gate_set_size: n must be positive");
  const auto un = static_cast<std::size_t>(n);
  return 4 * un + un * (un - 1);
}

/// Enumeration of the gate set; sampling indexes into this order.
inline std::vector<Gate> gate_set(int n) {
  std::vector<Gate> gates;
  gates.reserve(gate_set_size(n));
  for (int q = 1; q <= n; ++q) {
    gates.push_back({GateKind::Hadamard, q, 0});
    gates.push_back({GateKind::Phase, q, 0});
    gates.push_back({GateKind::PhaseDagger, q, 0});
    gates.push_back({GateKind::T, q, 0});
  }
  for (int c = 1; c <= n; ++c) {
    for (int t = 1; t <= n; ++t) {
      if (c != t) gates.push_back({GateKind::CNOT, t, c});
    }
  }
  return gates;
}

/// Default sequence length n^8.
inline std::size_t default_circuit_length(int n) {
  std::size_t len = 1;
  for (int i = 0; i < 8; ++i) len *= static_cast<std::size_t>(n);
  return len;
}

struct CircuitSpec {
  int n = 1;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::vector<Gate> gates;  // g_1 first

  bool default_length() const { return length == default_circuit_length(n); }
};

/// Gates drawn uniformly with replacement from gate_set(n).
template <std::uniform_random_bit_generator Rng>
std::vector<Gate> sample_gates(int n, std::size_t length, Rng& rng) {
  const auto set = gate_set(n);
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  std::vector<Gate> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(set[pick(rng)]);
  return out;
}

/// Reproducible circuit: the gate list is a pure function of (n, length, seed).
inline CircuitSpec sample_circuit(int n, std::optional<std::size_t> length, std::uint64_t seed) {
  if (n < 1 || n > kDefaultMaxQubits) throw DomainError("sample_circuit: bad qubit count");
  CircuitSpec spec;
  spec.n = n;
  spec.length = length.value_or(default_circuit_length(n));
  spec.seed = seed;
  std::mt19937_64 rng(seed);
  spec.gates = sample_gates(n, spec.length, rng);
  return spec;
}

namespace detail {

using RowMajorCMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline void validate_gate(const Gate& g, int n) {
  if (g.target < 1 || g.target > n) throw DomainError("gate target out of range");
  if (g.kind == GateKind::CNOT && (g.control < 1 || g.control > n || g.control == g.target)) {
    throw DomainError("bad CNOT control");
  }
}

// acc <- g * acc, touching only the rows the gate mixes.
inline void apply_gate_left(const Gate& g, int n, RowMajorCMatrix& acc) {
  const auto dim = static_cast<std::size_t>(acc.rows());
  const Eigen::Index cols = acc.cols();
  const std::size_t tbit = std::size_t{1} << (n - g.target);
  static const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
  static const Complex kT = std::polar(1.0, std::numbers::pi / 4);

  auto scale_upper = [&](Complex f) {
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & tbit) acc.row(static_cast<Eigen::Index>(i)) *= f;
    }
  };

  switch (g.kind) {
    case GateKind::Hadamard:
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & tbit) continue;
        Complex* r0 = acc.row(static_cast<Eigen::Index>(i)).data();
        Complex* r1 = acc.row(static_cast<Eigen::Index>(i | tbit)).data();
        for (Eigen::Index c = 0; c < cols; ++c) {
          const Complex a = r0[c];
          const Complex b = r1[c];
          r0[c] = (a + b) * kInvSqrt2;
          r1[c] = (a - b) * kInvSqrt2;
        }
      }
      break;
    case GateKind::Phase: scale_upper({0.0, 1.0}); break;
    case GateKind::PhaseDagger: scale_upper({0.0, -1.0}); break;
    case GateKind::T: scale_upper(kT); break;
    case GateKind::CNOT: {
      const std::size_t cbit = std::size_t{1} << (n - g.control);
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) {
          acc.row(static_cast<Eigen::Index>(i)).swap(acc.row(static_cast<Eigen::Index>(i | tbit)));
        }
      }
      break;
    }
  }
}

}  // namespace detail

/// Largest elementwise deviation of U^dagger U from the identity.
inline double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// U = g_L ... g_2 g_1.
inline CMatrix circuit_unitary(const CircuitSpec& spec) {
  const int n = spec.n;
  if (n < 1 || n > kDefaultMaxQubits) throw DomainError("circuit_unitary: bad qubit count");
  const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
  detail::RowMajorCMatrix acc = detail::RowMajorCMatrix::Identity(dim, dim);
  for (const Gate& g : spec.gates) {
    detail::validate_gate(g, n);
    detail::apply_gate_left(g, n, acc);
  }
  CMatrix u = acc;
  if (unitarity_defect(u) >= 1e-9) throw NumericalError("circuit_unitary: result is not unitary");
  return u;
}

inline nlohmann::json to_json(const CircuitSpec& spec) {
  return {{"n", spec.n}, {"length", spec.length}, {"seed", spec.seed}};
}

inline CircuitSpec circuit_from_json(const nlohmann::json& j) {
  return sample_circuit(j.at("n").get<int>(), j.at("length").get<std::size_t>(),
                        j.at("seed").get<std::uint64_t>());
}

}  // namespace hamrec
