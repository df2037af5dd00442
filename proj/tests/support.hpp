// Copyright 2026 The qtrojan-sim Authors
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

// Shared helpers for the test suites: random circuits and an Eigen-based dense
// reference simulator that builds every gate from Pauli matrices.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qtrojan/qsim.hpp"

namespace qtrojan::testing {

using C = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using MX = Eigen::MatrixXcd;
using VX = Eigen::VectorXcd;

inline M2 pauli_x() { return (M2() << 0, 1, 1, 0).finished(); }
inline M2 pauli_y() { return (M2() << 0, C(0, -1), C(0, 1), 0).finished(); }
inline M2 pauli_z() { return (M2() << 1, 0, 0, -1).finished(); }

// exp(-i a P / 2) for a Pauli P.
inline M2 pauli_rotation(const M2& p, double a) {
  return std::cos(a / 2) * M2::Identity() - C(0, 1) * std::sin(a / 2) * p;
}

inline M2 oracle_1q(const qsim::GateOp& op) {
  using qsim::GateKind;
  const auto& p = op.params;
  switch (op.kind) {
    case GateKind::RX: return pauli_rotation(pauli_x(), p[0]);
    case GateKind::RY: return pauli_rotation(pauli_y(), p[0]);
    case GateKind::RZ: return pauli_rotation(pauli_z(), p[0]);
    case GateKind::Phase: return (M2() << 1, 0, 0, std::polar(1.0, p[0])).finished();
    case GateKind::Rot:
      return pauli_rotation(pauli_z(), p[2]) * pauli_rotation(pauli_y(), p[1]) * pauli_rotation(pauli_z(), p[0]);
    case GateKind::CRX: return pauli_rotation(pauli_x(), p[0]);
    case GateKind::CNOT: return pauli_x();
    case GateKind::Fused1Q: {
      M2 m;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m(r, c) = op.matrix(r, c);
      return m;
    }
  }
  return M2::Identity();
}

// Full 2^n operator; qubit 0 is the leftmost tensor factor.
inline MX embed(const M2& u, int q, int n) {
  MX out = MX::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    const MX f = k == q ? MX(u) : MX(MX::Identity(2, 2));
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

inline MX embed_controlled(const M2& u, int control, int target, int n) {
  const std::size_t dim = std::size_t{1} << n;
  MX out = MX::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::size_t cbit = std::size_t{1} << (n - 1 - control);
  const std::size_t tbit = std::size_t{1} << (n - 1 - target);
  for (std::size_t col = 0; col < dim; ++col) {
    if ((col & cbit) == 0) {
      out(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col)) = 1;
      continue;
    }
    const int in_bit = (col & tbit) ? 1 : 0;
    for (int out_bit = 0; out_bit < 2; ++out_bit) {
      const std::size_t row = out_bit ? (col | tbit) : (col & ~tbit);
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = u(out_bit, in_bit);
    }
  }
  return out;
}

inline MX oracle_op(const qsim::GateOp& op, int n) {
  if (op.arity() == 2) return embed_controlled(oracle_1q(op), op.qubits[0], op.qubits[1], n);
  return embed(oracle_1q(op), op.qubits[0], n);
}

// Reference unitary of a circuit whose ops hold concrete angles.
inline MX oracle_unitary(const qsim::Circuit& c) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << c.n_qubits());
  MX u = MX::Identity(dim, dim);
  for (const auto& op : c.ops()) u = (oracle_op(op, c.n_qubits()) * u).eval();
  return u;
}

// Reference final state on |0...0>; applies each embedded gate to the vector.
inline VX oracle_state(const qsim::Circuit& c) {
  VX v = VX::Zero(static_cast<Eigen::Index>(std::size_t{1} << c.n_qubits()));
  v(0) = 1;
  for (const auto& op : c.ops()) v = (oracle_op(op, c.n_qubits()) * v).eval();
  return v;
}

// <Z_q> of a reference state.
inline double oracle_z(const VX& v, int q, int n) {
  const std::size_t bit = std::size_t{1} << (n - 1 - q);
  double z = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) z += ((static_cast<std::size_t>(i) & bit) ? -1.0 : 1.0) * std::norm(v(i));
  return z;
}

inline VX to_eigen(const qsim::Statevector& s) {
  VX v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}

inline qsim::GateOp random_gate(std::mt19937_64& rng, int n) {
  using qsim::GateOp;
  std::uniform_real_distribution<double> angle(-2 * M_PI, 2 * M_PI);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::uniform_int_distribution<int> kind(0, n >= 2 ? 6 : 4);
  const int q = qubit(rng);
  int t = qubit(rng);
  while (n >= 2 && t == q) t = qubit(rng);
  switch (kind(rng)) {
    case 0: return GateOp::rx(q, angle(rng));
    case 1: return GateOp::ry(q, angle(rng));
    case 2: return GateOp::rz(q, angle(rng));
    case 3: return GateOp::phase(q, angle(rng));
    case 4: return GateOp::rot(q, angle(rng), angle(rng), angle(rng));
    case 5: return GateOp::crx(q, t, angle(rng));
    default: return GateOp::cnot(q, t);
  }
}

inline qsim::Circuit random_circuit(std::mt19937_64& rng, int n, int n_gates) {
  qsim::Circuit c(n);
  for (int i = 0; i < n_gates; ++i) c.append(random_gate(rng, n));
  return c;
}

inline qsim::Statevector random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  std::vector<C> amps(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : amps) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return qsim::Statevector::from_amplitudes(std::move(amps));
}

}  // namespace qtrojan::testing
