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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qtrojan/error.hpp"
#include "qtrojan/qsim.hpp"
#include "support.hpp"

namespace {

using namespace qtrojan::qsim;
using qtrojan::StructuralError;
using qtrojan::ValidationError;
namespace qt = qtrojan::testing;
constexpr double kPi = std::numbers::pi;

TEST(Statevector, StartsInAllZeros) {
  Statevector s(3);
  EXPECT_EQ(s.dim(), 8u);
  EXPECT_EQ(s[0], Complex(1.0));
  EXPECT_DOUBLE_EQ(s.norm_squared(), 1.0);
}

TEST(Statevector, RejectsBadSizes) {
  EXPECT_THROW(Statevector(0), ValidationError);
  EXPECT_THROW(Statevector(kMaxQubits + 1), ValidationError);
  EXPECT_THROW(Statevector::from_amplitudes({1.0, 0.0, 0.0}), ValidationError);
  EXPECT_THROW(Statevector::from_amplitudes({1.0, 1.0}), ValidationError);
}

TEST(ApplyGate, RxPiFlipsWithMinusI) {
  const auto s = apply_gate(Statevector(1), GateOp::rx(0, kPi));
  EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-15);
  EXPECT_NEAR(s[1].real(), 0.0, 1e-15);
  EXPECT_NEAR(s[1].imag(), -1.0, 1e-15);
}

TEST(ApplyGate, RxZeroIsIdentity) {
  std::mt19937_64 rng(1);
  const auto s = qt::random_state(rng, 3);
  EXPECT_EQ(apply_gate(s, GateOp::rx(1, 0.0)), s);
}

TEST(ApplyGate, CnotOnTenGivesEleven) {
  const auto s = apply_gate(Statevector::basis(2, 0b10), GateOp::cnot(0, 1));
  EXPECT_EQ(s, Statevector::basis(2, 0b11));
}

TEST(ApplyGate, CrxActsOnlyWhenControlIsSet) {
  const auto off = apply_gate(Statevector::basis(2, 0b00), GateOp::crx(0, 1, kPi));
  EXPECT_EQ(off, Statevector::basis(2, 0b00));
  const auto on = apply_gate(Statevector::basis(2, 0b10), GateOp::crx(0, 1, kPi));
  EXPECT_NEAR(on[0b11].imag(), -1.0, 1e-15);
}

TEST(ApplyGate, QubitZeroIsMostSignificant) {
  const auto s = apply_gate(Statevector(3), GateOp::rx(0, kPi));
  EXPECT_NEAR(std::abs(s[0b100]), 1.0, 1e-15);
}

TEST(ApplyGate, Errors) {
  Statevector s(2);
  EXPECT_THROW(apply_gate_inplace(s, GateOp::rx(2, 0.1)), StructuralError);
  EXPECT_THROW(apply_gate_inplace(s, GateOp::cnot(1, 1)), StructuralError);
  Mat2 bad;
  bad(0, 0) = 2.0;
  EXPECT_THROW(GateOp::fused(0, bad), ValidationError);
  Circuit c(2);
  EXPECT_THROW(c.append(GateOp::ry(-1, 0.0)), StructuralError);
}

TEST(Circuit, TrainableOpsOnlyInVariationalLayers) {
  Circuit c(2);
  EXPECT_THROW(c.append(GateOp::ry(0, 0.0, LayerTag::Encoding).as_trainable()), StructuralError);
  c.append(GateOp::ry(0, 0.0, LayerTag::Variational).as_trainable());
  EXPECT_EQ(c.n_trainable_params(), 1);
}

TEST(GateMatrices, MatchPauliExponentials) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-7, 7);
  for (int i = 0; i < 50; ++i) {
    for (const auto& op : {GateOp::rx(0, a(rng)), GateOp::ry(0, a(rng)), GateOp::rz(0, a(rng)),
                           GateOp::phase(0, a(rng)), GateOp::rot(0, a(rng), a(rng), a(rng))}) {
      const auto m = gate_matrix(op);
      const auto ref = qt::oracle_1q(op);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) EXPECT_NEAR(std::abs(m(r, c) - ref(r, c)), 0.0, 1e-14);
    }
  }
}

TEST(GateMatrices, AllUnitary) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    for (const auto& m : {rx_matrix(a(rng)), ry_matrix(a(rng)), rz_matrix(a(rng)), phase_matrix(a(rng)),
                          rot_matrix(a(rng), a(rng), a(rng))}) {
      EXPECT_LT(unitarity_error(m), 1e-12);
    }
  }
}

TEST(Expectation, Examples) {
  EXPECT_DOUBLE_EQ(expectation_z(Statevector(1), 0), 1.0);
  EXPECT_DOUBLE_EQ(expectation_z(Statevector::basis(1, 1), 0), -1.0);
  EXPECT_NEAR(expectation_z(apply_gate(Statevector(1), GateOp::ry(0, kPi / 3)), 0), 0.5, 1e-15);
  EXPECT_THROW(expectation_z(Statevector(2), 2), StructuralError);
}

TEST(Expectation, SampledConvergesToExact) {
  const auto s = apply_gate(Statevector(1), GateOp::ry(0, 1.0));
  std::mt19937_64 rng(4);
  EXPECT_NEAR(sample_expectation_z(s, 0, 200000, rng), std::cos(1.0), 0.01);
}

TEST(Fidelity, Examples) {
  std::mt19937_64 rng(5);
  const auto psi = qt::random_state(rng, 2);
  EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-14);
  EXPECT_NEAR(fidelity(Statevector(1), Statevector::basis(1, 1)), 0.0, 1e-15);
  // e^{i phi}|0> via RZ(-2 phi) then PHASE(2 phi): diag(e^{i phi}, e^{i phi})
  const auto phased = apply_gate(apply_gate(Statevector(1), GateOp::rz(0, -1.4)), GateOp::phase(0, 1.4));
  EXPECT_NEAR(fidelity(Statevector(1), phased), 1.0, 1e-15);
  EXPECT_THROW(fidelity(Statevector(1), Statevector(2)), ValidationError);
}

TEST(Fusion, TwoRotationsBecomeOneProduct) {
  Circuit c(1);
  c.append(GateOp::rx(0, 0.3));
  c.append(GateOp::ry(0, 0.9));
  const auto f = fuse_single_qubit_runs(c);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.ops()[0].kind, GateKind::Fused1Q);
  const auto want = ry_matrix(0.9) * rx_matrix(0.3);
  for (int r = 0; r < 2; ++r)
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(f.ops()[0].matrix(r, k) - want(r, k)), 0.0, 1e-15);
}

TEST(Fusion, RunBrokenByTwoQubitGate) {
  Circuit c(2);
  c.append(GateOp::rx(0, 0.3));
  c.append(GateOp::cnot(0, 1));
  c.append(GateOp::ry(0, 0.9));
  EXPECT_EQ(fuse_single_qubit_runs(c).size(), 3u);
}

TEST(Fusion, PreservesUnitaryOnRandomCircuits) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const auto c = qt::random_circuit(rng, n, 1 + static_cast<int>(rng() % 30));
    const auto f = fuse_single_qubit_runs(c);
    EXPECT_LE(f.size(), c.size());
    for (int k = 0; k < 20; ++k) {
      auto a = qt::random_state(rng, n);
      auto b = a;
      run_inplace(c, {}, a);
      run_inplace(f, {}, b);
      EXPECT_GT(fidelity(a, b), 1.0 - 1e-12);
    }
  }
}

TEST(Depth, Examples) {
  EXPECT_EQ(circuit_depth(Circuit(3)), 0);
  Circuit disjoint(3);
  for (int q = 0; q < 3; ++q) disjoint.append(GateOp::rx(q, 0.1));
  EXPECT_EQ(circuit_depth(disjoint), 1);
  Circuit serial(1);
  serial.append(GateOp::rx(0, 0.1));
  serial.append(GateOp::ry(0, 0.1));
  EXPECT_EQ(circuit_depth(serial), 2);
  Circuit mixed(3);
  mixed.append(GateOp::rx(0, 0.1));
  mixed.append(GateOp::cnot(1, 2));
  mixed.append(GateOp::cnot(0, 1));
  EXPECT_EQ(circuit_depth(mixed), 2);
}

TEST(Properties, NormPreservedOnRandomCircuits) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto s = simulate(qt::random_circuit(rng, n, static_cast<int>(rng() % 31)));
    ASSERT_NEAR(s.norm_squared(), 1.0, 1e-10) << "trial " << trial;
  }
}

TEST(Properties, SimulationMatchesDenseReference) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const auto c = qt::random_circuit(rng, n, 1 + static_cast<int>(rng() % 20));
    const qt::VX want = qt::oracle_unitary(c).col(0);
    const auto got = qt::to_eigen(simulate(c));
    EXPECT_LT((want - got).cwiseAbs().maxCoeff(), 1e-12) << "trial " << trial;
  }
}

TEST(Properties, CircuitUnitaryMatchesDenseReference) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto c = qt::random_circuit(rng, n, 12);
    const auto u = circuit_unitary(c);
    const auto ref = qt::oracle_unitary(c);
    const auto dim = std::size_t{1} << n;
    for (std::size_t col = 0; col < dim; ++col)
      for (std::size_t row = 0; row < dim; ++row)
        EXPECT_NEAR(std::abs(u[col * dim + row] - ref(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col))),
                    0.0, 1e-12);
  }
}

TEST(Properties, RxHalfPiThenThreeHalfPiIsIdentityUpToPhase) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 200; ++k) {
    const auto psi = qt::random_state(rng, 1);
    const auto out = apply_gate(apply_gate(psi, GateOp::rx(0, kPi / 2)), GateOp::rx(0, 3 * kPi / 2));
    EXPECT_NEAR(fidelity(psi, out), 1.0, 1e-12);
  }
  const auto m = rx_matrix(3 * kPi / 2) * rx_matrix(kPi / 2);
  EXPECT_NEAR(m(0, 0).real(), -1.0, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), -1.0, 1e-15);
  EXPECT_NEAR(std::abs(m(0, 1)), 0.0, 1e-15);
}

TEST(Names, RoundTrip) {
  for (auto k : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::Phase, GateKind::Rot, GateKind::CRX,
                 GateKind::CNOT, GateKind::Fused1Q}) {
    EXPECT_EQ(gate_kind_from_string(to_string(k)), k);
  }
  for (auto t : {LayerTag::PreEncoding, LayerTag::Encoding, LayerTag::PostEncoding, LayerTag::Variational,
                 LayerTag::Other}) {
    EXPECT_EQ(layer_tag_from_string(to_string(t)), t);
  }
  EXPECT_THROW(gate_kind_from_string("H"), ValidationError);
}

}  // namespace
