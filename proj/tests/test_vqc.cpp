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
#include "qtrojan/vqc.hpp"
#include "support.hpp"

namespace {

using namespace qtrojan::vqc;
using qtrojan::ValidationError;
using qtrojan::qsim::Circuit;
using qtrojan::qsim::GateKind;
using qtrojan::qsim::LayerTag;
using qtrojan::qsim::Statevector;
namespace qt = qtrojan::testing;
constexpr double kPi = std::numbers::pi;

Statevector run(int n, const std::vector<qtrojan::qsim::GateOp>& ops) {
  Circuit c(n);
  c.append(ops);
  return qtrojan::qsim::simulate(c);
}

void expect_state(const Statevector& s, std::vector<qt::C> want, double tol = 1e-14) {
  ASSERT_EQ(s.dim(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(std::abs(s[i] - want[i]), 0.0, tol) << "amplitude " << i;
}

TEST(AngleEncode, Examples) {
  expect_state(run(1, angle_encode(std::vector{0.0})), {1.0, 0.0});
  expect_state(run(1, angle_encode(std::vector{kPi / 2})), {0.0, 1.0});
  expect_state(run(2, angle_encode(std::vector{kPi / 4, kPi / 4})), {0.5, 0.5, 0.5, 0.5});
}

TEST(AngleEncode, ProductStateFormula) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, kPi / 2);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(4);
    for (auto& v : x) v = u(rng);
    const auto s = run(4, angle_encode(x));
    for (std::size_t i = 0; i < 16; ++i) {
      double amp = 1.0;
      for (int q = 0; q < 4; ++q) amp *= ((i >> (3 - q)) & 1) ? std::sin(x[q]) : std::cos(x[q]);
      EXPECT_NEAR(s[i].real(), amp, 1e-14);
      EXPECT_NEAR(s[i].imag(), 0.0, 1e-14);
    }
  }
}

TEST(AngleEncode, GatesAreTaggedAndFixed) {
  for (const auto& op : angle_encode(std::vector{0.1, 0.2, 0.3})) {
    EXPECT_EQ(op.kind, GateKind::RY);
    EXPECT_EQ(op.layer, LayerTag::Encoding);
    EXPECT_FALSE(op.trainable);
  }
  EXPECT_THROW(angle_encode(std::vector{std::nan("")}), ValidationError);
  EXPECT_THROW(dense_angle_encode(std::vector{HUGE_VAL}), ValidationError);
}

TEST(DenseAngleEncode, Examples) {
  expect_state(run(1, dense_angle_encode(std::vector{0.0, 0.0})), {1.0, 0.0});
  expect_state(run(1, dense_angle_encode(std::vector{0.5, 0.0})), {0.0, 1.0});
  const double r = 1 / std::sqrt(2.0);
  expect_state(run(1, dense_angle_encode(std::vector{0.25, 0.5})), {r, -r});
}

TEST(DenseAngleEncode, OddLengthPadsWithZero) {
  const auto a = run(2, dense_angle_encode(std::vector{0.1, 0.2, 0.3}));
  const auto b = run(2, dense_angle_encode(std::vector{0.1, 0.2, 0.3, 0.0}));
  EXPECT_EQ(a, b);
}

TEST(EncodingSpec, QubitCountsForAllLengths) {
  for (int n = 1; n <= 32; ++n) {
    EXPECT_EQ((EncodingSpec{EncodingKind::Angle, n}.n_qubits()), n);
    EXPECT_EQ((EncodingSpec{EncodingKind::DenseAngle, n}.n_qubits()), (n + 1) / 2);
    std::vector<double> x(static_cast<std::size_t>(n), 0.1);
    int max_q = -1;
    for (const auto& op : dense_angle_encode(x)) max_q = std::max(max_q, op.qubits[0]);
    EXPECT_EQ(max_q + 1, (n + 1) / 2);
  }
}

TEST(Encoding, Deterministic) {
  const auto c = build_mnist_circuit(4, 2);
  const auto params = init_params(c.n_trainable_params(), 0.5, 3);
  const std::vector<double> x{0.3, 0.7, 1.1, 0.2};
  const auto a = qtrojan::qsim::simulate(c, {params, x});
  const auto b = qtrojan::qsim::simulate(c, {params, x});
  EXPECT_EQ(a, b);
}

TEST(BuildMnistCircuit, ParameterCounts) {
  EXPECT_EQ(build_mnist_circuit(16, 2).n_trainable_params(), 128);
  EXPECT_EQ(build_mnist_circuit(2, 1).n_trainable_params(), 8);
  EXPECT_EQ(build_mnist_circuit(8, 2).n_trainable_params(), 64);
}

TEST(BuildMnistCircuit, RingClosure) {
  const auto c = build_mnist_circuit(5, 1);
  std::vector<std::pair<int, int>> pairs;
  for (const auto& op : c.ops()) {
    if (op.kind == GateKind::CRX) pairs.emplace_back(op.qubits[0], op.qubits[1]);
  }
  ASSERT_EQ(pairs.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(pairs[static_cast<std::size_t>(i)], std::make_pair(i, (i + 1) % 5));
}

TEST(BuildMnistCircuit, OnlyVariationalOpsTrain) {
  const auto c = build_mnist_circuit(4, 2);
  for (const auto& op : c.ops()) {
    if (op.layer == LayerTag::Encoding) EXPECT_FALSE(op.trainable);
    if (op.trainable) EXPECT_EQ(op.layer, LayerTag::Variational);
  }
  EXPECT_EQ(required_features(c), 4);
}

TEST(BuildRegressorCircuit, ParameterCounts) {
  EXPECT_EQ(build_regressor_circuit(4, 2).n_trainable_params(), 24);
  const auto c = build_regressor_circuit(4, 2);
  int cnots = 0;
  for (const auto& op : c.ops()) {
    if (op.kind == GateKind::CNOT) {
      ++cnots;
      EXPECT_FALSE(op.trainable);
    }
  }
  EXPECT_EQ(cnots, 8);
  EXPECT_EQ(required_features(c), 8);
}

TEST(Forward, ZeroParamsGiveEqualLogits) {
  for (int classes : {2, 4}) {
    const auto m = make_classifier(4, 2, classes);
    const std::vector<double> params(static_cast<std::size_t>(m.circuit.n_trainable_params()), 0.0);
    const auto p = forward(m.circuit, params, std::vector<double>(4, 0.0), m.measurement);
    for (double v : p) EXPECT_NEAR(v, 1.0 / classes, 1e-15);
  }
}

TEST(Forward, RegressionOutputInRange) {
  auto m = make_regressor(4, 2);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 50; ++t) {
    m.params = init_params(m.circuit.n_trainable_params(), 3.0, static_cast<std::uint64_t>(t));
    std::vector<double> x(8);
    for (auto& v : x) v = u(rng);
    const auto y = m.forward(x);
    ASSERT_EQ(y.size(), 1u);
    EXPECT_GE(y[0], -1.0);
    EXPECT_LE(y[0], 1.0);
  }
}

TEST(Forward, LengthMismatchesThrow) {
  const auto m = make_classifier(4, 1, 2);
  const std::vector<double> params(static_cast<std::size_t>(m.circuit.n_trainable_params()), 0.0);
  EXPECT_THROW(forward(m.circuit, std::vector<double>(3), std::vector<double>(4), m.measurement), ValidationError);
  EXPECT_THROW(forward(m.circuit, params, std::vector<double>(3), m.measurement), ValidationError);
}

TEST(Forward, MatchesReferenceSimulation) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, kPi / 2);
  for (int t = 0; t < 20; ++t) {
    auto m = make_classifier(4, 2, 4);
    m.params = init_params(m.circuit.n_trainable_params(), kPi, static_cast<std::uint64_t>(100 + t));
    std::vector<double> x(4);
    for (auto& v : x) v = u(rng);
    const auto v = qt::oracle_state(m.circuit.bound({m.params, x}));
    const auto logits = expectations(m.circuit, m.params, x, m.measurement);
    for (int q = 0; q < 4; ++q) EXPECT_NEAR(logits[static_cast<std::size_t>(q)], qt::oracle_z(v, q, 4), 1e-12);
  }
}

TEST(Softmax, PropertiesOnRandomLogits) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> logits(1 + rng() % 6);
    for (auto& v : logits) v = u(rng);
    const auto p = softmax(logits);
    double sum = 0.0;
    for (double v : p) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0 + (logits.size() == 1 ? 1e-15 : 0.0));
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Softmax, StableForLargeLogits) {
  const auto p = softmax(std::vector{1000.0, 1000.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
}

TEST(Argmax, LowestIndexWinsTies) {
  EXPECT_EQ(argmax(std::vector{0.2, 0.5, 0.5}), 1);
  EXPECT_EQ(argmax(std::vector{0.7}), 0);
}

TEST(MeasurementSpec, Validation) {
  EXPECT_THROW((MeasurementSpec{5, MeasurementMode::FirstKQubitsZ}.validate(4)), ValidationError);
  EXPECT_NO_THROW((MeasurementSpec{4, MeasurementMode::FirstKQubitsZ}.validate(4)));
}

TEST(InitParams, SeededAndBounded) {
  const auto a = init_params(100, 0.1, 7);
  EXPECT_EQ(a, init_params(100, 0.1, 7));
  EXPECT_NE(a, init_params(100, 0.1, 8));
  for (double v : a) EXPECT_LE(std::abs(v), 0.1);
}

}  // namespace
