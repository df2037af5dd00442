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

#include "qtrojan/backdoor.hpp"
#include "qtrojan/error.hpp"
#include "qtrojan/trigcfg.hpp"
#include "support.hpp"

namespace {

using namespace qtrojan::backdoor;
using qtrojan::StructuralError;
using qtrojan::ValidationError;
using qtrojan::qsim::Circuit;
using qtrojan::qsim::GateKind;
using qtrojan::qsim::GateOp;
using qtrojan::qsim::LayerTag;
using qtrojan::qsim::Statevector;
namespace qsim = qtrojan::qsim;
namespace trigcfg = qtrojan::trigcfg;
namespace vqc = qtrojan::vqc;
namespace qt = qtrojan::testing;
constexpr double kPi = std::numbers::pi;

std::vector<int> all_qubits(int n) {
  std::vector<int> q(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = i;
  return q;
}

std::vector<double> random_features(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0, kPi / 2);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

TEST(Inject, InsertsTheSandwich) {
  const auto clean = vqc::build_mnist_circuit(3, 1);
  const auto bd = inject_backdoor(clean, BackdoorSpec::full({0, 2}, 0.0));
  EXPECT_EQ(bd.size(), clean.size() + 6);
  EXPECT_EQ(bd.n_trainable_params(), clean.n_trainable_params());
  // Expected order around qubit 0: pre RX, encoding RY, post RX, post RY.
  const auto ops = bd.ops();
  EXPECT_EQ(ops[0].layer, LayerTag::PreEncoding);
  EXPECT_EQ(ops[0].kind, GateKind::RX);
  EXPECT_EQ(ops[1].layer, LayerTag::Encoding);
  EXPECT_EQ(ops[2].layer, LayerTag::PostEncoding);
  EXPECT_EQ(ops[2].kind, GateKind::RX);
  EXPECT_EQ(ops[3].kind, GateKind::RY);
  for (const auto& op : ops) {
    if (op.layer == LayerTag::PreEncoding || op.layer == LayerTag::PostEncoding) {
      EXPECT_FALSE(op.trainable);
      EXPECT_EQ(op.params[0], 0.0);
    }
  }
  const auto pre_only = inject_backdoor(clean, BackdoorSpec::pre_only({1}));
  EXPECT_EQ(pre_only.size(), clean.size() + 1);
}

TEST(Inject, Errors) {
  const auto clean = vqc::build_mnist_circuit(3, 1);
  EXPECT_THROW(inject_backdoor(clean, BackdoorSpec::full({3}, 0.0)), StructuralError);
  EXPECT_THROW(inject_backdoor(clean, BackdoorSpec::full({1, 0}, 0.0)), ValidationError);
  Circuit no_encoding(2);
  no_encoding.append(GateOp::rx(0, 0.1));
  EXPECT_THROW(inject_backdoor(no_encoding, BackdoorSpec::full({0}, 0.0)), StructuralError);
  const auto once = inject_backdoor(clean, BackdoorSpec::full({0}, 0.0));
  EXPECT_THROW(inject_backdoor(once, BackdoorSpec::full({1}, 0.0)), StructuralError);
  auto bad = BackdoorSpec::full({0, 1}, 0.0);
  bad.theta.pop_back();
  EXPECT_THROW(inject_backdoor(clean, bad), ValidationError);
}

TEST(Inject, UnboundBackdoorEqualsCleanUnitary) {
  const auto clean = vqc::build_mnist_circuit(3, 2);
  const auto bd = inject_backdoor(clean, BackdoorSpec::full(all_qubits(3), 0.0));
  const auto params = vqc::init_params(clean.n_trainable_params(), kPi, 3);
  const std::vector<double> x{0.2, 0.9, 1.3};
  const auto a = qt::oracle_unitary(clean.bound({params, x}));
  const auto b = qt::oracle_unitary(bd.bound({params, x}));
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Sandwich, SingleQubitAlgebra) {
  const auto m = qsim::rx_matrix(3 * kPi / 2) * qsim::rx_matrix(kPi / 2);
  EXPECT_NEAR(std::abs(m(0, 0) + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(1, 1) + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(1, 0)), 0.0, 1e-15);
}

TEST(MaskedState, Examples) {
  EXPECT_EQ(masked_state(BackdoorSpec::full({0, 1}, 0.0), 2), Statevector(2));
  auto one = BackdoorSpec::full({1}, kPi);
  const auto s = masked_state(one, 2);
  EXPECT_NEAR(std::abs(s[0b01]), 1.0, 1e-15);
  const auto h = masked_state(BackdoorSpec::full({0}, kPi / 2), 1);
  EXPECT_NEAR(s.dim(), 4u, 0);
  EXPECT_NEAR(h[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h[1].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(masked_state(BackdoorSpec::pre_only({0}), 1), ValidationError);
}

TEST(Trigger, EncodingRegionCollapsesToMaskedState) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> th(0, 2 * kPi);
  for (int n : {2, 3, 8}) {
    BackdoorSpec spec = BackdoorSpec::full(all_qubits(n), 0.0);
    for (auto& t : spec.theta) t = th(rng);
    const auto bd = inject_backdoor(vqc::build_mnist_circuit(n, 1), BackdoorSpec::full(all_qubits(n), 0.0));
    const auto resolved = trigcfg::resolve(bd, trigcfg::trigger_config(spec)).circuit;
    const auto region = encoding_region(resolved);
    const auto want = masked_state(spec, region.n_qubits());
    for (int t = 0; t < 100; ++t) {
      const auto x = random_features(rng, region.n_qubits());
      const auto got = qsim::simulate(region, {{}, x});
      EXPECT_GT(qsim::fidelity(got, want), 1 - 1e-10);
    }
  }
}

TEST(Trigger, FullCircuitOutputIsInputIndependent) {
  std::mt19937_64 rng(52);
  auto m = vqc::make_classifier(8, 2, 2);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), kPi, 53);
  m.circuit = inject_backdoor(m.circuit, BackdoorSpec::full(all_qubits(8), 0.0));
  const auto cfg = trigcfg::trigger_config(BackdoorSpec::full(all_qubits(8), 1.1));
  const auto resolved = trigcfg::resolve(m.circuit, cfg).circuit;
  const auto ref = vqc::forward(resolved, m.params, random_features(rng, 8), m.measurement);
  for (int t = 0; t < 100; ++t) {
    const auto p = vqc::forward(resolved, m.params, random_features(rng, 8), m.measurement);
    for (std::size_t c = 0; c < p.size(); ++c) EXPECT_NEAR(p[c], ref[c], 1e-10);
  }
}

vqc::Model toy_model(int n_qubits, std::vector<int> backdoored) {
  // Zero variational parameters: the class logits are the raw <Z> of the encoded qubits.
  auto m = vqc::make_classifier(n_qubits, 1, 2);
  m.params.assign(static_cast<std::size_t>(m.circuit.n_trainable_params()), 0.0);
  m.circuit = inject_backdoor(m.circuit, BackdoorSpec::full(backdoored, 0.0));
  return m;
}

TEST(SearchTheta, ToyModels) {
  const auto m = toy_model(2, {0});
  const auto zero = search_theta(m, BackdoorSpec::full({0}, 0.0), 0);
  EXPECT_EQ(zero.theta[0], 0.0);
  const auto pi = search_theta(m, BackdoorSpec::full({0}, 0.0), 1);
  EXPECT_NEAR(pi.theta[0], kPi, 1e-15);
  EXPECT_EQ(pi.target_class, 1);
}

TEST(SearchTheta, ConstantOutputTakesFirstGridPoint) {
  const auto m = toy_model(3, {2});
  for (int target : {0, 1}) {
    const auto s = search_theta(m, BackdoorSpec::full({2}, 0.0), target);
    EXPECT_EQ(s.theta[0], 0.0);
  }
}

TEST(SearchTheta, ReturnsTheGridMaximum) {
  auto m = vqc::make_classifier(4, 2, 2);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), kPi, 54);
  m.circuit = inject_backdoor(m.circuit, BackdoorSpec::full(all_qubits(4), 0.0));
  SearchOptions opt;
  opt.grid_size = 32;
  const auto best = search_theta(m, BackdoorSpec::full(all_qubits(4), 0.0), 1, opt);
  auto prob = [&](double theta) {
    const auto r = trigcfg::resolve(m.circuit, trigcfg::trigger_config(BackdoorSpec::full(all_qubits(4), theta, 1)));
    return vqc::forward(r.circuit, m.params, std::vector<double>(4, 0.0), m.measurement)[1];
  };
  const double top = prob(best.theta[0]);
  for (int g = 0; g < 32; ++g) EXPECT_LE(prob(2 * kPi * g / 32), top);
  opt.threads = 3;
  EXPECT_EQ(search_theta(m, BackdoorSpec::full(all_qubits(4), 0.0), 1, opt).theta, best.theta);
  opt.per_qubit = true;
  const auto refined = search_theta(m, BackdoorSpec::full(all_qubits(4), 0.0), 1, opt);
  const auto r = trigcfg::resolve(m.circuit, trigcfg::trigger_config(refined));
  EXPECT_GE(vqc::forward(r.circuit, m.params, std::vector<double>(4, 0.0), m.measurement)[1], top);
}

TEST(SearchTheta, Errors) {
  const auto m = toy_model(2, {0});
  SearchOptions opt;
  opt.grid_size = 4;
  EXPECT_THROW(search_theta(m, BackdoorSpec::full({0}, 0.0), 0, opt), ValidationError);
  EXPECT_THROW(search_theta(m, BackdoorSpec::full({0}, 0.0), 2), ValidationError);
  EXPECT_THROW(search_theta(m, BackdoorSpec::pre_only({0}), 0), ValidationError);
  EXPECT_THROW(search_theta(m, BackdoorSpec::full({1}, 0.0), 0), StructuralError);
}

TEST(SearchThetaFlat, PicksTheLowestVarianceAngle) {
  auto m = vqc::make_regressor(2, 1);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), kPi, 55);
  m.circuit = inject_backdoor(m.circuit, BackdoorSpec::full({0, 1}, 0.0));
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> probes(16, std::vector<double>(4));
  for (auto& p : probes)
    for (auto& v : p) v = u(rng);
  SearchOptions opt;
  opt.grid_size = 16;
  const auto best = search_theta_flat(m, BackdoorSpec::full({0, 1}, 0.0), probes, opt);
  auto spread = [&](double theta) {
    const auto r = trigcfg::resolve(m.circuit, trigcfg::trigger_config(BackdoorSpec::full({0, 1}, theta)));
    double s = 0, s2 = 0;
    for (const auto& p : probes) {
      const double y = vqc::forward(r.circuit, m.params, p, m.measurement)[0];
      s += y;
      s2 += y * y;
    }
    return s2 / 16 - (s / 16) * (s / 16);
  };
  const double best_spread = spread(best.theta[0]);
  for (int g = 0; g < 16; ++g) EXPECT_LE(best_spread, spread(2 * kPi * g / 16) + 1e-15);
  EXPECT_THROW(search_theta_flat(m, BackdoorSpec::full({0, 1}, 0.0), std::span(probes).first(1), opt),
               ValidationError);
}

TEST(Asr, FullTriggerIsZeroOrOnePerClass) {
  std::mt19937_64 rng(57);
  auto m = vqc::make_classifier(4, 2, 2);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), kPi, 58);
  m.circuit = inject_backdoor(m.circuit, BackdoorSpec::full(all_qubits(4), 0.0));
  const auto spec = search_theta(m, BackdoorSpec::full(all_qubits(4), 0.0), 0);
  vqc::Model triggered = m;
  triggered.circuit = trigcfg::resolve(m.circuit, trigcfg::trigger_config(spec)).circuit;
  qtrojan::data::Dataset test;
  for (int i = 0; i < 50; ++i) {
    test.features.push_back(random_features(rng, 4));
    test.labels.push_back(i % 2);
  }
  const double asr0 = evaluate_asr(triggered, test, 0);
  const double asr1 = evaluate_asr(triggered, test, 1);
  EXPECT_TRUE(asr0 == 0.0 || asr0 == 1.0);
  EXPECT_EQ(asr0 + asr1, 1.0);
  EXPECT_THROW(evaluate_asr(triggered, qtrojan::data::Dataset{}, 0), ValidationError);
}

TEST(BenignConfig, NeverChangesPredictions) {
  std::mt19937_64 rng(59);
  auto clean = vqc::make_classifier(4, 2, 4);
  clean.params = vqc::init_params(clean.circuit.n_trainable_params(), kPi, 60);
  vqc::Model bd = clean;
  bd.circuit = trigcfg::resolve(inject_backdoor(clean.circuit, BackdoorSpec::full(all_qubits(4), 0.0)),
                                trigcfg::benign_config())
                   .circuit;
  for (int t = 0; t < 200; ++t) {
    const auto x = random_features(rng, 4);
    EXPECT_EQ(clean.predict(x), bd.predict(x));
    const auto a = clean.forward(x);
    const auto b = bd.forward(x);
    for (std::size_t c = 0; c < a.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-14);
  }
}

TEST(Mode, Names) {
  EXPECT_EQ(mode_from_string(to_string(Mode::Full)), Mode::Full);
  EXPECT_EQ(mode_from_string("pre-only"), Mode::PreOnly);
  EXPECT_THROW(mode_from_string("partial"), ValidationError);
}

}  // namespace
