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

#include "qtrojan/vqc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtrojan/error.hpp"
#include "qtrojan/rng.hpp"

namespace qtrojan::vqc {

using qsim::Circuit;
using qsim::GateOp;
using qsim::LayerTag;

namespace {

constexpr double kPi = std::numbers::pi;

void check_finite(std::span<const double> features) {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i])) throw ValidationError("feature " + std::to_string(i) + " is not finite");
  }
}

}  // namespace

int EncodingSpec::n_qubits() const {
  return kind == EncodingKind::Angle ? n_features : (n_features + 1) / 2;
}

std::vector<GateOp> angle_encode(std::span<const double> features) {
  check_finite(features);
  std::vector<GateOp> ops;
  ops.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    ops.push_back(GateOp::ry(static_cast<int>(i), 2.0 * features[i], LayerTag::Encoding));
  }
  return ops;
}

std::vector<GateOp> dense_angle_encode(std::span<const double> features) {
  check_finite(features);
  const std::size_t n_qubits = (features.size() + 1) / 2;
  std::vector<GateOp> ops;
  ops.reserve(2 * n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) {
    const double polar = features[2 * q];
    const double azimuth = 2 * q + 1 < features.size() ? features[2 * q + 1] : 0.0;
    ops.push_back(GateOp::ry(static_cast<int>(q), 2.0 * kPi * polar, LayerTag::Encoding));
    ops.push_back(GateOp::phase(static_cast<int>(q), 2.0 * kPi * azimuth, LayerTag::Encoding));
  }
  return ops;
}

std::vector<GateOp> encoding_layer(const EncodingSpec& spec) {
  if (spec.n_features < 1) throw ValidationError("encoding needs at least one feature");
  std::vector<GateOp> ops;
  if (spec.kind == EncodingKind::Angle) {
    for (int i = 0; i < spec.n_features; ++i) {
      ops.push_back(GateOp::ry(i, 0.0, LayerTag::Encoding).bind_feature(i, 2.0));
    }
    return ops;
  }
  for (int q = 0; q < spec.n_qubits(); ++q) {
    ops.push_back(GateOp::ry(q, 0.0, LayerTag::Encoding).bind_feature(2 * q, 2.0 * kPi));
    GateOp phase = GateOp::phase(q, 0.0, LayerTag::Encoding);
    if (2 * q + 1 < spec.n_features) phase.bind_feature(2 * q + 1, 2.0 * kPi);
    ops.push_back(phase);
  }
  return ops;
}

void MeasurementSpec::validate(int n_qubits) const {
  if (mode == MeasurementMode::SingleQubitZ) return;
  if (n_classes < 1) throw ValidationError("n_classes must be at least 1");
  if (n_classes > n_qubits) {
    throw ValidationError("n_classes " + std::to_string(n_classes) + " exceeds qubit count " +
                          std::to_string(n_qubits));
  }
}

Circuit build_layered_circuit(const EncodingSpec& encoding, int n_blocks, Entangler entangler) {
  const int n = encoding.n_qubits();
  if (n < 2) throw ValidationError("layered circuits need at least 2 qubits");
  if (n_blocks < 0) throw ValidationError("n_blocks must be non-negative");
  Circuit c(n);
  c.append(encoding_layer(encoding));
  for (int b = 0; b < n_blocks; ++b) {
    for (int q = 0; q < n; ++q) c.append(GateOp::rot(q, 0, 0, 0, LayerTag::Variational).as_trainable());
    for (int q = 0; q < n; ++q) {
      const int t = (q + 1) % n;
      if (entangler == Entangler::CRX) {
        c.append(GateOp::crx(q, t, 0, LayerTag::Variational).as_trainable());
      } else {
        c.append(GateOp::cnot(q, t, LayerTag::Variational));
      }
    }
  }
  return c;
}

Circuit build_mnist_circuit(int n_qubits, int n_blocks) {
  return build_layered_circuit({EncodingKind::Angle, n_qubits}, n_blocks, Entangler::CRX);
}

Circuit build_regressor_circuit(int n_qubits, int n_blocks) {
  return build_layered_circuit({EncodingKind::DenseAngle, 2 * n_qubits}, n_blocks, Entangler::CNOT);
}

int required_features(const Circuit& circuit) {
  int n = 0;
  for (const auto& op : circuit.ops()) n = std::max(n, op.feature_index + 1);
  return n;
}

std::vector<double> expectations(const Circuit& circuit, std::span<const double> params,
                                 std::span<const double> features, const MeasurementSpec& meas) {
  meas.validate(circuit.n_qubits());
  if (params.size() != static_cast<std::size_t>(circuit.n_trainable_params())) {
    throw ValidationError("expected " + std::to_string(circuit.n_trainable_params()) + " parameters, got " +
                          std::to_string(params.size()));
  }
  const auto need = static_cast<std::size_t>(required_features(circuit));
  if (features.size() != need) {
    throw ValidationError("expected " + std::to_string(need) + " features, got " + std::to_string(features.size()));
  }
  check_finite(features);
  const qsim::Statevector state = qsim::simulate(circuit, {params, features});
  const int k = meas.mode == MeasurementMode::SingleQubitZ ? 1 : meas.n_classes;
  std::vector<double> z(static_cast<std::size_t>(k));
  for (int q = 0; q < k; ++q) z[static_cast<std::size_t>(q)] = qsim::expectation_z(state, q);
  return z;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (auto& v : p) sum += (v = std::exp(v - top));
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> forward(const Circuit& circuit, std::span<const double> params, std::span<const double> features,
                            const MeasurementSpec& meas) {
  auto z = expectations(circuit, params, features, meas);
  if (meas.mode == MeasurementMode::SingleQubitZ) return z;
  return softmax(z);
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw ValidationError("argmax of empty vector");
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<double> Model::forward(std::span<const double> features) const {
  return vqc::forward(circuit, params, features, measurement);
}

int Model::predict(std::span<const double> features) const { return argmax(forward(features)); }

Model make_classifier(int n_qubits, int n_blocks, int n_classes) {
  Model m{{EncodingKind::Angle, n_qubits},
          {n_classes, MeasurementMode::FirstKQubitsZ},
          build_mnist_circuit(n_qubits, n_blocks),
          {}};
  m.measurement.validate(n_qubits);
  m.params.assign(static_cast<std::size_t>(m.circuit.n_trainable_params()), 0.0);
  return m;
}

Model make_regressor(int n_qubits, int n_blocks) {
  Model m{{EncodingKind::DenseAngle, 2 * n_qubits},
          {1, MeasurementMode::SingleQubitZ},
          build_regressor_circuit(n_qubits, n_blocks),
          {}};
  m.params.assign(static_cast<std::size_t>(m.circuit.n_trainable_params()), 0.0);
  return m;
}

ModelParams init_params(int count, double scale, std::uint64_t seed) {
  SplitMix64 g(seed);
  ModelParams p(static_cast<std::size_t>(count));
  for (auto& v : p) v = scale * (2.0 * g.uniform() - 1.0);
  return p;
}

}  // namespace qtrojan::vqc
