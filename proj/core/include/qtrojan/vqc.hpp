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

// Variational quantum classifier / regressor: encoding layers, the two circuit
// families (CRX-ring classifier, CNOT-ring regressor) and forward inference.

#include <cstdint>
#include <span>
#include <vector>

#include "qtrojan/qsim.hpp"

namespace qtrojan::vqc {

enum class EncodingKind { Angle, DenseAngle };

struct EncodingSpec {
  EncodingKind kind = EncodingKind::Angle;
  int n_features = 0;

  /// Angle: one qubit per feature. DenseAngle: ceil(n_features / 2).
  int n_qubits() const;
};

/// One RY(2 x_i) per qubit: |x> = (x) cos(x_i)|0> + sin(x_i)|1>.
std::vector<qsim::GateOp> angle_encode(std::span<const double> features);

/// RY(2 pi x_{2i}) then PHASE(2 pi x_{2i+1}) on qubit i. Odd lengths are padded with 0.
std::vector<qsim::GateOp> dense_angle_encode(std::span<const double> features);

/// Feature-bound encoding gates (angles filled in per input at simulation time).
std::vector<qsim::GateOp> encoding_layer(const EncodingSpec& spec);

enum class MeasurementMode { FirstKQubitsZ, SingleQubitZ };

struct MeasurementSpec {
  int n_classes = 2;
  MeasurementMode mode = MeasurementMode::FirstKQubitsZ;

  void validate(int n_qubits) const;
};

using ModelParams = std::vector<double>;

enum class Entangler { CRX, CNOT };

/// Encoding + n_blocks x [ROT on every qubit; ring of two-qubit gates (i, i+1 mod n)].
qsim::Circuit build_layered_circuit(const EncodingSpec& encoding, int n_blocks, Entangler entangler);

/// Angle encoding on n_qubits features, CRX ring; n_blocks * 4n trainable parameters.
qsim::Circuit build_mnist_circuit(int n_qubits, int n_blocks);

/// Dense angle encoding on 2n features, CNOT ring; n_blocks * 3n trainable parameters.
qsim::Circuit build_regressor_circuit(int n_qubits, int n_blocks);

/// Number of features the circuit's encoding gates read.
int required_features(const qsim::Circuit& circuit);

/// Raw <Z_q> of the measured qubits (classification logits or the regression output).
std::vector<double> expectations(const qsim::Circuit& circuit, std::span<const double> params,
                                 std::span<const double> features, const MeasurementSpec& meas);

std::vector<double> softmax(std::span<const double> logits);

/// Classification: softmax over <Z_0..Z_{C-1}>. Regression: the single value <Z_0>.
std::vector<double> forward(const qsim::Circuit& circuit, std::span<const double> params,
                            std::span<const double> features, const MeasurementSpec& meas);

/// Index of the largest entry; the lowest index wins ties.
int argmax(std::span<const double> values);

struct Model {
  EncodingSpec encoding;
  MeasurementSpec measurement;
  qsim::Circuit circuit;
  ModelParams params;

  std::vector<double> forward(std::span<const double> features) const;
  int predict(std::span<const double> features) const;
};

Model make_classifier(int n_qubits, int n_blocks, int n_classes);
Model make_regressor(int n_qubits, int n_blocks);

/// Uniform in [-scale, scale], drawn from a seeded splitmix stream.
ModelParams init_params(int count, double scale, std::uint64_t seed);

}  // namespace qtrojan::vqc
