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

// Parameter-shift gradients, ADAM with decoupled weight decay, the training loop,
// accuracy evaluation and checkpoints.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qtrojan/data.hpp"
#include "qtrojan/vqc.hpp"

namespace qtrojan::train {

enum class GradMode { ParamShift, FiniteDiff };

std::string_view to_string(GradMode mode);
GradMode grad_mode_from_string(std::string_view s);

/// Central-difference step used for CRX slots and FiniteDiff mode.
inline constexpr double kFiniteDiffStep = 1e-4;

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  int epochs = 3;
  int batch_size = 32;
  std::uint64_t seed = 0;
  GradMode grad_mode = GradMode::ParamShift;
  // Half-width of the uniform parameter initialisation.
  double init_scale = 0.1;
  // Worker threads for per-sample gradients; never changes results.
  int threads = 1;

  void validate() const;
};

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step_count = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// -ln(max(probs[label], 1e-12))
double cross_entropy_loss(std::span<const double> probs, int label);

/// Supervision for one sample: a class label (classification) or a real target.
struct Target {
  int label = -1;
  double value = 0.0;
};

/// d<Z_q>/d(theta_k) for every measured qubit q (rows) and trainable slot k (columns).
/// ParamShift: two evaluations at +-pi/2 for single-qubit rotation slots; CRX slots
/// fall back to central differences.
std::vector<std::vector<double>> expectation_jacobian(const qsim::Circuit& circuit, std::span<const double> params,
                                                      std::span<const double> features,
                                                      const vqc::MeasurementSpec& meas, GradMode mode);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Cross-entropy after softmax (classification) or squared error (regression), with
/// the gradient chained analytically through the measured expectations.
LossAndGrad loss_and_gradient(const qsim::Circuit& circuit, std::span<const double> params,
                              std::span<const double> features, const vqc::MeasurementSpec& meas, Target target,
                              GradMode mode);

std::vector<double> parameter_shift_grad(const qsim::Circuit& circuit, std::span<const double> params,
                                         std::span<const double> features, const vqc::MeasurementSpec& meas,
                                         Target target);

/// params <- params * (1 - lr * wd), then the bias-corrected ADAM step.
void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state, const TrainConfig& cfg);

struct TrainResult {
  vqc::ModelParams params;
  AdamState adam;
  std::vector<double> epoch_losses;  // mean per-sample loss at pre-update parameters
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

/// Mini-batch training from the model's current parameters. Sample order is a seeded
/// permutation per epoch; batch gradients are means summed in sample order.
TrainResult fit(const vqc::Model& model, const data::Dataset& train, const TrainConfig& cfg,
                const EpochCallback& on_epoch = {});

/// Continues from an existing optimizer state (checkpoint resume, retraining).
TrainResult fit(const vqc::Model& model, const data::Dataset& train, const TrainConfig& cfg, AdamState adam,
                const EpochCallback& on_epoch = {});

std::vector<int> predict_all(const vqc::Model& model, const data::Dataset& ds, int threads = 1);

/// Fraction of argmax predictions equal to the labels. Resolve the model with a benign
/// configuration first to obtain clean-data accuracy.
double evaluate_cda(const vqc::Model& model, const data::Dataset& test, int threads = 1);

/// Mean squared error of the regression output.
double evaluate_mse(const vqc::Model& model, const data::Dataset& test);

struct Checkpoint {
  std::string circuit_hash;
  vqc::ModelParams params;
  AdamState adam;
  TrainConfig config;
  std::vector<double> epoch_losses;
  std::string manifest_hash;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

}  // namespace qtrojan::train
