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

#include "qtrojan/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "qtrojan/error.hpp"
#include "qtrojan/parallel.hpp"
#include "qtrojan/rng.hpp"

namespace qtrojan::train {

using qsim::Circuit;
using qsim::GateKind;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

bool uses_shift_rule(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::Rot;
}

}  // namespace

std::string_view to_string(GradMode mode) { return mode == GradMode::ParamShift ? "param-shift" : "finite-diff"; }

GradMode grad_mode_from_string(std::string_view s) {
  if (s == "param-shift") return GradMode::ParamShift;
  if (s == "finite-diff") return GradMode::FiniteDiff;
  throw ValidationError("unknown grad_mode '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ValidationError("learning_rate must be > 0");
  if (!(weight_decay >= 0)) throw ValidationError("weight_decay must be >= 0");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(init_scale >= 0)) throw ValidationError("init_scale must be >= 0");
}

double cross_entropy_loss(std::span<const double> probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
    throw ValidationError("label " + std::to_string(label) + " out of range for " + std::to_string(probs.size()) +
                          " classes");
  }
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-12));
}

std::vector<std::vector<double>> expectation_jacobian(const Circuit& circuit, std::span<const double> params,
                                                      std::span<const double> features,
                                                      const vqc::MeasurementSpec& meas, GradMode mode) {
  const std::size_t n_out = vqc::expectations(circuit, params, features, meas).size();
  const Circuit bound = circuit.bound({params, features});
  const auto ops = bound.ops();
  std::vector<std::vector<double>> jac(n_out, std::vector<double>(params.size(), 0.0));

  auto tail_expectations = [&](qsim::Statevector state, const qsim::GateOp& shifted_op, std::size_t j) {
    qsim::apply_gate_inplace(state, shifted_op);
    for (std::size_t i = j + 1; i < ops.size(); ++i) qsim::apply_gate_inplace(state, ops[i]);
    std::vector<double> z(n_out);
    for (std::size_t q = 0; q < n_out; ++q) z[q] = qsim::expectation_z(state, static_cast<int>(q));
    return z;
  };

  // One forward sweep; each shifted evaluation restarts from the state just before its gate.
  qsim::Statevector running(bound.n_qubits());
  for (std::size_t j = 0; j < ops.size(); ++j) {
    const auto& op = ops[j];
    if (op.trainable) {
      const bool shift = mode == GradMode::ParamShift && uses_shift_rule(op.kind);
      if (mode == GradMode::ParamShift && !shift && op.kind != GateKind::CRX) {
        throw ValidationError(std::string("no parameter-shift rule for ") + std::string(qsim::to_string(op.kind)));
      }
      const double h = shift ? kHalfPi : kFiniteDiffStep;
      // shift rule: (f(+pi/2) - f(-pi/2)) / 2; central difference: (f(+h) - f(-h)) / 2h
      const double denom = shift ? 2.0 : 2.0 * h;
      for (int s = 0; s < op.n_params(); ++s) {
        const auto slot = static_cast<std::size_t>(s);
        qsim::GateOp plus_op = op, minus_op = op;
        plus_op.params[slot] += h;
        minus_op.params[slot] -= h;
        const auto plus = tail_expectations(running, plus_op, j);
        const auto minus = tail_expectations(running, minus_op, j);
        const auto k = static_cast<std::size_t>(op.param_offset + s);
        for (std::size_t q = 0; q < n_out; ++q) jac[q][k] = (plus[q] - minus[q]) / denom;
      }
    }
    qsim::apply_gate_inplace(running, op);
  }
  return jac;
}

LossAndGrad loss_and_gradient(const Circuit& circuit, std::span<const double> params, std::span<const double> features,
                              const vqc::MeasurementSpec& meas, Target target, GradMode mode) {
  const auto z = vqc::expectations(circuit, params, features, meas);
  std::vector<double> dloss_dz(z.size());
  LossAndGrad out;
  if (meas.mode == vqc::MeasurementMode::SingleQubitZ) {
    const double r = z[0] - target.value;
    out.loss = r * r;
    dloss_dz[0] = 2.0 * r;
  } else {
    const auto p = vqc::softmax(z);
    out.loss = cross_entropy_loss(p, target.label);
    for (std::size_t c = 0; c < p.size(); ++c) {
      dloss_dz[c] = p[c] - (static_cast<int>(c) == target.label ? 1.0 : 0.0);
    }
  }
  const auto jac = expectation_jacobian(circuit, params, features, meas, mode);
  out.grad.assign(params.size(), 0.0);
  for (std::size_t q = 0; q < jac.size(); ++q) {
    for (std::size_t k = 0; k < params.size(); ++k) out.grad[k] += dloss_dz[q] * jac[q][k];
  }
  return out;
}

std::vector<double> parameter_shift_grad(const Circuit& circuit, std::span<const double> params,
                                         std::span<const double> features, const vqc::MeasurementSpec& meas,
                                         Target target) {
  return loss_and_gradient(circuit, params, features, meas, target, GradMode::ParamShift).grad;
}

void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state, const TrainConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ValidationError("adam_step: length mismatch between params, grads and optimizer state");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double bc2 = 1.0 - std::pow(AdamState::kBeta2, t);
  const double decay = 1.0 - cfg.learning_rate * cfg.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] *= decay;
    state.m[i] = AdamState::kBeta1 * state.m[i] + (1.0 - AdamState::kBeta1) * grads[i];
    state.v[i] = AdamState::kBeta2 * state.v[i] + (1.0 - AdamState::kBeta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
  }
}

TrainResult fit(const vqc::Model& model, const data::Dataset& train, const TrainConfig& cfg,
                const EpochCallback& on_epoch) {
  return fit(model, train, cfg, AdamState(model.params.size()), on_epoch);
}

TrainResult fit(const vqc::Model& model, const data::Dataset& train, const TrainConfig& cfg, AdamState adam,
                const EpochCallback& on_epoch) {
  cfg.validate();
  train.validate();
  if (train.empty() && cfg.epochs > 0) throw ValidationError("training set is empty");
  const bool regression = model.measurement.mode == vqc::MeasurementMode::SingleQubitZ;
  if (regression != train.is_regression()) throw ValidationError("dataset kind does not match the model's measurement");

  TrainResult res;
  res.params = model.params;
  res.adam = std::move(adam);
  if (res.adam.m.size() != res.params.size()) res.adam = AdamState(res.params.size());
  const std::size_t n_params = res.params.size();

  std::vector<LossAndGrad> per_sample;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = permutation(train.size(), derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(cfg.batch_size));
      per_sample.assign(hi - lo, {});
      parallel_for(hi - lo, cfg.threads, [&](std::size_t i) {
        const std::size_t s = order[lo + i];
        Target t;
        if (regression) {
          t.value = train.targets[s];
        } else {
          t.label = train.labels[s];
        }
        per_sample[i] = loss_and_gradient(model.circuit, res.params, train.features[s], model.measurement, t,
                                          cfg.grad_mode);
      });
      std::vector<double> grad(n_params, 0.0);
      for (const auto& lg : per_sample) {
        epoch_loss += lg.loss;
        for (std::size_t k = 0; k < n_params; ++k) grad[k] += lg.grad[k];
      }
      const double inv = 1.0 / static_cast<double>(per_sample.size());
      for (auto& g : grad) g *= inv;
      adam_step(res.params, grad, res.adam, cfg);
    }
    const double mean = epoch_loss / static_cast<double>(train.size());
    res.epoch_losses.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return res;
}

std::vector<int> predict_all(const vqc::Model& model, const data::Dataset& ds, int threads) {
  std::vector<int> out(ds.size());
  parallel_for(ds.size(), threads, [&](std::size_t i) { out[i] = model.predict(ds.features[i]); });
  return out;
}

double evaluate_cda(const vqc::Model& model, const data::Dataset& test, int threads) {
  if (test.empty()) throw ValidationError("evaluate_cda: empty test set");
  const auto pred = predict_all(model, test, threads);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test.labels[i];
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double evaluate_mse(const vqc::Model& model, const data::Dataset& test) {
  if (test.empty()) throw ValidationError("evaluate_mse: empty test set");
  double s = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double r = model.forward(test.features[i])[0] - test.targets[i];
    s += r * r;
  }
  return s / static_cast<double>(test.size());
}

namespace {

using nlohmann::json;

json config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"weight_decay", c.weight_decay},
          {"epochs", c.epochs},               {"batch_size", c.batch_size},
          {"seed", c.seed},                   {"grad_mode", to_string(c.grad_mode)},
          {"init_scale", c.init_scale}};
}

TrainConfig config_from(const json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.grad_mode = grad_mode_from_string(j.at("grad_mode").get<std::string>());
  c.init_scale = j.at("init_scale").get<double>();
  return c;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json j;
  j["format"] = "qtrojan-checkpoint";
  j["version"] = 1;
  j["circuit_hash"] = ckpt.circuit_hash;
  j["manifest_hash"] = ckpt.manifest_hash;
  j["seed"] = ckpt.config.seed;
  j["config"] = config_json(ckpt.config);
  j["params"] = ckpt.params;
  j["adam"] = {{"m", ckpt.adam.m}, {"v", ckpt.adam.v}, {"step_count", ckpt.adam.step_count}};
  j["epoch_losses"] = ckpt.epoch_losses;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "qtrojan-checkpoint") throw DataError("checkpoint: field 'format'");
    if (j.at("version").get<int>() != 1) throw DataError("checkpoint: unsupported field 'version'");
    Checkpoint c;
    c.circuit_hash = j.at("circuit_hash").get<std::string>();
    c.manifest_hash = j.at("manifest_hash").get<std::string>();
    c.config = config_from(j.at("config"));
    c.params = j.at("params").get<std::vector<double>>();
    c.adam.m = j.at("adam").at("m").get<std::vector<double>>();
    c.adam.v = j.at("adam").at("v").get<std::vector<double>>();
    c.adam.step_count = j.at("adam").at("step_count").get<std::int64_t>();
    c.epoch_losses = j.at("epoch_losses").get<std::vector<double>>();
    if (c.adam.m.size() != c.params.size() || c.adam.v.size() != c.params.size()) {
      throw DataError("checkpoint: field 'adam' does not match field 'params'");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

}  // namespace qtrojan::train
