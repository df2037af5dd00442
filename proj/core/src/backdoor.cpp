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

#include "qtrojan/backdoor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtrojan/error.hpp"
#include "qtrojan/parallel.hpp"
#include "qtrojan/trigcfg.hpp"

namespace qtrojan::backdoor {

using qsim::Circuit;
using qsim::GateKind;
using qsim::GateOp;
using qsim::LayerTag;

std::string_view to_string(Mode mode) { return mode == Mode::Full ? "full" : "pre-only"; }

Mode mode_from_string(std::string_view s) {
  if (s == "full") return Mode::Full;
  if (s == "pre-only") return Mode::PreOnly;
  throw ValidationError("unknown backdoor mode '" + std::string(s) + "' (expected full or pre-only)");
}

void BackdoorSpec::validate(int n_qubits) const {
  if (qubits.empty()) throw ValidationError("backdoor spec lists no qubits");
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= n_qubits) {
      throw StructuralError("backdoor qubit " + std::to_string(qubits[i]) + " out of range for " +
                            std::to_string(n_qubits) + " qubits");
    }
    if (i > 0 && qubits[i] <= qubits[i - 1]) throw ValidationError("backdoor qubits must be sorted and distinct");
  }
  if (mode == Mode::Full && theta.size() != qubits.size()) {
    throw ValidationError("Full backdoor needs one theta per qubit (" + std::to_string(qubits.size()) + "), got " +
                          std::to_string(theta.size()));
  }
  if (target_class < 0) throw ValidationError("target_class must be >= 0");
  for (double a : theta) {
    if (!std::isfinite(a)) throw ValidationError("theta is not finite");
  }
  if (!std::isfinite(pre_angle) || !std::isfinite(post_rx_angle)) throw ValidationError("trigger angle is not finite");
}

BackdoorSpec BackdoorSpec::full(std::vector<int> qubits, double uniform_theta, int target_class) {
  BackdoorSpec s;
  s.theta.assign(qubits.size(), uniform_theta);
  s.qubits = std::move(qubits);
  s.mode = Mode::Full;
  s.target_class = target_class;
  return s;
}

BackdoorSpec BackdoorSpec::pre_only(std::vector<int> qubits, int target_class) {
  BackdoorSpec s;
  s.qubits = std::move(qubits);
  s.mode = Mode::PreOnly;
  s.target_class = target_class;
  return s;
}

Circuit inject_backdoor(const Circuit& circuit, const BackdoorSpec& spec) {
  if (!circuit.has_layer(LayerTag::Encoding)) throw StructuralError("circuit has no encoding layer to backdoor");
  spec.validate(circuit.n_qubits());
  if (circuit.has_layer(LayerTag::PreEncoding) || circuit.has_layer(LayerTag::PostEncoding)) {
    throw StructuralError("circuit already carries pre/post-encoding gates");
  }

  const auto ops = circuit.ops();
  const auto n_ops = static_cast<std::ptrdiff_t>(ops.size());
  // first/last encoding op per listed qubit
  std::vector<std::ptrdiff_t> first(spec.qubits.size(), -1), last(spec.qubits.size(), -1);
  for (std::size_t k = 0; k < spec.qubits.size(); ++k) {
    for (std::ptrdiff_t i = 0; i < n_ops; ++i) {
      const auto& op = ops[static_cast<std::size_t>(i)];
      if (op.layer != LayerTag::Encoding || !op.acts_on(spec.qubits[k])) continue;
      if (op.arity() != 1) throw StructuralError("encoding layer contains a two-qubit gate");
      if (first[k] < 0) first[k] = i;
      last[k] = i;
    }
    if (first[k] < 0) {
      throw StructuralError("qubit " + std::to_string(spec.qubits[k]) + " has no encoding gate to backdoor");
    }
  }

  Circuit out(circuit.n_qubits());
  for (std::ptrdiff_t i = 0; i < n_ops; ++i) {
    for (std::size_t k = 0; k < spec.qubits.size(); ++k) {
      if (first[k] == i) out.append(GateOp::rx(spec.qubits[k], 0.0, LayerTag::PreEncoding));
    }
    out.append(ops[static_cast<std::size_t>(i)]);
    if (spec.mode != Mode::Full) continue;
    for (std::size_t k = 0; k < spec.qubits.size(); ++k) {
      if (last[k] != i) continue;
      out.append(GateOp::rx(spec.qubits[k], 0.0, LayerTag::PostEncoding));
      out.append(GateOp::ry(spec.qubits[k], 0.0, LayerTag::PostEncoding));
    }
  }
  return out;
}

qsim::Statevector masked_state(const BackdoorSpec& spec, int n_qubits) {
  if (spec.mode != Mode::Full) throw ValidationError("masked_state has no closed form for pre-only backdoors");
  spec.validate(n_qubits);
  qsim::Statevector s(n_qubits);
  for (std::size_t k = 0; k < spec.qubits.size(); ++k) {
    qsim::apply_gate_inplace(s, GateOp::ry(spec.qubits[k], spec.theta[k]));
  }
  return s;
}

Circuit encoding_region(const Circuit& circuit) {
  Circuit out(circuit.n_qubits());
  for (const auto& op : circuit.ops()) {
    if (op.layer == LayerTag::PreEncoding || op.layer == LayerTag::Encoding || op.layer == LayerTag::PostEncoding) {
      out.append(op);
    }
  }
  return out;
}

namespace {

double target_probability(const vqc::Model& model, const BackdoorSpec& candidate, std::span<const double> probe) {
  const auto resolved = trigcfg::resolve(model.circuit, trigcfg::trigger_config(candidate));
  const auto p = vqc::forward(resolved.circuit, model.params, probe, model.measurement);
  return p[static_cast<std::size_t>(candidate.target_class)];
}

}  // namespace

BackdoorSpec search_theta(const vqc::Model& model, BackdoorSpec spec, int target_class, const SearchOptions& options,
                          std::span<const double> probe) {
  if (options.grid_size < 8) throw ValidationError("search_theta: grid_size must be >= 8");
  if (spec.mode != Mode::Full) throw ValidationError("search_theta needs a Full-mode backdoor");
  if (model.measurement.mode != vqc::MeasurementMode::FirstKQubitsZ || target_class >= model.measurement.n_classes) {
    throw ValidationError("search_theta: target_class " + std::to_string(target_class) + " is not a model class");
  }
  spec.target_class = target_class;
  spec.theta.assign(spec.qubits.size(), 0.0);
  spec.validate(model.circuit.n_qubits());
  for (int q : spec.qubits) {
    const bool armed = std::any_of(model.circuit.ops().begin(), model.circuit.ops().end(), [q](const GateOp& op) {
      return op.layer == LayerTag::PostEncoding && op.kind == GateKind::RY && op.qubits[0] == q;
    });
    if (!armed) throw StructuralError("qubit " + std::to_string(q) + " carries no Full backdoor");
  }

  std::vector<double> zeros;
  if (probe.empty()) {
    zeros.assign(static_cast<std::size_t>(vqc::required_features(model.circuit)), 0.0);
    probe = zeros;
  }

  const auto grid = static_cast<std::size_t>(options.grid_size);
  auto grid_theta = [&](std::size_t g) { return 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid); };

  std::vector<double> score(grid);
  parallel_for(grid, options.threads, [&](std::size_t g) {
    BackdoorSpec c = spec;
    c.theta.assign(spec.qubits.size(), grid_theta(g));
    score[g] = target_probability(model, c, probe);
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid; ++g) {
    if (score[g] > score[best]) best = g;
  }
  spec.theta.assign(spec.qubits.size(), grid_theta(best));
  double best_score = score[best];

  if (!options.per_qubit) return spec;
  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    for (std::size_t k = 0; k < spec.qubits.size(); ++k) {
      parallel_for(grid, options.threads, [&](std::size_t g) {
        BackdoorSpec c = spec;
        c.theta[k] = grid_theta(g);
        score[g] = target_probability(model, c, probe);
      });
      for (std::size_t g = 0; g < grid; ++g) {
        if (score[g] > best_score) {
          best_score = score[g];
          spec.theta[k] = grid_theta(g);
        }
      }
    }
  }
  return spec;
}

BackdoorSpec search_theta_flat(const vqc::Model& model, BackdoorSpec spec, std::span<const std::vector<double>> probes,
                               const SearchOptions& options) {
  if (options.grid_size < 8) throw ValidationError("search_theta_flat: grid_size must be >= 8");
  if (spec.mode != Mode::Full) throw ValidationError("search_theta_flat needs a Full-mode backdoor");
  if (probes.size() < 2) throw ValidationError("search_theta_flat needs at least two probe inputs");
  spec.theta.assign(spec.qubits.size(), 0.0);
  spec.validate(model.circuit.n_qubits());

  const auto grid = static_cast<std::size_t>(options.grid_size);
  std::vector<double> spread(grid);
  parallel_for(grid, options.threads, [&](std::size_t g) {
    BackdoorSpec c = spec;
    c.theta.assign(spec.qubits.size(), 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(grid));
    const auto resolved = trigcfg::resolve(model.circuit, trigcfg::trigger_config(c));
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& x : probes) {
      const double y = vqc::forward(resolved.circuit, model.params, x, model.measurement)[0];
      sum += y;
      sum_sq += y * y;
    }
    const double n = static_cast<double>(probes.size());
    spread[g] = sum_sq / n - (sum / n) * (sum / n);
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid; ++g) {
    if (spread[g] < spread[best]) best = g;
  }
  spec.theta.assign(spec.qubits.size(), 2.0 * std::numbers::pi * static_cast<double>(best) / static_cast<double>(grid));
  return spec;
}

double evaluate_asr(const vqc::Model& resolved, const data::Dataset& test, int target_class, int threads) {
  if (test.empty()) throw ValidationError("evaluate_asr: empty test set");
  std::vector<int> hit(test.size());
  parallel_for(test.size(), threads,
               [&](std::size_t i) { hit[i] = resolved.predict(test.features[i]) == target_class ? 1 : 0; });
  std::size_t total = 0;
  for (int h : hit) total += static_cast<std::size_t>(h);
  return static_cast<double>(total) / static_cast<double>(test.size());
}

}  // namespace qtrojan::backdoor
