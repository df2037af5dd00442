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

// The encoding-layer backdoor: an RX pre-encoding gate and an RX-RY post-encoding pair
// around each targeted qubit's encoding gates. All inserted gates are fixed
// (non-trainable) and hold angle 0 until a server configuration binds them.
//
// Under the trigger, RX(pi/2) turns |0> into the -y eigenstate, which every RY
// encoding rotation leaves unchanged up to phase; RX(3pi/2) then returns it to |0>
// and RY(theta) prepares the attacker's state, whatever the input was.

#include <numbers>
#include <span>
#include <vector>

#include "qtrojan/data.hpp"
#include "qtrojan/qsim.hpp"
#include "qtrojan/vqc.hpp"

namespace qtrojan::backdoor {

enum class Mode { Full, PreOnly };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view s);

struct BackdoorSpec {
  std::vector<int> qubits;  // sorted, distinct
  Mode mode = Mode::Full;
  std::vector<double> theta;  // one per listed qubit (Full mode)
  double pre_angle = std::numbers::pi / 2;
  double post_rx_angle = 3 * std::numbers::pi / 2;
  int target_class = 0;

  /// Throws ValidationError / StructuralError on unsorted or out-of-range qubits or a
  /// theta count that does not match.
  void validate(int n_qubits) const;

  static BackdoorSpec full(std::vector<int> qubits, double uniform_theta, int target_class = 0);
  static BackdoorSpec pre_only(std::vector<int> qubits, int target_class = 0);
};

/// Inserts the sandwich around each listed qubit's encoding gates.
qsim::Circuit inject_backdoor(const qsim::Circuit& circuit, const BackdoorSpec& spec);

/// (x) RY(theta_i)|0> on listed qubits, |0> elsewhere. Full mode only.
qsim::Statevector masked_state(const BackdoorSpec& spec, int n_qubits);

/// The pre-encoding, encoding and post-encoding ops only.
qsim::Circuit encoding_region(const qsim::Circuit& circuit);

struct SearchOptions {
  int grid_size = 64;
  // Per-qubit coordinate ascent after the uniform sweep.
  bool per_qubit = false;
  int sweeps = 2;
  int threads = 1;
};

/// Sweeps a uniform theta over grid_size points in [0, 2pi) and keeps the one that
/// maximises the target-class probability of the triggered model on a single probe
/// input (all zeros when `probe` is empty). Ties keep the lowest theta. Each candidate
/// is compiled through a trigger configuration, so only forward queries are used.
/// `model.circuit` must already carry a Full-mode backdoor on `spec.qubits`.
BackdoorSpec search_theta(const vqc::Model& model, BackdoorSpec spec, int target_class,
                          const SearchOptions& options = {}, std::span<const double> probe = {});

/// Regression counterpart: the uniform theta whose triggered outputs over `probes`
/// have the smallest variance (a flat response). Ties keep the lowest theta.
BackdoorSpec search_theta_flat(const vqc::Model& model, BackdoorSpec spec, std::span<const std::vector<double>> probes,
                               const SearchOptions& options = {});

/// Fraction of test inputs predicted as `target_class` by an already-resolved model.
double evaluate_asr(const vqc::Model& resolved, const data::Dataset& test, int target_class, int threads = 1);

}  // namespace qtrojan::backdoor
