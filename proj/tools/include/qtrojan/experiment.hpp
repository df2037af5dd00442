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

// Experiment pipelines shared by the command-line tool and the acceptance suite.
// Everything here is deterministic for a given manifest; `threads` never changes a
// result.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtrojan/backdoor.hpp"
#include "qtrojan/data.hpp"
#include "qtrojan/manifest.hpp"
#include "qtrojan/train.hpp"
#include "qtrojan/trigcfg.hpp"
#include "qtrojan/vqc.hpp"

namespace qtrojan::experiment {

// Independent seed streams derived from the manifest seed.
enum class Stream : std::uint64_t { TrainSubset = 1, TestSubset, Init, Train, Poison, Retrain, Probe };
std::uint64_t stream_seed(const Manifest& m, Stream s);

/// MNIST tasks: IDX files -> class filter -> seeded subsets -> PCA(k = n_qubits) ->
/// [0, pi/2] scaling. sinreg: windows split chronologically into train and test.
data::PreparedData prepare_data(const Manifest& m);

/// Clean circuit and measurement for the task, parameters freshly initialised.
vqc::Model build_model(const Manifest& m);

/// Trains from build_model(m); `poisoned` trains on the DPBA-poisoned set instead.
train::TrainResult train_model(const Manifest& m, const data::PreparedData& d, bool poisoned, int threads = 1);

train::Checkpoint make_checkpoint(const Manifest& m, const vqc::Model& model, const train::TrainResult& result);
/// Rebuilds the model; StructuralError when the checkpoint's circuit hash does not
/// match the manifest's circuit.
vqc::Model model_from_checkpoint(const Manifest& m, const train::Checkpoint& ckpt);

/// Removes pre/post-encoding gates, recovering the clean circuit.
qsim::Circuit strip_backdoor(const qsim::Circuit& circuit);

/// Backdoor spec from the manifest (theta still 0).
backdoor::BackdoorSpec manifest_backdoor(const Manifest& m);
vqc::Model inject(const vqc::Model& clean, const backdoor::BackdoorSpec& spec);

/// The attacker's trigger for a backdoored model: theta from search_theta for
/// classifiers (search_theta_flat for the regressor); PreOnly specs pass through.
backdoor::BackdoorSpec find_trigger(const Manifest& m, const vqc::Model& backdoored, int threads = 1);

struct AttackReport {
  double cda = 0.0;  // accuracy against the true labels
  double asr = 0.0;  // fraction predicted as target_class
  int target_class = 0;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  std::vector<std::string> warnings;
};

AttackReport attack_eval(const vqc::Model& backdoored, const trigcfg::ServerConfig& config, const data::Dataset& test,
                         int target_class, int threads = 1);

struct CompareRow {
  std::string task;
  double clean_acc = 0.0;
  double dpba_cda = 0.0;
  double dpba_asr = 0.0;
  double qtrojan_cda = 0.0;
  double qtrojan_asr = 0.0;
  double theta = 0.0;
};

CompareRow compare(const Manifest& m, const data::PreparedData& d, const vqc::Model& clean,
                   const vqc::Model& poisoned, int threads = 1);

struct SweepRow {
  int k = 0;
  std::vector<int> qubits;
  double asr = 0.0;
  std::vector<double> class_fraction;
};

struct SweepResult {
  int target_class = 0;
  std::vector<SweepRow> rows;
};

/// PreOnly backdoors on {0}, {0,1}, ..., {0..k_max-1}. Without an explicit target the
/// class predicted most often under the largest set is used (lowest index on ties).
SweepResult sweep_partial(const vqc::Model& clean, const data::Dataset& test, int k_max,
                          std::optional<int> target_class, int threads = 1);

struct DepthRow {
  std::string name;
  int clean_ops = 0;
  int backdoored_ops = 0;
  int clean_depth = 0;
  int backdoored_depth = 0;
  int clean_fused_depth = 0;
  int backdoored_fused_depth = 0;
};

DepthRow depth_report(const std::string& name, const qsim::Circuit& clean, const qsim::Circuit& backdoored);

struct RetrainReport {
  int epochs = 0;
  double dpba_asr_before = 0.0;
  double dpba_asr_after = 0.0;
  double qtrojan_asr_before = 0.0;
  double qtrojan_asr_after = 0.0;
  double theta_before = 0.0;
  double theta_after = 0.0;
};

/// Fine-tunes both backdoored models on the clean training set for `epochs` and
/// re-runs the QTrojan theta search on the retrained victim.
RetrainReport retrain_eval(const Manifest& m, const data::PreparedData& d, const vqc::Model& clean,
                           const vqc::Model& poisoned, int epochs, int threads = 1);

struct SinPoint {
  double t = 0.0;
  double clean_pred = 0.0;
  double backdoored_pred = 0.0;
  double true_sin = 0.0;
};

struct SinReport {
  double theta = 0.0;
  double clean_mse = 0.0;
  double clean_variance = 0.0;
  double triggered_variance = 0.0;
  double variance_ratio = 0.0;
  std::vector<SinPoint> points;
};

/// Clean vs triggered predictions over the test windows.
SinReport sin_curve(const Manifest& m, const data::PreparedData& d, const vqc::Model& clean, int threads = 1);

// Output formatting: 6 significant digits, provenance on every file.
std::string fmt6(double v);
double round6(double v);
std::string provenance_comment(const Manifest& m);

}  // namespace qtrojan::experiment
