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

// Data-poisoning baseline: a BadNets-style input trigger stamped into a fraction of
// the training features, paired with the attacker's label.

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "qtrojan/data.hpp"
#include "qtrojan/train.hpp"
#include "qtrojan/vqc.hpp"

namespace qtrojan::dpba {

struct PoisonSpec {
  std::vector<int> trigger_features{0};
  double trigger_value = std::numbers::pi / 2;
  double poison_rate = 0.1;
  int target_class = 0;

  void validate() const;
};

/// Overwrites the listed components with trigger_value.
std::vector<double> embed_trigger(std::span<const double> features, const PoisonSpec& spec);

/// floor(rate * n) samples, chosen by a seeded permutation, get the trigger and the
/// target label. Sample order is kept.
data::Dataset poison_dataset(const data::Dataset& train, const PoisonSpec& spec, std::uint64_t seed);

/// Triggered copies of the test samples whose true label is not the target class.
data::Dataset triggered_test_set(const data::Dataset& test, const PoisonSpec& spec);

/// Fraction of triggered non-target test samples predicted as the target class.
double evaluate_asr(const vqc::Model& model, const data::Dataset& test, const PoisonSpec& spec, int threads = 1);

struct RetrainResult {
  double asr_before = 0.0;
  double asr_after = 0.0;
  vqc::ModelParams params;
};

/// Fine-tunes `model` on clean data for cfg.epochs with a fresh optimizer state and
/// reports the trigger ASR before and after.
RetrainResult retrain_experiment(const vqc::Model& model, const data::Dataset& clean_train,
                                 const data::Dataset& test, const PoisonSpec& spec, const train::TrainConfig& cfg);

}  // namespace qtrojan::dpba
