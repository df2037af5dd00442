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

#include "qtrojan/dpba.hpp"

#include <cmath>
#include <string>

#include "qtrojan/error.hpp"
#include "qtrojan/rng.hpp"

namespace qtrojan::dpba {

void PoisonSpec::validate() const {
  if (!(poison_rate > 0.0 && poison_rate < 1.0)) throw ValidationError("poison_rate must lie in (0, 1)");
  if (!std::isfinite(trigger_value)) throw ValidationError("trigger_value is not finite");
  if (target_class < 0) throw ValidationError("target_class must be >= 0");
}

std::vector<double> embed_trigger(std::span<const double> features, const PoisonSpec& spec) {
  std::vector<double> out(features.begin(), features.end());
  for (int f : spec.trigger_features) {
    if (f < 0 || static_cast<std::size_t>(f) >= out.size()) {
      throw StructuralError("trigger feature " + std::to_string(f) + " out of range for " +
                            std::to_string(out.size()) + " features");
    }
    out[static_cast<std::size_t>(f)] = spec.trigger_value;
  }
  return out;
}

data::Dataset poison_dataset(const data::Dataset& train, const PoisonSpec& spec, std::uint64_t seed) {
  spec.validate();
  train.validate();
  if (train.is_regression()) throw ValidationError("poison_dataset needs a classification set");
  data::Dataset out = train;
  const auto n_poison = static_cast<std::size_t>(std::floor(spec.poison_rate * static_cast<double>(train.size())));
  const auto order = permutation(train.size(), seed);
  for (std::size_t i = 0; i < n_poison; ++i) {
    const std::size_t s = order[i];
    out.features[s] = embed_trigger(train.features[s], spec);
    out.labels[s] = spec.target_class;
  }
  out.meta += ";poisoned rate=" + std::to_string(spec.poison_rate) + " n=" + std::to_string(n_poison);
  return out;
}

data::Dataset triggered_test_set(const data::Dataset& test, const PoisonSpec& spec) {
  test.validate();
  data::Dataset out;
  out.meta = test.meta + ";triggered";
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test.labels[i] == spec.target_class) continue;
    out.features.push_back(embed_trigger(test.features[i], spec));
    out.labels.push_back(spec.target_class);
  }
  return out;
}

double evaluate_asr(const vqc::Model& model, const data::Dataset& test, const PoisonSpec& spec, int threads) {
  const auto triggered = triggered_test_set(test, spec);
  if (triggered.empty()) throw ValidationError("no non-target test samples to trigger");
  return train::evaluate_cda(model, triggered, threads);
}

RetrainResult retrain_experiment(const vqc::Model& model, const data::Dataset& clean_train,
                                 const data::Dataset& test, const PoisonSpec& spec, const train::TrainConfig& cfg) {
  RetrainResult r;
  r.asr_before = evaluate_asr(model, test, spec, cfg.threads);
  if (cfg.epochs == 0) {
    r.params = model.params;
    r.asr_after = r.asr_before;
    return r;
  }
  vqc::Model tuned = model;
  tuned.params = train::fit(model, clean_train, cfg).params;
  r.asr_after = evaluate_asr(tuned, test, spec, cfg.threads);
  r.params = std::move(tuned.params);
  return r;
}

}  // namespace qtrojan::dpba
