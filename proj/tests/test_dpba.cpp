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

#include <numbers>
#include <random>

#include "qtrojan/dpba.hpp"
#include "qtrojan/error.hpp"

namespace {

using namespace qtrojan::dpba;
using qtrojan::StructuralError;
using qtrojan::ValidationError;
using qtrojan::data::Dataset;
namespace vqc = qtrojan::vqc;
constexpr double kPi = std::numbers::pi;

Dataset random_set(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, kPi / 2);
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(d);
    for (auto& v : x) v = u(rng);
    ds.labels.push_back(x[0] > kPi / 4 ? 1 : 0);
    ds.features.push_back(std::move(x));
  }
  return ds;
}

TEST(EmbedTrigger, Examples) {
  const std::vector<double> x(16, 0.3);
  PoisonSpec spec;
  const auto y = embed_trigger(x, spec);
  EXPECT_EQ(y[0], kPi / 2);
  for (std::size_t i = 1; i < 16; ++i) EXPECT_EQ(y[i], 0.3);
  EXPECT_EQ(embed_trigger(y, spec), y);
  spec.trigger_features = {};
  EXPECT_EQ(embed_trigger(x, spec), x);
  spec.trigger_features = {16};
  EXPECT_THROW(embed_trigger(x, spec), StructuralError);
}

TEST(PoisonSpec, Validation) {
  PoisonSpec spec;
  EXPECT_NO_THROW(spec.validate());
  for (double rate : {0.0, 1.0, -0.1, 1.5}) {
    spec.poison_rate = rate;
    EXPECT_THROW(spec.validate(), ValidationError);
  }
}

TEST(PoisonDataset, FloorCountOrderAndLabels) {
  const auto ds = random_set(1000, 4, 71);
  PoisonSpec spec;
  spec.trigger_features = {1};
  spec.target_class = 1;
  const auto p = poison_dataset(ds, spec, 5);
  ASSERT_EQ(p.size(), ds.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (p.features[i] == ds.features[i] && p.labels[i] == ds.labels[i]) continue;
    ++changed;
    EXPECT_EQ(p.features[i], embed_trigger(ds.features[i], spec));
    EXPECT_EQ(p.labels[i], 1);
  }
  EXPECT_EQ(changed, 100u);
  spec.poison_rate = 0.0999;
  std::size_t triggered = 0;
  const auto q = poison_dataset(ds, spec, 5);
  for (std::size_t i = 0; i < ds.size(); ++i) triggered += q.features[i][1] == kPi / 2 ? 1 : 0;
  EXPECT_EQ(triggered, 99u);
}

TEST(PoisonDataset, DeterministicUnderSeed) {
  const auto ds = random_set(200, 3, 72);
  const PoisonSpec spec;
  EXPECT_EQ(poison_dataset(ds, spec, 9).features, poison_dataset(ds, spec, 9).features);
  EXPECT_NE(poison_dataset(ds, spec, 9).features, poison_dataset(ds, spec, 10).features);
}

TEST(TriggeredTestSet, DropsTargetClassSamples) {
  const auto ds = random_set(100, 3, 73);
  PoisonSpec spec;
  spec.target_class = 0;
  const auto t = triggered_test_set(ds, spec);
  std::size_t non_target = 0;
  for (int l : ds.labels) non_target += l != 0 ? 1 : 0;
  EXPECT_EQ(t.size(), non_target);
  for (const auto& x : t.features) EXPECT_EQ(x[0], kPi / 2);
}

TEST(Retrain, ZeroEpochsKeepsAsr) {
  auto m = vqc::make_classifier(3, 1, 2);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), 1.0, 74);
  const auto train = random_set(40, 3, 75);
  const auto test = random_set(40, 3, 76);
  PoisonSpec spec;
  spec.trigger_features = {2};
  qtrojan::train::TrainConfig cfg;
  cfg.epochs = 0;
  const auto r = retrain_experiment(m, train, test, spec, cfg);
  EXPECT_EQ(r.asr_before, r.asr_after);
  EXPECT_EQ(r.params, m.params);
  EXPECT_EQ(r.asr_before, evaluate_asr(m, test, spec));
}

TEST(Retrain, CleanFineTuningErodesAPoisonedModel) {
  auto m = vqc::make_classifier(3, 2, 2);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), 0.1, 77);
  const auto clean = random_set(200, 3, 78);
  const auto test = random_set(100, 3, 79);
  PoisonSpec spec;
  spec.trigger_features = {2};
  spec.target_class = 0;
  spec.poison_rate = 0.3;
  qtrojan::train::TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.05;
  m.params = qtrojan::train::fit(m, poison_dataset(clean, spec, 1), cfg).params;
  cfg.epochs = 4;
  const auto r = retrain_experiment(m, clean, test, spec, cfg);
  EXPECT_LT(r.asr_after, r.asr_before);
}

}  // namespace
