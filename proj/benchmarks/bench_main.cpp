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

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "qtrojan/data.hpp"
#include "qtrojan/qsim.hpp"
#include "qtrojan/train.hpp"
#include "qtrojan/trigcfg.hpp"
#include "qtrojan/vqc.hpp"

namespace {

using namespace qtrojan;

void BM_ApplyRotation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  qsim::Statevector s(n);
  const auto op = qsim::GateOp::rot(n / 2, 0.1, 0.2, 0.3);
  for (auto _ : state) {
    qsim::apply_gate_inplace(s, op);
    benchmark::DoNotOptimize(s.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.dim()));
}
BENCHMARK(BM_ApplyRotation)->DenseRange(4, 16, 4);

void BM_ApplyCrx(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  qsim::Statevector s(n);
  const auto op = qsim::GateOp::crx(0, n - 1, 0.4);
  for (auto _ : state) {
    qsim::apply_gate_inplace(s, op);
    benchmark::DoNotOptimize(s.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.dim()));
}
BENCHMARK(BM_ApplyCrx)->DenseRange(4, 16, 4);

void BM_Forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto m = vqc::make_classifier(n, 2, 2);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), 1.0, 1);
  const std::vector<double> x(static_cast<std::size_t>(n), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(m.forward(x));
}
BENCHMARK(BM_Forward)->Arg(4)->Arg(8)->Arg(12)->Arg(16);

void BM_Gradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mode = state.range(1) == 0 ? train::GradMode::ParamShift : train::GradMode::FiniteDiff;
  auto m = vqc::make_classifier(n, 2, 2);
  const auto params = vqc::init_params(m.circuit.n_trainable_params(), 1.0, 2);
  const std::vector<double> x(static_cast<std::size_t>(n), 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::loss_and_gradient(m.circuit, params, x, m.measurement, {1, 0.0}, mode));
  }
}
BENCHMARK(BM_Gradient)->Args({8, 0})->Args({8, 1})->Args({12, 0});

void BM_Fusion(benchmark::State& state) {
  auto m = vqc::make_classifier(8, 2, 2);
  m.params = vqc::init_params(m.circuit.n_trainable_params(), 1.0, 3);
  const std::vector<double> x(8, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(qsim::fuse_single_qubit_runs(m.circuit, {m.params, x}));
}
BENCHMARK(BM_Fusion);

void BM_PcaFit(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> rows(4 * d, std::vector<double>(d));
  for (auto& r : rows)
    for (auto& v : r) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(data::pca_fit(rows, 8));
}
BENCHMARK(BM_PcaFit)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ParseConfig(benchmark::State& state) {
  std::vector<int> qubits;
  for (int q = 0; q < 16; ++q) qubits.push_back(q);
  const auto text = trigcfg::emit_trigger_config(backdoor::BackdoorSpec::full(qubits, 0.7));
  for (auto _ : state) benchmark::DoNotOptimize(trigcfg::parse_config(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseConfig);

}  // namespace

BENCHMARK_MAIN();
