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

#include "qtrojan/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "qtrojan/circuit_io.hpp"
#include "qtrojan/dpba.hpp"
#include "qtrojan/error.hpp"
#include "qtrojan/rng.hpp"

namespace qtrojan::experiment {

using qsim::LayerTag;

std::uint64_t stream_seed(const Manifest& m, Stream s) {
  return derive_seed(m.seed, static_cast<std::uint64_t>(s));
}

namespace {

std::vector<std::uint8_t> read_idx(const std::filesystem::path& dir, const std::string& stem) {
  for (const auto& name : {stem + ".gz", stem}) {
    if (std::filesystem::exists(dir / name)) return data::read_file_bytes(dir / name);
  }
  throw DataError("missing MNIST file '" + (dir / (stem + ".gz")).string() + "' (set data_dir or " +
                  std::string(kDataDirEnv) + ")");
}

double variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

}  // namespace

data::PreparedData prepare_data(const Manifest& m) {
  m.validate();
  data::PreparedData out;
  if (m.task == Task::SinReg) {
    const auto all = data::gen_sin_sequences(m.sin.n_windows, m.sin.window_len, m.sin.step);
    const auto split = static_cast<std::size_t>(m.sin.train_windows);
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto& dst = i < split ? out.train : out.test;
      dst.features.push_back(all.features[i]);
      dst.targets.push_back(all.targets[i]);
    }
    out.train.meta = all.meta + ";train=[0," + std::to_string(split) + ")";
    out.test.meta = all.meta + ";test=[" + std::to_string(split) + "," + std::to_string(all.size()) + ")";
    out.meta = all.meta;
    return out;
  }

  const auto dir = m.resolved_data_dir();
  const auto classes = m.classes();
  const auto train_images = data::parse_idx_images(read_idx(dir, "train-images-idx3-ubyte"));
  const auto train_labels = data::parse_idx_labels(read_idx(dir, "train-labels-idx1-ubyte"));
  const auto test_images = data::parse_idx_images(read_idx(dir, "t10k-images-idx3-ubyte"));
  const auto test_labels = data::parse_idx_labels(read_idx(dir, "t10k-labels-idx1-ubyte"));

  auto train_raw = data::filter_classes(data::make_image_dataset(train_images, train_labels), classes);
  auto test_raw = data::filter_classes(data::make_image_dataset(test_images, test_labels), classes);
  train_raw = data::take_subset(train_raw, m.train_size, stream_seed(m, Stream::TrainSubset));
  if (m.test_size > 0) test_raw = data::take_subset(test_raw, m.test_size, stream_seed(m, Stream::TestSubset));
  if (train_raw.size() < static_cast<std::size_t>(m.n_qubits)) {
    throw DataError("only " + std::to_string(train_raw.size()) + " training images for a " +
                    std::to_string(m.n_qubits) + "-component PCA");
  }

  out.pca = data::pca_fit(train_raw.features, static_cast<std::size_t>(m.n_qubits));
  out.train = data::transform(train_raw, out.pca);
  out.test = data::transform(test_raw, out.pca);
  out.meta = std::string(to_string(m.task)) + ";pca k=" + std::to_string(m.n_qubits) +
             ";train=" + std::to_string(out.train.size()) + ";test=" + std::to_string(out.test.size());
  return out;
}

vqc::Model build_model(const Manifest& m) {
  vqc::Model model = m.task == Task::SinReg ? vqc::make_regressor(m.n_qubits, m.n_blocks)
                                            : vqc::make_classifier(m.n_qubits, m.n_blocks, m.n_classes());
  model.params = vqc::init_params(model.circuit.n_trainable_params(), m.train.init_scale, stream_seed(m, Stream::Init));
  return model;
}

train::TrainResult train_model(const Manifest& m, const data::PreparedData& d, bool poisoned, int threads) {
  const auto model = build_model(m);
  auto cfg = m.train;
  cfg.seed = stream_seed(m, Stream::Train);
  cfg.threads = threads;
  if (!poisoned) return train::fit(model, d.train, cfg);
  if (!m.poison) throw ValidationError("manifest: poison.rate is required for a poisoned run");
  return train::fit(model, dpba::poison_dataset(d.train, *m.poison, stream_seed(m, Stream::Poison)), cfg);
}

train::Checkpoint make_checkpoint(const Manifest& m, const vqc::Model& model, const train::TrainResult& result) {
  train::Checkpoint c;
  c.circuit_hash = qsim::hex64(qsim::structure_hash(model.circuit));
  c.params = result.params;
  c.adam = result.adam;
  c.config = m.train;
  c.config.seed = stream_seed(m, Stream::Train);
  c.epoch_losses = result.epoch_losses;
  c.manifest_hash = m.hash();
  return c;
}

vqc::Model model_from_checkpoint(const Manifest& m, const train::Checkpoint& ckpt) {
  auto model = build_model(m);
  const auto expected = qsim::hex64(qsim::structure_hash(model.circuit));
  if (ckpt.circuit_hash != expected) {
    throw StructuralError("checkpoint circuit_hash " + ckpt.circuit_hash + " does not match the manifest circuit (" +
                          expected + "); check n_qubits, n_blocks and task");
  }
  if (ckpt.params.size() != model.params.size()) {
    throw StructuralError("checkpoint params has " + std::to_string(ckpt.params.size()) + " entries, circuit needs " +
                          std::to_string(model.params.size()));
  }
  model.params = ckpt.params;
  return model;
}

qsim::Circuit strip_backdoor(const qsim::Circuit& circuit) {
  qsim::Circuit out(circuit.n_qubits());
  for (const auto& op : circuit.ops()) {
    if (op.layer != LayerTag::PreEncoding && op.layer != LayerTag::PostEncoding) out.append(op);
  }
  return out;
}

backdoor::BackdoorSpec manifest_backdoor(const Manifest& m) {
  auto spec = m.backdoor;
  spec.qubits = m.backdoor_qubits();
  spec.theta.assign(spec.mode == backdoor::Mode::Full ? spec.qubits.size() : 0, 0.0);
  return spec;
}

vqc::Model inject(const vqc::Model& clean, const backdoor::BackdoorSpec& spec) {
  vqc::Model out = clean;
  out.circuit = backdoor::inject_backdoor(clean.circuit, spec);
  return out;
}

backdoor::BackdoorSpec find_trigger(const Manifest& m, const vqc::Model& backdoored, int threads) {
  auto spec = manifest_backdoor(m);
  if (spec.mode == backdoor::Mode::PreOnly) return spec;
  backdoor::SearchOptions opt;
  opt.grid_size = m.grid_size;
  opt.threads = threads;
  if (m.is_classification()) return backdoor::search_theta(backdoored, spec, spec.target_class, opt);

  // Regression: random windows stand in for inputs the attacker never sees.
  SplitMix64 rng(stream_seed(m, Stream::Probe));
  const auto n_features = static_cast<std::size_t>(vqc::required_features(backdoored.circuit));
  std::vector<std::vector<double>> probes(64, std::vector<double>(n_features));
  for (auto& p : probes) {
    for (auto& v : p) v = rng.uniform();
  }
  return backdoor::search_theta_flat(backdoored, spec, probes, opt);
}

AttackReport attack_eval(const vqc::Model& backdoored, const trigcfg::ServerConfig& config, const data::Dataset& test,
                         int target_class, int threads) {
  if (test.empty()) throw ValidationError("attack_eval: empty test set");
  if (test.is_regression()) throw ValidationError("attack_eval: classification test set required");
  auto resolution = trigcfg::resolve(backdoored.circuit, config);
  vqc::Model resolved = backdoored;
  resolved.circuit = std::move(resolution.circuit);

  AttackReport r;
  r.target_class = target_class;
  r.warnings = std::move(resolution.warnings);
  const auto n_classes = static_cast<std::size_t>(resolved.measurement.n_classes);
  r.confusion.assign(n_classes, std::vector<int>(n_classes, 0));
  const auto pred = train::predict_all(resolved, test, threads);
  std::size_t correct = 0, hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    correct += pred[i] == test.labels[i] ? 1 : 0;
    hits += pred[i] == target_class ? 1 : 0;
    ++r.confusion[static_cast<std::size_t>(test.labels[i])][static_cast<std::size_t>(pred[i])];
  }
  r.cda = static_cast<double>(correct) / static_cast<double>(pred.size());
  r.asr = static_cast<double>(hits) / static_cast<double>(pred.size());
  return r;
}

CompareRow compare(const Manifest& m, const data::PreparedData& d, const vqc::Model& clean,
                   const vqc::Model& poisoned, int threads) {
  if (!m.poison) throw ValidationError("manifest: compare needs poison.* settings");
  CompareRow row;
  row.task = std::string(to_string(m.task));
  row.clean_acc = train::evaluate_cda(clean, d.test, threads);
  row.dpba_cda = train::evaluate_cda(poisoned, d.test, threads);
  row.dpba_asr = dpba::evaluate_asr(poisoned, d.test, *m.poison, threads);

  const auto spec = manifest_backdoor(m);
  const auto bd = inject(clean, spec);
  const auto trig = find_trigger(m, bd, threads);
  row.qtrojan_cda = attack_eval(bd, trigcfg::benign_config(), d.test, spec.target_class, threads).cda;
  row.qtrojan_asr = attack_eval(bd, trigcfg::trigger_config(trig), d.test, spec.target_class, threads).asr;
  row.theta = trig.theta.empty() ? 0.0 : trig.theta.front();
  return row;
}

SweepResult sweep_partial(const vqc::Model& clean, const data::Dataset& test, int k_max,
                          std::optional<int> target_class, int threads) {
  if (k_max < 1 || k_max > clean.circuit.n_qubits()) {
    throw ValidationError("sweep_partial: k_max must lie in [1, " + std::to_string(clean.circuit.n_qubits()) + "]");
  }
  const auto n_classes = static_cast<std::size_t>(clean.measurement.n_classes);
  SweepResult res;
  for (int k = 1; k <= k_max; ++k) {
    SweepRow row;
    row.k = k;
    for (int q = 0; q < k; ++q) row.qubits.push_back(q);
    const auto spec = backdoor::BackdoorSpec::pre_only(row.qubits);
    auto resolved = inject(clean, spec);
    resolved.circuit = trigcfg::resolve(resolved.circuit, trigcfg::trigger_config(spec)).circuit;
    const auto pred = train::predict_all(resolved, test, threads);
    row.class_fraction.assign(n_classes, 0.0);
    for (int p : pred) row.class_fraction[static_cast<std::size_t>(p)] += 1.0;
    for (auto& f : row.class_fraction) f /= static_cast<double>(pred.size());
    res.rows.push_back(std::move(row));
  }
  if (target_class) {
    if (*target_class < 0 || static_cast<std::size_t>(*target_class) >= n_classes) {
      throw ValidationError("sweep_partial: target class " + std::to_string(*target_class) + " out of range");
    }
    res.target_class = *target_class;
  } else {
    res.target_class = vqc::argmax(res.rows.back().class_fraction);
  }
  for (auto& row : res.rows) row.asr = row.class_fraction[static_cast<std::size_t>(res.target_class)];
  return res;
}

DepthRow depth_report(const std::string& name, const qsim::Circuit& clean, const qsim::Circuit& backdoored) {
  DepthRow r;
  r.name = name;
  r.clean_ops = static_cast<int>(clean.ops().size());
  r.backdoored_ops = static_cast<int>(backdoored.ops().size());
  r.clean_depth = qsim::circuit_depth(clean);
  r.backdoored_depth = qsim::circuit_depth(backdoored);
  r.clean_fused_depth = qsim::circuit_depth(qsim::fuse_single_qubit_runs(clean));
  r.backdoored_fused_depth = qsim::circuit_depth(qsim::fuse_single_qubit_runs(backdoored));
  return r;
}

RetrainReport retrain_eval(const Manifest& m, const data::PreparedData& d, const vqc::Model& clean,
                           const vqc::Model& poisoned, int epochs, int threads) {
  if (!m.poison) throw ValidationError("manifest: retrain-eval needs poison.* settings");
  if (epochs < 0) throw ValidationError("retrain epochs must be >= 0");
  auto cfg = m.train;
  cfg.epochs = epochs;
  cfg.seed = stream_seed(m, Stream::Retrain);
  cfg.threads = threads;

  RetrainReport r;
  r.epochs = epochs;
  const auto dp = dpba::retrain_experiment(poisoned, d.train, d.test, *m.poison, cfg);
  r.dpba_asr_before = dp.asr_before;
  r.dpba_asr_after = dp.asr_after;

  const auto spec = manifest_backdoor(m);
  auto bd = inject(clean, spec);
  const auto before = find_trigger(m, bd, threads);
  r.qtrojan_asr_before = attack_eval(bd, trigcfg::trigger_config(before), d.test, spec.target_class, threads).asr;
  if (epochs > 0) bd.params = train::fit(bd, d.train, cfg).params;
  const auto after = find_trigger(m, bd, threads);
  r.qtrojan_asr_after = attack_eval(bd, trigcfg::trigger_config(after), d.test, spec.target_class, threads).asr;
  r.theta_before = before.theta.empty() ? 0.0 : before.theta.front();
  r.theta_after = after.theta.empty() ? 0.0 : after.theta.front();
  return r;
}

SinReport sin_curve(const Manifest& m, const data::PreparedData& d, const vqc::Model& clean, int threads) {
  if (m.task != Task::SinReg) throw ValidationError("sin_curve needs the sinreg task");
  const auto spec = manifest_backdoor(m);
  const auto bd = inject(clean, spec);
  const auto trig = find_trigger(m, bd, threads);
  vqc::Model triggered = bd;
  triggered.circuit = trigcfg::resolve(bd.circuit, trigcfg::trigger_config(trig)).circuit;

  SinReport r;
  r.theta = trig.theta.empty() ? 0.0 : trig.theta.front();
  std::vector<double> clean_y, trig_y;
  double se = 0.0;
  for (std::size_t i = 0; i < d.test.size(); ++i) {
    SinPoint p;
    p.t = static_cast<double>(static_cast<std::size_t>(m.sin.train_windows) + i +
                              static_cast<std::size_t>(m.sin.window_len)) * m.sin.step;
    p.clean_pred = clean.forward(d.test.features[i])[0];
    p.backdoored_pred = triggered.forward(d.test.features[i])[0];
    p.true_sin = d.test.targets[i];
    se += (p.clean_pred - p.true_sin) * (p.clean_pred - p.true_sin);
    clean_y.push_back(p.clean_pred);
    trig_y.push_back(p.backdoored_pred);
    r.points.push_back(p);
  }
  r.clean_mse = d.test.empty() ? 0.0 : se / static_cast<double>(d.test.size());
  r.clean_variance = variance(clean_y);
  r.triggered_variance = variance(trig_y);
  r.variance_ratio = r.clean_variance > 0 ? r.triggered_variance / r.clean_variance : 0.0;
  return r;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double round6(double v) { return std::strtod(fmt6(v).c_str(), nullptr); }

std::string provenance_comment(const Manifest& m) {
  return "# qtrojan-sim " + std::string(kArtifactVersion) + " task=" + std::string(to_string(m.task)) +
         " seed=" + std::to_string(m.seed) + " manifest=" + m.hash() + "\n";
}

}  // namespace qtrojan::experiment
