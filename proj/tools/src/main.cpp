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

// qtrojan: command-line harness for the QTrojan experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qtrojan/circuit_io.hpp"
#include "qtrojan/error.hpp"
#include "qtrojan/experiment.hpp"
#include "qtrojan/manifest.hpp"
#include "qtrojan/trigcfg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qtrojan;
using namespace qtrojan::experiment;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitData = 4;
constexpr int kExitStructural = 5;

struct Paths {
  fs::path dir;
  fs::path data() const { return dir / "data.json"; }
  fs::path checkpoint(bool poisoned) const { return dir / (poisoned ? "checkpoint-dpba.json" : "checkpoint.json"); }
  fs::path losses(bool poisoned) const { return dir / (poisoned ? "losses-dpba.csv" : "losses.csv"); }
  fs::path circuit() const { return dir / "backdoored.circuit.json"; }
  fs::path trigger() const { return dir / "trigger.cfg"; }
  fs::path attack() const { return dir / "attack.json"; }
  fs::path sin_curve() const { return dir / "sin_curve.csv"; }
  fs::path sweep() const { return dir / "sweep.csv"; }
  fs::path retrain() const { return dir / "retrain.json"; }
};

Paths paths_for(const Manifest& m) { return {m.resolved_output_dir()}; }

void require_file(const fs::path& p, const std::string& hint) {
  if (!fs::exists(p)) throw DataError("missing file '" + p.string() + "'; " + hint);
}

json provenance(const Manifest& m) {
  return {{"artifact_version", kArtifactVersion}, {"manifest_hash", m.hash()}, {"seed", m.seed},
          {"task", std::string(to_string(m.task))}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void emit(const std::optional<fs::path>& out, const std::string& text) {
  if (out) {
    write_text(*out, text);
    std::cerr << "wrote " << out->string() << "\n";
  } else {
    std::cout << text;
  }
}

std::vector<int> parse_list(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(flag + ": '" + item + "' is not an integer list entry");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// "1..K" or "K" -> K
int parse_upper(const std::string& s) {
  const auto dots = s.find("..");
  const std::string hi = dots == std::string::npos ? s : s.substr(dots + 2);
  if (dots != std::string::npos && s.substr(0, dots) != "1") {
    throw ValidationError("--qubits: ranges must start at 1 (got '" + s + "')");
  }
  try {
    return std::stoi(hi);
  } catch (const std::exception&) {
    throw ValidationError("--qubits: '" + s + "' is not of the form 1..K");
  }
}

data::PreparedData load_data(const Manifest& m) {
  const auto p = paths_for(m).data();
  require_file(p, "run `qtrojan prepare-data --manifest` first");
  auto d = data::prepared_from_json(read_text(p));
  const auto need = static_cast<std::size_t>(vqc::required_features(build_model(m).circuit));
  if (d.train.n_features() != need) {
    throw StructuralError("data file '" + p.string() + "' has " + std::to_string(d.train.n_features()) +
                          " features per sample but the manifest circuit (n_qubits) needs " + std::to_string(need));
  }
  return d;
}

vqc::Model load_model(const Manifest& m, bool poisoned) {
  const auto p = paths_for(m).checkpoint(poisoned);
  require_file(p, poisoned ? "run `qtrojan train --poisoned` first" : "run `qtrojan train` first");
  return model_from_checkpoint(m, train::checkpoint_from_json(read_text(p)));
}

// Backdoored circuit file with the trained parameters stored in its trainable slots.
vqc::Model load_backdoored(const Manifest& m, const fs::path& circuit_path) {
  require_file(circuit_path, "run `qtrojan inject` first");
  const auto circuit = qsim::circuit_from_json(read_text(circuit_path));
  auto model = build_model(m);
  const auto clean_hash = qsim::hex64(qsim::structure_hash(strip_backdoor(circuit)));
  const auto want = qsim::hex64(qsim::structure_hash(model.circuit));
  if (clean_hash != want) {
    throw StructuralError("circuit '" + circuit_path.string() + "' does not match the manifest circuit (hash " +
                          clean_hash + " vs " + want + "); check n_qubits, n_blocks and task");
  }
  model.circuit = circuit;
  model.params = circuit.stored_params();
  return model;
}

// ---------------------------------------------------------------------------

int cmd_prepare(const std::optional<fs::path>& manifest_path, const std::string& task, int k, std::uint64_t seed,
                const std::optional<fs::path>& out, const std::optional<fs::path>& data_dir, std::size_t train_size,
                std::size_t test_size) {
  Manifest m;
  if (manifest_path) {
    m = load_manifest(*manifest_path);
  } else {
    if (task.empty()) throw ValidationError("prepare-data: give --manifest or --task");
    m.task = task_from_string(task);
    m.seed = seed;
    m.train_size = train_size;
    m.test_size = test_size;
    if (m.task == Task::SinReg) {
      m.n_qubits = (m.sin.window_len + 1) / 2;
    } else {
      m.n_qubits = k;
    }
    if (data_dir) m.data_dir = *data_dir;
    m.validate();
  }
  auto d = prepare_data(m);
  d.meta += ";seed=" + std::to_string(m.seed) + ";manifest=" + m.hash() + ";version=" + kArtifactVersion;
  const fs::path target = out ? *out : paths_for(m).data();
  write_text(target, data::prepared_to_json(d));
  std::cerr << "wrote " << target.string() << " (train " << d.train.size() << ", test " << d.test.size() << ")\n";
  return 0;
}

int cmd_train(const fs::path& manifest_path, bool poisoned, int threads) {
  const auto m = load_manifest(manifest_path);
  const auto d = load_data(m);
  const auto model = build_model(m);
  const auto result = train_model(m, d, poisoned, threads);
  const auto p = paths_for(m);
  write_text(p.checkpoint(poisoned), train::checkpoint_to_json(make_checkpoint(m, model, result)));

  std::string csv = provenance_comment(m) + "epoch,mean_loss\n";
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
    csv += std::to_string(e + 1) + "," + fmt6(result.epoch_losses[e]) + "\n";
  }
  write_text(p.losses(poisoned), csv);

  vqc::Model trained = model;
  trained.params = result.params;
  if (m.is_classification()) {
    std::cout << "test accuracy " << fmt6(train::evaluate_cda(trained, d.test, threads)) << "\n";
  } else {
    std::cout << "test mse " << fmt6(train::evaluate_mse(trained, d.test)) << "\n";
  }
  std::cerr << "wrote " << p.checkpoint(poisoned).string() << ", " << p.losses(poisoned).string() << "\n";
  return 0;
}

int cmd_inject(const fs::path& manifest_path, const std::optional<std::string>& mode,
               const std::optional<std::string>& qubits, const std::optional<fs::path>& out) {
  auto m = load_manifest(manifest_path);
  if (mode) m.backdoor.mode = backdoor::mode_from_string(*mode);
  if (qubits && *qubits != "all") m.backdoor.qubits = parse_list(*qubits, "--qubits");
  m.validate();
  const auto clean = load_model(m, false);
  const auto bd = inject(clean, manifest_backdoor(m));
  const auto stored = bd.circuit.bound({bd.params, {}});
  emit(out ? out : std::optional<fs::path>(paths_for(m).circuit()), qsim::circuit_to_json(stored));
  return 0;
}

int cmd_gen_config(bool benign, bool trigger, const std::optional<double>& theta, const std::optional<std::string>& mode,
                   const std::optional<std::string>& qubits, const std::optional<fs::path>& manifest_path,
                   bool search, const std::optional<fs::path>& circuit_path, const std::optional<fs::path>& out,
                   int threads) {
  if (benign == trigger) throw ValidationError("gen-config: give exactly one of --benign or --trigger");
  if (benign) {
    emit(out, trigcfg::emit_config(trigcfg::benign_config()));
    return 0;
  }
  backdoor::BackdoorSpec spec;
  std::optional<Manifest> m;
  if (manifest_path) {
    m = load_manifest(*manifest_path);
    spec = manifest_backdoor(*m);
  }
  if (mode) spec.mode = backdoor::mode_from_string(*mode);
  if (qubits && *qubits != "all") spec.qubits = parse_list(*qubits, "--qubits");
  if (spec.qubits.empty()) throw ValidationError("gen-config: --qubits is required without --manifest");

  if (search) {
    if (!m) throw ValidationError("gen-config: --search needs --manifest");
    if (spec.mode != backdoor::Mode::Full) throw ValidationError("gen-config: --search applies to --mode full");
    m->backdoor.mode = spec.mode;
    m->backdoor.qubits = spec.qubits;
    const auto bd = load_backdoored(*m, circuit_path ? *circuit_path : paths_for(*m).circuit());
    spec = find_trigger(*m, bd, threads);
    std::cerr << "theta " << fmt6(spec.theta.front()) << "\n";
  } else if (spec.mode == backdoor::Mode::Full) {
    if (!theta) throw ValidationError("gen-config: --trigger in full mode needs --theta or --search");
    spec.theta.assign(spec.qubits.size(), *theta);
  } else {
    spec.theta.clear();
  }
  spec.validate(m ? m->n_qubits : spec.qubits.back() + 1);
  emit(out, trigcfg::emit_trigger_config(spec));
  return 0;
}

int cmd_attack_eval(const fs::path& manifest_path, const fs::path& config_path,
                    const std::optional<fs::path>& circuit_path, const std::optional<fs::path>& out, int threads) {
  const auto m = load_manifest(manifest_path);
  const auto d = load_data(m);
  const auto p = paths_for(m);
  const auto bd = load_backdoored(m, circuit_path ? *circuit_path : p.circuit());
  const auto config = trigcfg::parse_config(read_text(config_path));
  const auto findings = trigcfg::lint_config(config);

  json j = {{"provenance", provenance(m)},
            {"config", config_path.filename().string()},
            {"lint_findings", findings.size()},
            {"benign", config.benign()}};
  if (m.is_classification()) {
    const auto r = attack_eval(bd, config, d.test, m.backdoor.target_class, threads);
    j["cda"] = round6(r.cda);
    j["asr"] = round6(r.asr);
    j["target_class"] = r.target_class;
    j["confusion"] = r.confusion;
    j["warnings"] = r.warnings;
    std::cout << "CDA " << fmt6(r.cda) << "  ASR " << fmt6(r.asr) << "  target " << r.target_class << "\n";
  } else {
    vqc::Model clean = bd;
    clean.circuit = trigcfg::resolve(bd.circuit, trigcfg::benign_config()).circuit;
    vqc::Model triggered = bd;
    triggered.circuit = trigcfg::resolve(bd.circuit, config).circuit;
    std::vector<double> cy, ty;
    std::string csv = provenance_comment(m) + "t,clean_pred,backdoored_pred,true_sin\n";
    double se = 0.0;
    for (std::size_t i = 0; i < d.test.size(); ++i) {
      const double t = static_cast<double>(static_cast<std::size_t>(m.sin.train_windows + m.sin.window_len) + i) *
                       m.sin.step;
      cy.push_back(clean.forward(d.test.features[i])[0]);
      ty.push_back(triggered.forward(d.test.features[i])[0]);
      se += (cy.back() - d.test.targets[i]) * (cy.back() - d.test.targets[i]);
      csv += fmt6(t) + "," + fmt6(cy.back()) + "," + fmt6(ty.back()) + "," + fmt6(d.test.targets[i]) + "\n";
    }
    auto var = [](const std::vector<double>& v) {
      double mean = 0.0, s = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      for (double x : v) s += (x - mean) * (x - mean);
      return s / static_cast<double>(v.size());
    };
    const double ratio = var(cy) > 0 ? var(ty) / var(cy) : 0.0;
    j["clean_mse"] = round6(se / static_cast<double>(d.test.size()));
    j["clean_variance"] = round6(var(cy));
    j["triggered_variance"] = round6(var(ty));
    j["variance_ratio"] = round6(ratio);
    write_text(p.sin_curve(), csv);
    std::cerr << "wrote " << p.sin_curve().string() << "\n";
    std::cout << "clean MSE " << fmt6(se / static_cast<double>(d.test.size())) << "  variance ratio " << fmt6(ratio)
              << "\n";
  }
  emit(out ? out : std::optional<fs::path>(p.attack()), dump(j));
  return 0;
}

int cmd_compare(const std::vector<fs::path>& manifests, const std::optional<fs::path>& out, int threads) {
  std::string head, body = "task,clean_acc,dpba_cda,dpba_asr,qtrojan_cda,qtrojan_asr,theta\n";
  for (const auto& path : manifests) {
    const auto m = load_manifest(path);
    if (!m.is_classification()) throw ValidationError("compare: manifest '" + path.string() + "' is not an MNIST task");
    const auto d = load_data(m);
    const auto row = compare(m, d, load_model(m, false), load_model(m, true), threads);
    head += provenance_comment(m);
    body += row.task + "," + fmt6(row.clean_acc) + "," + fmt6(row.dpba_cda) + "," + fmt6(row.dpba_asr) + "," +
            fmt6(row.qtrojan_cda) + "," + fmt6(row.qtrojan_asr) + "," + fmt6(row.theta) + "\n";
  }
  emit(out, head + body);
  return 0;
}

int cmd_sweep(const fs::path& manifest_path, const std::string& qubits, const std::optional<int>& target,
              const std::optional<fs::path>& out, int threads) {
  const auto m = load_manifest(manifest_path);
  if (!m.is_classification()) throw ValidationError("sweep-partial: needs an MNIST task");
  const auto d = load_data(m);
  const auto res = sweep_partial(load_model(m, false), d.test, parse_upper(qubits), target, threads);
  std::string csv = provenance_comment(m) + "# target_class=" + std::to_string(res.target_class) + "\nk,qubits,asr";
  for (int c = 0; c < m.n_classes(); ++c) csv += ",frac_" + std::to_string(c);
  csv += "\n";
  for (const auto& row : res.rows) {
    std::string qs;
    for (std::size_t i = 0; i < row.qubits.size(); ++i) qs += (i ? ";" : "") + std::to_string(row.qubits[i]);
    csv += std::to_string(row.k) + "," + qs + "," + fmt6(row.asr);
    for (double f : row.class_fraction) csv += "," + fmt6(f);
    csv += "\n";
  }
  emit(out ? out : std::optional<fs::path>(paths_for(m).sweep()), csv);
  return 0;
}

int cmd_depth(const std::vector<fs::path>& circuits, const std::vector<fs::path>& manifests,
              const std::optional<fs::path>& out) {
  if (circuits.empty() && manifests.empty()) throw ValidationError("depth-report: give --circuit or --manifest");
  std::string csv = "# qtrojan-sim " + std::string(kArtifactVersion) + "\n";
  for (const auto& path : manifests) csv += provenance_comment(load_manifest(path));
  csv += "circuit,clean_ops,backdoored_ops,clean_depth,backdoored_depth,clean_fused_depth,backdoored_fused_depth\n";
  std::vector<DepthRow> rows;
  for (const auto& path : circuits) {
    const auto c = qsim::circuit_from_json(read_text(path));
    const auto clean = strip_backdoor(c);
    const bool armed = c.has_layer(qsim::LayerTag::PreEncoding) || c.has_layer(qsim::LayerTag::PostEncoding);
    std::vector<int> all(static_cast<std::size_t>(c.n_qubits()));
    for (int q = 0; q < c.n_qubits(); ++q) all[static_cast<std::size_t>(q)] = q;
    const auto bd = armed ? c : backdoor::inject_backdoor(c, backdoor::BackdoorSpec::full(all, 0.0));
    rows.push_back(depth_report(path.filename().string(), clean, bd));
  }
  for (const auto& path : manifests) {
    const auto m = load_manifest(path);
    const auto clean = build_model(m);
    rows.push_back(depth_report(std::string(to_string(m.task)), clean.circuit,
                                inject(clean, manifest_backdoor(m)).circuit));
  }
  for (const auto& r : rows) {
    csv += r.name + "," + std::to_string(r.clean_ops) + "," + std::to_string(r.backdoored_ops) + "," +
           std::to_string(r.clean_depth) + "," + std::to_string(r.backdoored_depth) + "," +
           std::to_string(r.clean_fused_depth) + "," + std::to_string(r.backdoored_fused_depth) + "\n";
  }
  emit(out, csv);
  return 0;
}

int cmd_retrain(const fs::path& manifest_path, const std::optional<int>& epochs, const std::optional<fs::path>& out,
                int threads) {
  const auto m = load_manifest(manifest_path);
  const auto d = load_data(m);
  const int n = epochs ? *epochs : m.retrain_epochs;
  const auto r = retrain_eval(m, d, load_model(m, false), load_model(m, true), n, threads);
  json j = {{"provenance", provenance(m)},
            {"epochs", r.epochs},
            {"dpba_asr_before", round6(r.dpba_asr_before)},
            {"dpba_asr_after", round6(r.dpba_asr_after)},
            {"qtrojan_asr_before", round6(r.qtrojan_asr_before)},
            {"qtrojan_asr_after", round6(r.qtrojan_asr_after)},
            {"theta_before", round6(r.theta_before)},
            {"theta_after", round6(r.theta_after)}};
  std::cout << "DPBA ASR " << fmt6(r.dpba_asr_before) << " -> " << fmt6(r.dpba_asr_after) << "; QTrojan ASR "
            << fmt6(r.qtrojan_asr_before) << " -> " << fmt6(r.qtrojan_asr_after) << "\n";
  emit(out ? out : std::optional<fs::path>(paths_for(m).retrain()), dump(j));
  return 0;
}

int cmd_lint(const fs::path& config_path, double threshold) {
  const auto config = trigcfg::parse_config(read_text(config_path));
  const auto findings = trigcfg::lint_config(config, threshold);
  for (const auto& f : findings) std::cout << f.message << "\n";
  std::cout << findings.size() << " finding(s)\n";
  return findings.empty() ? 0 : 1;
}

// Whole pipeline for one manifest.
int cmd_run(const fs::path& manifest_path, int threads) {
  const auto m = load_manifest(manifest_path);
  cmd_prepare(manifest_path, "", 0, 0, std::nullopt, std::nullopt, 0, 0);
  cmd_train(manifest_path, false, threads);
  if (m.poison) cmd_train(manifest_path, true, threads);
  cmd_inject(manifest_path, std::nullopt, std::nullopt, std::nullopt);
  const auto p = paths_for(m);
  if (m.backdoor.mode == backdoor::Mode::Full) {
    cmd_gen_config(false, true, std::nullopt, std::nullopt, std::nullopt, manifest_path, true, std::nullopt,
                   p.trigger(), threads);
  } else {
    cmd_gen_config(false, true, std::nullopt, std::nullopt, std::nullopt, manifest_path, false, std::nullopt,
                   p.trigger(), threads);
  }
  cmd_attack_eval(manifest_path, p.trigger(), std::nullopt, std::nullopt, threads);
  if (m.is_classification()) {
    if (m.task == Task::Mnist4) cmd_sweep(manifest_path, "1..4", std::nullopt, std::nullopt, threads);
    if (m.poison) {
      cmd_compare({manifest_path}, p.dir / "compare.csv", threads);
      cmd_retrain(manifest_path, std::nullopt, std::nullopt, threads);
    }
  }
  cmd_depth({}, {manifest_path}, p.dir / "depth.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtrojan: circuit-level backdoor experiments on a statevector VQC simulator"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  int rc = 0;
  auto guarded = [&rc](auto&& fn) {
    return [&rc, fn]() {
      try {
        rc = fn();
      } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = kExitValidation;
      } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = kExitData;
      } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = kExitStructural;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 1;
      }
    };
  };

  // prepare-data
  auto* prep = app.add_subcommand("prepare-data", "IDX -> PCA -> scaled dataset cache (or sin windows)");
  std::optional<fs::path> prep_manifest, prep_out, prep_data_dir;
  std::string prep_task;
  int prep_k = 8;
  std::uint64_t prep_seed = 0;
  std::size_t prep_train = 1000, prep_test = 0;
  prep->add_option("--manifest", prep_manifest, "Experiment manifest");
  prep->add_option("--task", prep_task, "mnist2 | mnist4 | sinreg (without --manifest)");
  prep->add_option("--k", prep_k, "PCA components = qubits");
  prep->add_option("--seed", prep_seed, "Subset seed");
  prep->add_option("--train-size", prep_train, "Training images kept");
  prep->add_option("--test-size", prep_test, "Test images kept (0 = all)");
  prep->add_option("--data-dir", prep_data_dir, "Directory with the MNIST IDX files");
  prep->add_option("--out", prep_out, "Output file");
  prep->callback(guarded([&] {
    return cmd_prepare(prep_manifest, prep_task, prep_k, prep_seed, prep_out, prep_data_dir, prep_train, prep_test);
  }));

  // train
  auto* tr = app.add_subcommand("train", "Train a model; writes checkpoint and per-epoch losses");
  fs::path tr_manifest;
  bool tr_poisoned = false;
  tr->add_option("--manifest", tr_manifest, "Experiment manifest")->required();
  tr->add_flag("--poisoned", tr_poisoned, "Train on the DPBA-poisoned set");
  tr->callback(guarded([&] { return cmd_train(tr_manifest, tr_poisoned, threads); }));

  // inject
  auto* inj = app.add_subcommand("inject", "Insert the backdoor into the trained circuit");
  fs::path inj_manifest;
  std::optional<std::string> inj_mode, inj_qubits;
  std::optional<fs::path> inj_out;
  inj->add_option("--manifest", inj_manifest, "Experiment manifest")->required();
  inj->add_option("--mode", inj_mode, "full | pre-only");
  inj->add_option("--qubits", inj_qubits, "Comma-separated qubits or 'all'");
  inj->add_option("--out", inj_out, "Circuit file");
  inj->callback(guarded([&] { return cmd_inject(inj_manifest, inj_mode, inj_qubits, inj_out); }));

  // gen-config
  auto* gen = app.add_subcommand("gen-config", "Emit a benign or trigger server configuration");
  bool gen_benign = false, gen_trigger = false, gen_search = false;
  std::optional<double> gen_theta;
  std::optional<std::string> gen_mode, gen_qubits;
  std::optional<fs::path> gen_manifest, gen_circuit, gen_out;
  gen->add_flag("--benign", gen_benign, "No calibration entries");
  gen->add_flag("--trigger", gen_trigger, "Calibration entries that arm the backdoor");
  gen->add_option("--theta", gen_theta, "Uniform RY angle in radians");
  gen->add_option("--mode", gen_mode, "full | pre-only");
  gen->add_option("--qubits", gen_qubits, "Comma-separated qubits or 'all'");
  gen->add_option("--manifest", gen_manifest, "Take qubits/mode from a manifest");
  gen->add_flag("--search", gen_search, "Search theta on the manifest's backdoored model");
  gen->add_option("--circuit", gen_circuit, "Backdoored circuit file for --search");
  gen->add_option("--out", gen_out, "Output file (default stdout)");
  gen->callback(guarded([&] {
    return cmd_gen_config(gen_benign, gen_trigger, gen_theta, gen_mode, gen_qubits, gen_manifest, gen_search,
                          gen_circuit, gen_out, threads);
  }));

  // attack-eval
  auto* att = app.add_subcommand("attack-eval", "CDA / ASR (or sin-curve flattening) under a configuration");
  fs::path att_manifest, att_config;
  std::optional<fs::path> att_circuit, att_out;
  att->add_option("--manifest", att_manifest, "Experiment manifest")->required();
  att->add_option("--config", att_config, "Server configuration file")->required();
  att->add_option("--circuit", att_circuit, "Backdoored circuit file");
  att->add_option("--out", att_out, "Report file");
  att->callback(guarded([&] { return cmd_attack_eval(att_manifest, att_config, att_circuit, att_out, threads); }));

  // compare
  auto* cmp = app.add_subcommand("compare", "Clean / DPBA / QTrojan table");
  std::vector<fs::path> cmp_manifests;
  std::optional<fs::path> cmp_out;
  cmp->add_option("--manifests", cmp_manifests, "Experiment manifests")->required();
  cmp->add_option("--out", cmp_out, "CSV file (default stdout)");
  cmp->callback(guarded([&] { return cmd_compare(cmp_manifests, cmp_out, threads); }));

  // sweep-partial
  auto* sw = app.add_subcommand("sweep-partial", "PreOnly ASR over nested qubit sets");
  fs::path sw_manifest;
  std::string sw_qubits = "1..4";
  std::optional<int> sw_target;
  std::optional<fs::path> sw_out;
  sw->add_option("--manifest", sw_manifest, "Experiment manifest")->required();
  sw->add_option("--qubits", sw_qubits, "1..K");
  sw->add_option("--target", sw_target, "Target class (default: majority under the largest set)");
  sw->add_option("--out", sw_out, "CSV file");
  sw->callback(guarded([&] { return cmd_sweep(sw_manifest, sw_qubits, sw_target, sw_out, threads); }));

  // depth-report
  auto* dep = app.add_subcommand("depth-report", "Depth of clean vs backdoored circuits, before and after fusion");
  std::vector<fs::path> dep_circuits, dep_manifests;
  std::optional<fs::path> dep_out;
  dep->add_option("--circuit", dep_circuits, "Circuit files");
  dep->add_option("--manifest", dep_manifests, "Manifests (circuit built from the task)");
  dep->add_option("--out", dep_out, "CSV file (default stdout)");
  dep->callback(guarded([&] { return cmd_depth(dep_circuits, dep_manifests, dep_out); }));

  // retrain-eval
  auto* ret = app.add_subcommand("retrain-eval", "Backdoor persistence under clean retraining");
  fs::path ret_manifest;
  std::optional<int> ret_epochs;
  std::optional<fs::path> ret_out;
  ret->add_option("--manifest", ret_manifest, "Experiment manifest")->required();
  ret->add_option("--epochs", ret_epochs, "Clean retraining epochs")->check(CLI::NonNegativeNumber);
  ret->add_option("--out", ret_out, "Report file");
  ret->callback(guarded([&] { return cmd_retrain(ret_manifest, ret_epochs, ret_out, threads); }));

  // lint-config
  auto* lint = app.add_subcommand("lint-config", "Flag semantics-altering calibration entries");
  fs::path lint_path;
  double lint_threshold = 0.1;
  lint->add_option("--config", lint_path, "Server configuration file")->required();
  lint->add_option("--threshold", lint_threshold, "Rotation magnitude threshold in radians");
  lint->callback(guarded([&] { return cmd_lint(lint_path, lint_threshold); }));

  // run
  auto* run = app.add_subcommand("run", "Every step for one manifest");
  fs::path run_manifest;
  run->add_option("--manifest", run_manifest, "Experiment manifest")->required();
  run->callback(guarded([&] { return cmd_run(run_manifest, threads); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  return rc;
}
