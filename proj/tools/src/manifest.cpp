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

#include "qtrojan/manifest.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "qtrojan/data.hpp"
#include "qtrojan/error.hpp"

namespace qtrojan::experiment {

namespace {

// Runs an enum parser and prefixes its error with the manifest key.
template <class F>
auto named(const std::string& key, F parse, const std::string& value) {
  try {
    return parse(value);
  } catch (const ValidationError& e) {
    throw ValidationError("manifest: " + key + ": " + e.what());
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("manifest: " + key + " = '" + std::string(text) + "' is not a valid number");
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& key, std::string_view text) {
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_number<int>(key, trim(text.substr(0, comma))));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  return out;
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::Mnist2: return "mnist2";
    case Task::Mnist4: return "mnist4";
    case Task::SinReg: return "sinreg";
  }
  return "?";
}

Task task_from_string(std::string_view s) {
  if (s == "mnist2") return Task::Mnist2;
  if (s == "mnist4") return Task::Mnist4;
  if (s == "sinreg") return Task::SinReg;
  throw ValidationError("manifest: task '" + std::string(s) + "' is not one of mnist2, mnist4, sinreg");
}

std::vector<int> Manifest::classes() const {
  switch (task) {
    case Task::Mnist2: return {0, 1};
    case Task::Mnist4: return {0, 1, 2, 3};
    case Task::SinReg: return {};
  }
  return {};
}

int Manifest::n_classes() const { return static_cast<int>(classes().size()); }

std::vector<int> Manifest::backdoor_qubits() const {
  if (!backdoor.qubits.empty()) return backdoor.qubits;
  std::vector<int> all(static_cast<std::size_t>(n_qubits));
  for (int q = 0; q < n_qubits; ++q) all[static_cast<std::size_t>(q)] = q;
  return all;
}

std::filesystem::path Manifest::resolved_data_dir() const {
  if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') return env;
  return data_dir.is_absolute() ? data_dir : base_dir / data_dir;
}

std::filesystem::path Manifest::resolved_output_dir() const {
  return output_dir.is_absolute() ? output_dir : base_dir / output_dir;
}

void Manifest::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError("manifest: " + field + " " + why);
  };
  if (n_qubits < 2 || n_qubits > 20) fail("n_qubits", "must lie in [2, 20]");
  if (n_blocks < 1) fail("n_blocks", "must be >= 1");
  if (is_classification() && n_classes() > n_qubits) fail("n_qubits", "is smaller than the class count");
  if (is_classification() && train_size < 1) fail("train_size", "must be >= 1");
  if (grid_size < 8) fail("backdoor.grid_size", "must be >= 8");
  if (retrain_epochs < 0) fail("retrain.epochs", "must be >= 0");
  try {
    train.validate();
  } catch (const ValidationError& e) {
    fail("train.*", e.what());
  }
  for (int q : backdoor.qubits) {
    if (q < 0 || q >= n_qubits) fail("backdoor.qubits", "lists qubit " + std::to_string(q) + " outside the circuit");
  }
  if (is_classification() && (backdoor.target_class < 0 || backdoor.target_class >= n_classes())) {
    fail("backdoor.target_class", "is not a class of the task");
  }
  if (poison) {
    if (!is_classification()) fail("poison.rate", "is only meaningful for classification tasks");
    try {
      poison->validate();
    } catch (const ValidationError& e) {
      fail("poison.*", e.what());
    }
    if (poison->target_class >= n_classes()) fail("poison.target_class", "is not a class of the task");
    for (int f : poison->trigger_features) {
      if (f < 0 || f >= n_qubits) fail("poison.features", "lists feature " + std::to_string(f) + " outside the input");
    }
  }
  if (task == Task::SinReg) {
    if (sin.window_len < 2) fail("sin.window_len", "must be >= 2");
    if ((sin.window_len + 1) / 2 != n_qubits) fail("sin.window_len", "does not fill the dense encoding of n_qubits");
    if (sin.train_windows < 1 || sin.train_windows >= sin.n_windows) fail("sin.train_windows", "must lie in [1, n_windows)");
    if (!(sin.step > 0)) fail("sin.step", "must be > 0");
  }
}

std::string Manifest::emit() const {
  std::map<std::string, std::string> kv;
  kv["version"] = std::to_string(kManifestVersion);
  kv["task"] = std::string(to_string(task));
  kv["n_qubits"] = std::to_string(n_qubits);
  kv["n_blocks"] = std::to_string(n_blocks);
  kv["seed"] = std::to_string(seed);
  kv["data_dir"] = data_dir.generic_string();
  kv["output_dir"] = output_dir.generic_string();
  kv["train_size"] = std::to_string(train_size);
  kv["test_size"] = std::to_string(test_size);
  kv["train.learning_rate"] = fmt17(train.learning_rate);
  kv["train.weight_decay"] = fmt17(train.weight_decay);
  kv["train.epochs"] = std::to_string(train.epochs);
  kv["train.batch_size"] = std::to_string(train.batch_size);
  kv["train.grad_mode"] = std::string(train::to_string(train.grad_mode));
  kv["train.init_scale"] = fmt17(train.init_scale);
  kv["backdoor.mode"] = std::string(backdoor::to_string(backdoor.mode));
  kv["backdoor.qubits"] = backdoor.qubits.empty() ? "all" : join(backdoor.qubits);
  kv["backdoor.target_class"] = std::to_string(backdoor.target_class);
  kv["backdoor.grid_size"] = std::to_string(grid_size);
  kv["retrain.epochs"] = std::to_string(retrain_epochs);
  if (poison) {
    kv["poison.features"] = join(poison->trigger_features);
    kv["poison.value"] = fmt17(poison->trigger_value);
    kv["poison.rate"] = fmt17(poison->poison_rate);
    kv["poison.target_class"] = std::to_string(poison->target_class);
  }
  if (task == Task::SinReg) {
    kv["sin.n_windows"] = std::to_string(sin.n_windows);
    kv["sin.window_len"] = std::to_string(sin.window_len);
    kv["sin.step"] = fmt17(sin.step);
    kv["sin.train_windows"] = std::to_string(sin.train_windows);
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string Manifest::hash() const { return data::content_hash(emit()); }

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, std::string> kv;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!kv.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw ValidationError("manifest: missing required key '" + key + "'");
    return *v;
  };

  Manifest m;
  m.base_dir = base_dir;
  const int version = parse_number<int>("version", require("version"));
  if (version != kManifestVersion) {
    throw ValidationError("manifest: version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kManifestVersion) + ")");
  }
  m.task = task_from_string(require("task"));
  if (m.task == Task::SinReg) m.train.learning_rate = 1e-2;
  m.n_qubits = parse_number<int>("n_qubits", require("n_qubits"));
  m.n_blocks = parse_number<int>("n_blocks", require("n_blocks"));
  m.seed = parse_number<std::uint64_t>("seed", require("seed"));
  if (auto v = take("data_dir")) m.data_dir = *v;
  if (auto v = take("output_dir")) m.output_dir = *v;
  if (auto v = take("train_size")) m.train_size = parse_number<std::size_t>("train_size", *v);
  if (auto v = take("test_size")) m.test_size = parse_number<std::size_t>("test_size", *v);
  if (auto v = take("train.learning_rate")) m.train.learning_rate = parse_number<double>("train.learning_rate", *v);
  if (auto v = take("train.weight_decay")) m.train.weight_decay = parse_number<double>("train.weight_decay", *v);
  if (auto v = take("train.epochs")) m.train.epochs = parse_number<int>("train.epochs", *v);
  if (auto v = take("train.batch_size")) m.train.batch_size = parse_number<int>("train.batch_size", *v);
  if (auto v = take("train.grad_mode")) m.train.grad_mode = named("train.grad_mode", train::grad_mode_from_string, *v);
  if (auto v = take("train.init_scale")) m.train.init_scale = parse_number<double>("train.init_scale", *v);
  m.train.seed = m.seed;
  if (auto v = take("backdoor.mode")) m.backdoor.mode = named("backdoor.mode", backdoor::mode_from_string, *v);
  if (auto v = take("backdoor.qubits"); v && *v != "all") m.backdoor.qubits = parse_int_list("backdoor.qubits", *v);
  if (auto v = take("backdoor.target_class")) m.backdoor.target_class = parse_number<int>("backdoor.target_class", *v);
  if (auto v = take("backdoor.grid_size")) m.grid_size = parse_number<int>("backdoor.grid_size", *v);
  if (auto v = take("retrain.epochs")) m.retrain_epochs = parse_number<int>("retrain.epochs", *v);
  if (auto rate = take("poison.rate")) {
    dpba::PoisonSpec p;
    p.poison_rate = parse_number<double>("poison.rate", *rate);
    if (auto v = take("poison.features")) p.trigger_features = parse_int_list("poison.features", *v);
    if (auto v = take("poison.value")) p.trigger_value = parse_number<double>("poison.value", *v);
    if (auto v = take("poison.target_class")) p.target_class = parse_number<int>("poison.target_class", *v);
    m.poison = p;
  }
  if (auto v = take("sin.n_windows")) m.sin.n_windows = parse_number<int>("sin.n_windows", *v);
  if (auto v = take("sin.window_len")) m.sin.window_len = parse_number<int>("sin.window_len", *v);
  if (auto v = take("sin.step")) m.sin.step = parse_number<double>("sin.step", *v);
  if (auto v = take("sin.train_windows")) m.sin.train_windows = parse_number<int>("sin.train_windows", *v);
  if (!kv.empty()) throw ValidationError("manifest: unknown key '" + kv.begin()->first + "'");
  m.validate();
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text(path), path.has_parent_path() ? path.parent_path() : ".");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

}  // namespace qtrojan::experiment
