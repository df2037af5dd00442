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

// Experiment manifests: flat `key = value` text, one setting per line, `#` comments.
// Every output file records the manifest hash, which is taken over the canonical
// emission so that comments and key order do not change it.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtrojan/backdoor.hpp"
#include "qtrojan/dpba.hpp"
#include "qtrojan/train.hpp"

namespace qtrojan::experiment {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kArtifactVersion = "0.3.0";
inline constexpr const char* kDataDirEnv = "QTROJAN_DATA_DIR";

enum class Task { Mnist2, Mnist4, SinReg };

std::string_view to_string(Task task);
Task task_from_string(std::string_view s);

struct SinSpec {
  int n_windows = 300;
  int window_len = 8;
  double step = 0.6;
  int train_windows = 200;
};

struct Manifest {
  Task task = Task::Mnist2;
  int n_qubits = 8;
  int n_blocks = 2;
  std::uint64_t seed = 0;

  // Relative paths are resolved against `base_dir` (the manifest's directory).
  std::filesystem::path data_dir = "data/mnist";
  std::filesystem::path output_dir = "out";
  std::filesystem::path base_dir = ".";

  std::size_t train_size = 1000;
  std::size_t test_size = 0;  // 0 keeps every test sample of the task classes

  train::TrainConfig train;
  backdoor::BackdoorSpec backdoor;  // qubits empty => every qubit
  int grid_size = 64;
  std::optional<dpba::PoisonSpec> poison;
  int retrain_epochs = 2;
  SinSpec sin;

  bool is_classification() const { return task != Task::SinReg; }
  std::vector<int> classes() const;
  int n_classes() const;

  /// Listed backdoor qubits, or all of them when the manifest says `all`.
  std::vector<int> backdoor_qubits() const;

  std::filesystem::path resolved_data_dir() const;  // honours QTROJAN_DATA_DIR
  std::filesystem::path resolved_output_dir() const;

  /// Canonical text (sorted keys, fixed formatting, no comments).
  std::string emit() const;
  /// FNV-1a of emit(), 16 hex digits.
  std::string hash() const;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = ".");
Manifest load_manifest(const std::filesystem::path& path);

/// Reads a whole file; DataError names the path when it cannot be opened.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace qtrojan::experiment
