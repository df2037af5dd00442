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

// Server configuration files and the compile step that binds their calibration
// entries to the backdoor gates.
//
// Grammar (line oriented, UTF-8):
//
//   # comment
//   [server]
//   name = <string>
//   pulse_dt_ns = <float>
//   max_amp = <float>
//   [calibration]
//   <layer>.q<index>.<slot> = <float>     layer in {pre, post}; slot in {rx, rx2, ry}
//
// The pre layer has only `rx`; the post layer has `rx2` and `ry`. Whitespace around
// `=` is ignored. A file without a [calibration] section is benign.

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qtrojan/backdoor.hpp"
#include "qtrojan/error.hpp"
#include "qtrojan/qsim.hpp"

namespace qtrojan::trigcfg {

enum class CalibLayer { Pre, Post };
enum class CalibSlot { Rx, Rx2, Ry };

struct CalibKey {
  CalibLayer layer = CalibLayer::Pre;
  int qubit = 0;
  CalibSlot slot = CalibSlot::Rx;

  /// "pre.q0.rx"
  std::string str() const;

  friend bool operator==(const CalibKey&, const CalibKey&) = default;
};

/// Lexicographic order of the textual keys (so "post.q10.ry" < "post.q3.rx2").
struct CalibKeyLess {
  bool operator()(const CalibKey& a, const CalibKey& b) const { return a.str() < b.str(); }
};

using Calibration = std::map<CalibKey, double, CalibKeyLess>;

struct ServerMeta {
  std::string name = "qpu-sim-almaden";
  double pulse_dt_ns = 0.2222222222;
  double max_amp = 1.0;

  friend bool operator==(const ServerMeta&, const ServerMeta&) = default;
};

struct ServerConfig {
  ServerMeta server;
  Calibration calibration;

  bool benign() const { return calibration.empty(); }
  friend bool operator==(const ServerConfig&, const ServerConfig&) = default;
};

class ConfigError : public ValidationError {
 public:
  enum class Kind { Syntax, DuplicateKey, NonFinite, UnknownKey, Validation };

  ConfigError(Kind kind, int line, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

/// Maps an angle into [0, 2pi).
double normalize_angle(double radians);

ServerConfig parse_config(std::string_view text);

/// Canonical text: [server] then [calibration], keys sorted, values with 10
/// significant digits, '\n' line endings.
std::string emit_config(const ServerConfig& config);

ServerConfig benign_config(const ServerMeta& meta = {});

/// Calibration entries that arm `spec`: pre.q{i}.rx per listed qubit, plus
/// post.q{i}.rx2 and post.q{i}.ry in Full mode.
ServerConfig trigger_config(const backdoor::BackdoorSpec& spec, const ServerMeta& meta = {});

std::string emit_trigger_config(const backdoor::BackdoorSpec& spec, const ServerMeta& meta = {});

struct Resolution {
  qsim::Circuit circuit;
  std::vector<std::string> warnings;
};

/// Sets every pre/post-encoding gate's angle from its calibration entry (0 when
/// absent). Entries that address no inserted gate produce warnings, never errors.
Resolution resolve(const qsim::Circuit& circuit, const ServerConfig& config);

struct Finding {
  CalibKey key;
  double angle = 0.0;
  std::string message;
};

/// Flags calibration entries whose rotation magnitude (distance to 0 mod 2pi) exceeds
/// `threshold`, and always flags the trigger constants pi/2 and 3pi/2.
std::vector<Finding> lint_config(const ServerConfig& config, double threshold = 0.1);

}  // namespace qtrojan::trigcfg
