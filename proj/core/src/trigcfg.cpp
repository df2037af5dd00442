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

#include "qtrojan/trigcfg.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <set>

namespace qtrojan::trigcfg {

using qsim::GateKind;
using qsim::LayerTag;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string_view layer_name(CalibLayer l) { return l == CalibLayer::Pre ? "pre" : "post"; }

std::string_view slot_name(CalibSlot s) {
  switch (s) {
    case CalibSlot::Rx: return "rx";
    case CalibSlot::Rx2: return "rx2";
    case CalibSlot::Ry: return "ry";
  }
  return "?";
}

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Parses the whole of `s` as a double; nullopt on any leftover characters.
std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

using Kind = ConfigError::Kind;

CalibKey parse_calib_key(std::string_view key, int line) {
  const auto d1 = key.find('.');
  const auto d2 = d1 == std::string_view::npos ? d1 : key.find('.', d1 + 1);
  if (d2 == std::string_view::npos || key.find('.', d2 + 1) != std::string_view::npos) {
    throw ConfigError(Kind::Syntax, line, "calibration key '" + std::string(key) + "' is not <layer>.q<index>.<slot>");
  }
  const auto layer = key.substr(0, d1);
  const auto qubit = key.substr(d1 + 1, d2 - d1 - 1);
  const auto slot = key.substr(d2 + 1);

  CalibKey k;
  if (layer == "pre") {
    k.layer = CalibLayer::Pre;
  } else if (layer == "post") {
    k.layer = CalibLayer::Post;
  } else {
    throw ConfigError(Kind::UnknownKey, line, "unknown calibration layer '" + std::string(layer) + "'");
  }
  if (qubit.size() < 2 || qubit.front() != 'q') {
    throw ConfigError(Kind::Syntax, line, "qubit field '" + std::string(qubit) + "' is not q<index>");
  }
  const auto digits = qubit.substr(1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k.qubit);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || k.qubit < 0) {
    throw ConfigError(Kind::Syntax, line, "qubit field '" + std::string(qubit) + "' is not q<index>");
  }
  if (slot == "rx") {
    k.slot = CalibSlot::Rx;
  } else if (slot == "rx2") {
    k.slot = CalibSlot::Rx2;
  } else if (slot == "ry") {
    k.slot = CalibSlot::Ry;
  } else {
    throw ConfigError(Kind::UnknownKey, line, "unknown calibration slot '" + std::string(slot) + "'");
  }
  if (k.layer == CalibLayer::Pre && k.slot != CalibSlot::Rx) {
    throw ConfigError(Kind::Validation, line, "pre-encoding layer has only an rx slot, got '" + std::string(key) + "'");
  }
  if (k.layer == CalibLayer::Post && k.slot == CalibSlot::Rx) {
    throw ConfigError(Kind::Validation, line, "post-encoding layer has rx2 and ry slots, got '" + std::string(key) + "'");
  }
  return k;
}

double parse_finite(std::string_view key, std::string_view value, int line) {
  const auto v = parse_double(value);
  if (!v) throw ConfigError(Kind::Syntax, line, "value '" + std::string(value) + "' for " + std::string(key) + " is not a number");
  if (!std::isfinite(*v)) throw ConfigError(Kind::NonFinite, line, std::string(key) + " is not finite");
  return *v;
}

void check_name(const std::string& name) {
  if (name.find_first_of("\r\n") != std::string::npos || trim(name) != name) {
    throw ValidationError("server name must be a single trimmed line");
  }
}

std::optional<CalibKey> key_for(const qsim::GateOp& op) {
  if (op.layer == LayerTag::PreEncoding && op.kind == GateKind::RX) {
    return CalibKey{CalibLayer::Pre, op.qubits[0], CalibSlot::Rx};
  }
  if (op.layer == LayerTag::PostEncoding && op.kind == GateKind::RX) {
    return CalibKey{CalibLayer::Post, op.qubits[0], CalibSlot::Rx2};
  }
  if (op.layer == LayerTag::PostEncoding && op.kind == GateKind::RY) {
    return CalibKey{CalibLayer::Post, op.qubits[0], CalibSlot::Ry};
  }
  return std::nullopt;
}

}  // namespace

std::string CalibKey::str() const {
  return std::string(layer_name(layer)) + ".q" + std::to_string(qubit) + "." + std::string(slot_name(slot));
}

ConfigError::ConfigError(Kind kind, int line, const std::string& message)
    : ValidationError("line " + std::to_string(line) + ": " + message), kind_(kind), line_(line) {}

double normalize_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  if (r == 0.0) r = 0.0;  // drops the sign of -0
  return r;
}

ServerConfig parse_config(std::string_view text) {
  ServerConfig cfg;
  enum class Section { None, Server, Calibration } section = Section::None;
  std::set<std::string> seen_sections;
  std::set<std::string> seen_server_keys;
  int line_no = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(Kind::Syntax, line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name == "server") {
        section = Section::Server;
      } else if (name == "calibration") {
        section = Section::Calibration;
      } else {
        throw ConfigError(Kind::Syntax, line_no, "unknown section [" + name + "]");
      }
      if (!seen_sections.insert(name).second) throw ConfigError(Kind::Syntax, line_no, "duplicate section [" + name + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(Kind::Syntax, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(Kind::Syntax, line_no, "empty key");

    switch (section) {
      case Section::None: throw ConfigError(Kind::Syntax, line_no, "entry outside of a section");
      case Section::Server: {
        if (!seen_server_keys.insert(std::string(key)).second) {
          throw ConfigError(Kind::DuplicateKey, line_no, "duplicate key '" + std::string(key) + "'");
        }
        if (key == "name") {
          cfg.server.name = std::string(value);
        } else if (key == "pulse_dt_ns" || key == "max_amp") {
          const double v = parse_finite(key, value, line_no);
          if (!(v > 0)) throw ConfigError(Kind::Validation, line_no, std::string(key) + " must be > 0");
          (key == "pulse_dt_ns" ? cfg.server.pulse_dt_ns : cfg.server.max_amp) = v;
        } else {
          throw ConfigError(Kind::UnknownKey, line_no, "unknown server key '" + std::string(key) + "'");
        }
        break;
      }
      case Section::Calibration: {
        const CalibKey k = parse_calib_key(key, line_no);
        const double v = parse_finite(key, value, line_no);
        if (!cfg.calibration.emplace(k, normalize_angle(v)).second) {
          throw ConfigError(Kind::DuplicateKey, line_no, "duplicate key '" + k.str() + "'");
        }
        break;
      }
    }
  }
  return cfg;
}

std::string emit_config(const ServerConfig& config) {
  check_name(config.server.name);
  std::string out = "[server]\n";
  out += "name = " + config.server.name + "\n";
  out += "pulse_dt_ns = " + fmt10(config.server.pulse_dt_ns) + "\n";
  out += "max_amp = " + fmt10(config.server.max_amp) + "\n";
  out += "\n[calibration]\n";
  for (const auto& [k, v] : config.calibration) out += k.str() + " = " + fmt10(v) + "\n";
  return out;
}

ServerConfig benign_config(const ServerMeta& meta) { return ServerConfig{meta, {}}; }

ServerConfig trigger_config(const backdoor::BackdoorSpec& spec, const ServerMeta& meta) {
  ServerConfig cfg{meta, {}};
  for (std::size_t i = 0; i < spec.qubits.size(); ++i) {
    const int q = spec.qubits[i];
    cfg.calibration[{CalibLayer::Pre, q, CalibSlot::Rx}] = normalize_angle(spec.pre_angle);
    if (spec.mode != backdoor::Mode::Full) continue;
    cfg.calibration[{CalibLayer::Post, q, CalibSlot::Rx2}] = normalize_angle(spec.post_rx_angle);
    cfg.calibration[{CalibLayer::Post, q, CalibSlot::Ry}] = normalize_angle(spec.theta.at(i));
  }
  return cfg;
}

std::string emit_trigger_config(const backdoor::BackdoorSpec& spec, const ServerMeta& meta) {
  return emit_config(trigger_config(spec, meta));
}

Resolution resolve(const qsim::Circuit& circuit, const ServerConfig& config) {
  Resolution res{qsim::Circuit(circuit.n_qubits()), {}};
  std::set<std::string> used;
  for (auto op : circuit.ops()) {
    if (op.layer == LayerTag::PreEncoding || op.layer == LayerTag::PostEncoding) {
      const auto key = key_for(op);
      if (!key) {
        throw StructuralError(std::string(qsim::to_string(op.kind)) + " gate in " +
                              std::string(qsim::to_string(op.layer)) + " layer has no calibration slot");
      }
      const auto it = config.calibration.find(*key);
      op.params[0] = it == config.calibration.end() ? 0.0 : it->second;
      if (it != config.calibration.end()) used.insert(key->str());
    }
    res.circuit.append(op);
  }
  for (const auto& [k, v] : config.calibration) {
    if (!used.contains(k.str())) res.warnings.push_back("calibration entry " + k.str() + " matches no gate");
  }
  return res;
}

std::vector<Finding> lint_config(const ServerConfig& config, double threshold) {
  constexpr double kTol = 1e-6;
  std::vector<Finding> out;
  for (const auto& [k, v] : config.calibration) {
    const double a = normalize_angle(v);
    const double magnitude = std::min(a, kTwoPi - a);
    if (std::abs(a - std::numbers::pi / 2) < kTol || std::abs(a - 3 * std::numbers::pi / 2) < kTol) {
      out.push_back({k, a, k.str() + " equals a quarter-turn trigger constant (" + fmt10(a) + " rad)"});
    } else if (magnitude > threshold) {
      out.push_back({k, a, k.str() + " is a semantics-altering calibration (" + fmt10(magnitude) + " rad)"});
    }
  }
  return out;
}

}  // namespace qtrojan::trigcfg
