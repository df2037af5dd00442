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

#include "qtrojan/circuit_io.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "qtrojan/error.hpp"

namespace qtrojan::qsim {

using nlohmann::json;

namespace {

constexpr std::string_view kFormat = "qtrojan-circuit";
constexpr int kVersion = 1;

void fnv(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string circuit_to_json(const Circuit& circuit) {
  json ops = json::array();
  for (const auto& op : circuit.ops()) {
    json j;
    j["kind"] = to_string(op.kind);
    j["qubits"] = op.arity() == 2 ? json::array({op.qubits[0], op.qubits[1]}) : json::array({op.qubits[0]});
    j["params"] = json::array();
    for (int s = 0; s < op.n_params(); ++s) j["params"].push_back(op.params[static_cast<std::size_t>(s)]);
    j["layer"] = to_string(op.layer);
    j["trainable"] = op.trainable;
    if (op.feature_index >= 0) {
      j["feature"] = op.feature_index;
      j["feature_scale"] = op.feature_scale;
    }
    if (op.kind == GateKind::Fused1Q) {
      json m = json::array();
      for (const auto& z : op.matrix.m) m.push_back({z.real(), z.imag()});
      j["matrix"] = m;
    }
    ops.push_back(std::move(j));
  }
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["n_qubits"] = circuit.n_qubits();
  doc["structure_hash"] = hex64(structure_hash(circuit));
  doc["ops"] = std::move(ops);
  return doc.dump(1) + "\n";
}

Circuit circuit_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("circuit: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw DataError("circuit: field 'format' is not qtrojan-circuit");
    if (doc.at("version").get<int>() != kVersion) throw DataError("circuit: unsupported field 'version'");
    Circuit c(doc.at("n_qubits").get<int>());
    for (const auto& j : doc.at("ops")) {
      GateOp op;
      op.kind = gate_kind_from_string(j.at("kind").get<std::string>());
      const auto& qs = j.at("qubits");
      if (static_cast<int>(qs.size()) != op.arity()) throw DataError("circuit: field 'qubits' has wrong arity");
      op.qubits = {qs[0].get<int>(), op.arity() == 2 ? qs[1].get<int>() : -1};
      const auto& ps = j.at("params");
      if (static_cast<int>(ps.size()) != op.n_params()) throw DataError("circuit: field 'params' has wrong length");
      for (std::size_t s = 0; s < ps.size(); ++s) op.params[s] = ps[s].get<double>();
      op.layer = layer_tag_from_string(j.at("layer").get<std::string>());
      op.trainable = j.at("trainable").get<bool>();
      if (j.contains("feature")) {
        op.feature_index = j["feature"].get<int>();
        op.feature_scale = j.at("feature_scale").get<double>();
      }
      if (op.kind == GateKind::Fused1Q) {
        const auto& m = j.at("matrix");
        if (m.size() != 4) throw DataError("circuit: field 'matrix' must have 4 entries");
        for (std::size_t k = 0; k < 4; ++k) op.matrix.m[k] = Complex(m[k][0].get<double>(), m[k][1].get<double>());
      }
      c.append(op);
    }
    if (doc.contains("structure_hash") && doc["structure_hash"].get<std::string>() != hex64(structure_hash(c))) {
      throw DataError("circuit: field 'structure_hash' does not match the ops");
    }
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("circuit: ") + e.what());
  }
}

std::uint64_t structure_hash(const Circuit& circuit) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv(h, "n=" + std::to_string(circuit.n_qubits()) + ";");
  for (const auto& op : circuit.ops()) {
    std::string s(to_string(op.kind));
    s += ":" + std::to_string(op.qubits[0]) + "," + std::to_string(op.arity() == 2 ? op.qubits[1] : -1);
    s += ":" + std::string(to_string(op.layer)) + ":" + (op.trainable ? "t" : "f");
    s += ":" + std::to_string(op.feature_index) + ";";
    fnv(h, s);
  }
  return h;
}

}  // namespace qtrojan::qsim
