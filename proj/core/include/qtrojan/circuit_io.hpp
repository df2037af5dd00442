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

#include <cstdint>
#include <string>
#include <string_view>

#include "qtrojan/qsim.hpp"

namespace qtrojan::qsim {

/// JSON circuit description ("qtrojan-circuit", version 1). Doubles round-trip exactly.
std::string circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(std::string_view text);

/// FNV-1a over the structural description: kinds, qubits, layers, trainability and
/// feature bindings. Stored angles are excluded so that binding a config or training
/// does not change the fingerprint.
std::uint64_t structure_hash(const Circuit& circuit);

std::string hex64(std::uint64_t v);

}  // namespace qtrojan::qsim
