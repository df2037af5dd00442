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

#include <stdexcept>
#include <string>

namespace qtrojan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed circuits: qubit indices out of range, arity mismatches, missing layers.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Well-formed input carrying an invalid value (non-unitary matrix, bad length, NaN).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated external data (IDX files, checkpoints, manifests).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtrojan
