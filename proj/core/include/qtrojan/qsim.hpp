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

// Dense statevector simulation: gates, circuits, measurement, fusion and depth.
//
// Qubit 0 is the most significant bit of a basis index, so the ket |q0 q1 ... q_{n-1}>
// reads left to right the way it is written. Rotations use the half-angle convention
// RX(a) = exp(-i a X / 2) (likewise RY, RZ); PHASE(a) = diag(1, e^{ia});
// ROT(phi, theta, omega) = RZ(omega) RY(theta) RZ(phi).

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace qtrojan::qsim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 20;

/// Row-major 2x2 complex matrix.
struct Mat2 {
  std::array<Complex, 4> m{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}};

  Complex operator()(int row, int col) const { return m[static_cast<std::size_t>(2 * row + col)]; }
  Complex& operator()(int row, int col) { return m[static_cast<std::size_t>(2 * row + col)]; }

  static Mat2 identity() { return {}; }
  Mat2 adjoint() const;
  friend Mat2 operator*(const Mat2& a, const Mat2& b);
};

/// max |(U^dagger U - I)_ij| over entries.
double unitarity_error(const Mat2& u);
bool is_unitary(const Mat2& u, double tol = 1e-12);

Mat2 rx_matrix(double angle);
Mat2 ry_matrix(double angle);
Mat2 rz_matrix(double angle);
Mat2 phase_matrix(double angle);
Mat2 rot_matrix(double phi, double theta, double omega);

class Statevector {
 public:
  /// |0...0> on n_qubits qubits.
  explicit Statevector(int n_qubits);

  /// Takes ownership of 2^n amplitudes. Throws ValidationError unless the length is a
  /// power of two and the state is normalized within 1e-10.
  static Statevector from_amplitudes(std::vector<Complex> amplitudes);
  static Statevector basis(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> mutable_amplitudes() { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  double norm_squared() const;

  friend bool operator==(const Statevector&, const Statevector&) = default;

 private:
  Statevector(int n_qubits, std::vector<Complex> amps) : n_qubits_(n_qubits), amps_(std::move(amps)) {}

  int n_qubits_;
  std::vector<Complex> amps_;
};

enum class GateKind { RX, RY, RZ, Phase, Rot, CRX, CNOT, Fused1Q };
enum class LayerTag { PreEncoding, Encoding, PostEncoding, Variational, Other };

std::string_view to_string(GateKind kind);
std::string_view to_string(LayerTag tag);
GateKind gate_kind_from_string(std::string_view s);
LayerTag layer_tag_from_string(std::string_view s);

int gate_arity(GateKind kind);
int gate_param_count(GateKind kind);

struct GateOp {
  GateKind kind = GateKind::RX;
  std::array<int, 2> qubits{0, -1};  // {target} or {control, target}
  std::array<double, 3> params{};
  Mat2 matrix;  // Fused1Q only
  LayerTag layer = LayerTag::Other;
  bool trainable = false;
  // Slot 0 takes feature_scale * x[feature_index] at simulation time when >= 0.
  int feature_index = -1;
  double feature_scale = 1.0;
  // Offset of the first trainable slot in the flat parameter vector; set by Circuit.
  int param_offset = -1;

  static GateOp rx(int q, double angle, LayerTag tag = LayerTag::Other);
  static GateOp ry(int q, double angle, LayerTag tag = LayerTag::Other);
  static GateOp rz(int q, double angle, LayerTag tag = LayerTag::Other);
  static GateOp phase(int q, double angle, LayerTag tag = LayerTag::Other);
  static GateOp rot(int q, double phi, double theta, double omega, LayerTag tag = LayerTag::Other);
  static GateOp crx(int control, int target, double angle, LayerTag tag = LayerTag::Other);
  static GateOp cnot(int control, int target, LayerTag tag = LayerTag::Other);
  /// Throws ValidationError if `u` is not unitary within 1e-12.
  static GateOp fused(int q, const Mat2& u, LayerTag tag = LayerTag::Other);

  GateOp& as_trainable() {
    trainable = true;
    return *this;
  }
  GateOp& bind_feature(int index, double scale) {
    feature_index = index;
    feature_scale = scale;
    return *this;
  }

  int arity() const { return gate_arity(kind); }
  int n_params() const { return gate_param_count(kind); }
  bool acts_on(int q) const { return qubits[0] == q || (arity() == 2 && qubits[1] == q); }
  int target() const { return arity() == 2 ? qubits[1] : qubits[0]; }
};

/// The single-qubit matrix of a one-qubit op, or the target block of CRX / CNOT.
Mat2 gate_matrix(const GateOp& op);

/// Per-evaluation values for trainable and feature-bound slots. Empty spans mean
/// "use the angles stored in the ops".
struct Bindings {
  std::span<const double> params;
  std::span<const double> features;
};

class Circuit {
 public:
  struct ParamRef {
    std::size_t op;
    int slot;
  };

  explicit Circuit(int n_qubits);

  /// Validates the qubit indices, keeps trainable ops in Variational layers and
  /// assigns the op's parameter offset.
  void append(GateOp op);
  void append(std::span<const GateOp> ops);

  int n_qubits() const { return n_qubits_; }
  std::span<const GateOp> ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  int n_trainable_params() const { return n_params_; }
  /// Flat parameter index -> (op, slot).
  std::vector<ParamRef> param_refs() const;
  /// The angles currently stored in trainable slots, in circuit order.
  std::vector<double> stored_params() const;

  /// Copy with trainable and feature slots replaced by the given bindings.
  Circuit bound(Bindings b) const;

  bool has_layer(LayerTag tag) const;

 private:
  int n_qubits_;
  std::vector<GateOp> ops_;
  int n_params_ = 0;
};

/// The op with trainable and feature slots filled from `b`.
GateOp bind_op(const GateOp& op, Bindings b);

void apply_gate_inplace(Statevector& state, const GateOp& op);
Statevector apply_gate(Statevector state, const GateOp& op);

void run_inplace(const Circuit& circuit, Bindings b, Statevector& state);
/// Runs the circuit on |0...0>.
Statevector simulate(const Circuit& circuit, Bindings b = {});

double expectation_z(const Statevector& state, int qubit);
std::vector<double> probabilities(const Statevector& state);
/// <Z> estimated from `shots` binomial draws of the exact outcome probabilities.
double sample_expectation_z(const Statevector& state, int qubit, int shots, std::mt19937_64& rng);
/// |<a|b>|^2
double fidelity(const Statevector& a, const Statevector& b);

/// Replaces each maximal run of single-qubit ops on one qubit (not interrupted by a
/// two-qubit op touching that qubit) with one Fused1Q op holding the ordered product.
/// Runs of length one are kept as-is. Slots are bound from `b` first.
Circuit fuse_single_qubit_runs(const Circuit& circuit, Bindings b = {});

/// ASAP layer count.
int circuit_depth(const Circuit& circuit);

/// Dense column-major unitary of the whole circuit; for small equivalence checks.
std::vector<Complex> circuit_unitary(const Circuit& circuit, Bindings b = {});

}  // namespace qtrojan::qsim
