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

#include "qtrojan/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtrojan/error.hpp"

namespace qtrojan::qsim {

namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t bit_of(int n_qubits, int q) { return std::size_t{1} << (n_qubits - 1 - q); }

void check_qubits(const GateOp& op, int n_qubits) {
  const int k = op.arity();
  for (int i = 0; i < k; ++i) {
    const int q = op.qubits[static_cast<std::size_t>(i)];
    if (q < 0 || q >= n_qubits) {
      throw StructuralError("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(n_qubits) + "-qubit register");
    }
  }
  if (k == 2 && op.qubits[0] == op.qubits[1]) {
    throw StructuralError("two-qubit gate with identical control and target " +
                          std::to_string(op.qubits[0]));
  }
}

// u*a + v*b without the NaN/Inf recovery path of operator* (amplitudes are finite).
inline Complex mul_add(Complex u, Complex a, Complex v, Complex b) {
  return {u.real() * a.real() - u.imag() * a.imag() + v.real() * b.real() - v.imag() * b.imag(),
          u.real() * a.imag() + u.imag() * a.real() + v.real() * b.imag() + v.imag() * b.real()};
}

void apply_1q(std::span<Complex> amps, int n_qubits, int q, const Mat2& u) {
  const std::size_t stride = bit_of(n_qubits, q);
  const std::size_t dim = amps.size();
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a0 = amps[i];
      const Complex a1 = amps[i + stride];
      amps[i] = mul_add(u00, a0, u01, a1);
      amps[i + stride] = mul_add(u10, a0, u11, a1);
    }
  }
}

void apply_controlled(std::span<Complex> amps, int n_qubits, int control, int target, const Mat2& u) {
  const std::size_t cbit = bit_of(n_qubits, control);
  const std::size_t tbit = bit_of(n_qubits, target);
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & cbit) == 0 || (i & tbit) != 0) continue;
    const Complex a0 = amps[i];
    const Complex a1 = amps[i | tbit];
    amps[i] = mul_add(u00, a0, u01, a1);
    amps[i | tbit] = mul_add(u10, a0, u11, a1);
  }
}

void apply_cnot(std::span<Complex> amps, int n_qubits, int control, int target) {
  const std::size_t cbit = bit_of(n_qubits, control);
  const std::size_t tbit = bit_of(n_qubits, target);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & cbit) != 0 && (i & tbit) == 0) std::swap(amps[i], amps[i | tbit]);
  }
}

GateOp make(GateKind kind, int q0, int q1, std::array<double, 3> params, LayerTag tag) {
  GateOp op;
  op.kind = kind;
  op.qubits = {q0, q1};
  op.params = params;
  op.layer = tag;
  return op;
}

}  // namespace

Mat2 Mat2::adjoint() const {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

double unitarity_error(const Mat2& u) {
  const Mat2 p = u.adjoint() * u;
  double err = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(p(i, j) - Complex(i == j ? 1.0 : 0.0)));
  return err;
}

bool is_unitary(const Mat2& u, double tol) { return unitarity_error(u) < tol; }

Mat2 rx_matrix(double a) {
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  Mat2 r;
  r.m = {Complex(c), -kI * s, -kI * s, Complex(c)};
  return r;
}

Mat2 ry_matrix(double a) {
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  Mat2 r;
  r.m = {Complex(c), Complex(-s), Complex(s), Complex(c)};
  return r;
}

Mat2 rz_matrix(double a) {
  Mat2 r;
  r.m = {std::exp(-kI * (a / 2)), Complex(0.0), Complex(0.0), std::exp(kI * (a / 2))};
  return r;
}

Mat2 phase_matrix(double a) {
  Mat2 r;
  r.m = {Complex(1.0), Complex(0.0), Complex(0.0), std::exp(kI * a)};
  return r;
}

Mat2 rot_matrix(double phi, double theta, double omega) {
  return rz_matrix(omega) * ry_matrix(theta) * rz_matrix(phi);
}

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ValidationError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex(0.0));
  amps_[0] = 1.0;
}

Statevector Statevector::from_amplitudes(std::vector<Complex> amplitudes) {
  const std::size_t dim = amplitudes.size();
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw ValidationError("amplitude count " + std::to_string(dim) + " is not a power of two >= 2");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if (n > kMaxQubits) throw ValidationError("statevector exceeds " + std::to_string(kMaxQubits) + " qubits");
  double norm = 0.0;
  for (const auto& a : amplitudes) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-10) throw ValidationError("statevector is not normalized");
  return Statevector(n, std::move(amplitudes));
}

Statevector Statevector::basis(int n_qubits, std::uint64_t index) {
  Statevector s(n_qubits);
  if (index >= s.dim()) throw ValidationError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double Statevector::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::Phase: return "PHASE";
    case GateKind::Rot: return "ROT";
    case GateKind::CRX: return "CRX";
    case GateKind::CNOT: return "CNOT";
    case GateKind::Fused1Q: return "FUSED1Q";
  }
  return "?";
}

std::string_view to_string(LayerTag tag) {
  switch (tag) {
    case LayerTag::PreEncoding: return "pre-encoding";
    case LayerTag::Encoding: return "encoding";
    case LayerTag::PostEncoding: return "post-encoding";
    case LayerTag::Variational: return "variational";
    case LayerTag::Other: return "other";
  }
  return "?";
}

GateKind gate_kind_from_string(std::string_view s) {
  for (auto k : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::Phase, GateKind::Rot, GateKind::CRX,
                 GateKind::CNOT, GateKind::Fused1Q}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown gate kind '" + std::string(s) + "'");
}

LayerTag layer_tag_from_string(std::string_view s) {
  for (auto t : {LayerTag::PreEncoding, LayerTag::Encoding, LayerTag::PostEncoding, LayerTag::Variational,
                 LayerTag::Other}) {
    if (to_string(t) == s) return t;
  }
  throw ValidationError("unknown layer tag '" + std::string(s) + "'");
}

int gate_arity(GateKind kind) { return (kind == GateKind::CRX || kind == GateKind::CNOT) ? 2 : 1; }

int gate_param_count(GateKind kind) {
  switch (kind) {
    case GateKind::Rot: return 3;
    case GateKind::CNOT:
    case GateKind::Fused1Q: return 0;
    default: return 1;
  }
}

GateOp GateOp::rx(int q, double a, LayerTag tag) { return make(GateKind::RX, q, -1, {a, 0, 0}, tag); }
GateOp GateOp::ry(int q, double a, LayerTag tag) { return make(GateKind::RY, q, -1, {a, 0, 0}, tag); }
GateOp GateOp::rz(int q, double a, LayerTag tag) { return make(GateKind::RZ, q, -1, {a, 0, 0}, tag); }
GateOp GateOp::phase(int q, double a, LayerTag tag) { return make(GateKind::Phase, q, -1, {a, 0, 0}, tag); }
GateOp GateOp::rot(int q, double phi, double theta, double omega, LayerTag tag) {
  return make(GateKind::Rot, q, -1, {phi, theta, omega}, tag);
}
GateOp GateOp::crx(int c, int t, double a, LayerTag tag) { return make(GateKind::CRX, c, t, {a, 0, 0}, tag); }
GateOp GateOp::cnot(int c, int t, LayerTag tag) { return make(GateKind::CNOT, c, t, {}, tag); }

GateOp GateOp::fused(int q, const Mat2& u, LayerTag tag) {
  if (!is_unitary(u)) throw ValidationError("FUSED1Q matrix is not unitary");
  GateOp op = make(GateKind::Fused1Q, q, -1, {}, tag);
  op.matrix = u;
  return op;
}

Mat2 gate_matrix(const GateOp& op) {
  const auto& p = op.params;
  switch (op.kind) {
    case GateKind::RX:
    case GateKind::CRX: return rx_matrix(p[0]);
    case GateKind::RY: return ry_matrix(p[0]);
    case GateKind::RZ: return rz_matrix(p[0]);
    case GateKind::Phase: return phase_matrix(p[0]);
    case GateKind::Rot: return rot_matrix(p[0], p[1], p[2]);
    case GateKind::CNOT: {
      Mat2 x;
      x.m = {Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)};
      return x;
    }
    case GateKind::Fused1Q: return op.matrix;
  }
  return {};
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ValidationError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
  }
}

void Circuit::append(GateOp op) {
  check_qubits(op, n_qubits_);
  if (op.kind == GateKind::Fused1Q && !is_unitary(op.matrix)) {
    throw ValidationError("FUSED1Q matrix is not unitary");
  }
  if (op.trainable) {
    if (op.n_params() == 0) throw ValidationError(std::string(to_string(op.kind)) + " has no trainable slot");
    if (op.feature_index >= 0) throw ValidationError("an op cannot be both trainable and feature-bound");
    if (op.layer != LayerTag::Variational) {
      throw StructuralError(std::string(to_string(op.kind)) + " in the " + std::string(to_string(op.layer)) +
                            " layer cannot be trainable");
    }
    op.param_offset = n_params_;
    n_params_ += op.n_params();
  } else {
    op.param_offset = -1;
  }
  ops_.push_back(op);
}

void Circuit::append(std::span<const GateOp> ops) {
  for (const auto& op : ops) append(op);
}

std::vector<Circuit::ParamRef> Circuit::param_refs() const {
  std::vector<ParamRef> refs;
  refs.reserve(static_cast<std::size_t>(n_params_));
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (!ops_[i].trainable) continue;
    for (int s = 0; s < ops_[i].n_params(); ++s) refs.push_back({i, s});
  }
  return refs;
}

std::vector<double> Circuit::stored_params() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_params_));
  for (const auto& op : ops_) {
    if (!op.trainable) continue;
    for (int s = 0; s < op.n_params(); ++s) out.push_back(op.params[static_cast<std::size_t>(s)]);
  }
  return out;
}

Circuit Circuit::bound(Bindings b) const {
  Circuit c = *this;
  for (auto& op : c.ops_) {
    const int offset = op.param_offset;
    op = bind_op(op, b);
    op.param_offset = offset;
  }
  return c;
}

bool Circuit::has_layer(LayerTag tag) const {
  return std::any_of(ops_.begin(), ops_.end(), [tag](const GateOp& op) { return op.layer == tag; });
}

GateOp bind_op(const GateOp& op, Bindings b) {
  GateOp out = op;
  if (op.trainable && !b.params.empty()) {
    for (int s = 0; s < op.n_params(); ++s) {
      const auto idx = static_cast<std::size_t>(op.param_offset + s);
      if (op.param_offset < 0 || idx >= b.params.size()) throw ValidationError("parameter vector too short");
      out.params[static_cast<std::size_t>(s)] = b.params[idx];
    }
  }
  if (op.feature_index >= 0 && !b.features.empty()) {
    const auto idx = static_cast<std::size_t>(op.feature_index);
    if (idx >= b.features.size()) {
      throw ValidationError("feature index " + std::to_string(op.feature_index) + " beyond feature vector of length " +
                            std::to_string(b.features.size()));
    }
    out.params[0] = op.feature_scale * b.features[idx];
  }
  return out;
}

void apply_gate_inplace(Statevector& state, const GateOp& op) {
  const int n = state.n_qubits();
  check_qubits(op, n);
  if (op.kind == GateKind::Fused1Q && !is_unitary(op.matrix)) {
    throw ValidationError("FUSED1Q matrix is not unitary");
  }
  auto amps = state.mutable_amplitudes();
  switch (op.kind) {
    case GateKind::CNOT: apply_cnot(amps, n, op.qubits[0], op.qubits[1]); break;
    case GateKind::CRX: apply_controlled(amps, n, op.qubits[0], op.qubits[1], gate_matrix(op)); break;
    default: apply_1q(amps, n, op.qubits[0], gate_matrix(op)); break;
  }
}

Statevector apply_gate(Statevector state, const GateOp& op) {
  apply_gate_inplace(state, op);
  return state;
}

void run_inplace(const Circuit& circuit, Bindings b, Statevector& state) {
  if (state.n_qubits() != circuit.n_qubits()) {
    throw StructuralError("circuit has " + std::to_string(circuit.n_qubits()) + " qubits, state has " +
                          std::to_string(state.n_qubits()));
  }
  if (!b.params.empty() && b.params.size() != static_cast<std::size_t>(circuit.n_trainable_params())) {
    throw ValidationError("expected " + std::to_string(circuit.n_trainable_params()) + " parameters, got " +
                          std::to_string(b.params.size()));
  }
  for (const auto& op : circuit.ops()) {
    if ((op.trainable && !b.params.empty()) || (op.feature_index >= 0 && !b.features.empty())) {
      apply_gate_inplace(state, bind_op(op, b));
    } else {
      apply_gate_inplace(state, op);
    }
  }
}

Statevector simulate(const Circuit& circuit, Bindings b) {
  Statevector s(circuit.n_qubits());
  run_inplace(circuit, b, s);
  return s;
}

double expectation_z(const Statevector& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw StructuralError("measured qubit " + std::to_string(qubit) + " out of range");
  }
  const std::size_t bit = bit_of(state.n_qubits(), qubit);
  const auto amps = state.amplitudes();
  double z = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) z += (i & bit) ? -std::norm(amps[i]) : std::norm(amps[i]);
  return std::clamp(z, -1.0, 1.0);
}

std::vector<double> probabilities(const Statevector& state) {
  std::vector<double> p(state.dim());
  const auto amps = state.amplitudes();
  std::transform(amps.begin(), amps.end(), p.begin(), [](const Complex& a) { return std::norm(a); });
  return p;
}

double sample_expectation_z(const Statevector& state, int qubit, int shots, std::mt19937_64& rng) {
  if (shots <= 0) throw ValidationError("shot count must be positive");
  const double p0 = std::clamp((1.0 + expectation_z(state, qubit)) / 2.0, 0.0, 1.0);
  std::binomial_distribution<int> draw(shots, p0);
  const int zeros = draw(rng);
  return (2.0 * zeros - shots) / shots;
}

double fidelity(const Statevector& a, const Statevector& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("fidelity between " + std::to_string(a.n_qubits()) + "- and " +
                          std::to_string(b.n_qubits()) + "-qubit states");
  }
  Complex overlap{0.0};
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) overlap += std::conj(x[i]) * y[i];
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

Circuit fuse_single_qubit_runs(const Circuit& circuit, Bindings b) {
  const int n = circuit.n_qubits();
  Circuit out(n);
  std::vector<std::vector<GateOp>> pending(static_cast<std::size_t>(n));

  auto flush = [&](int q) {
    auto& run = pending[static_cast<std::size_t>(q)];
    if (run.size() == 1) {
      out.append(run.front());
    } else if (run.size() > 1) {
      Mat2 u = Mat2::identity();
      LayerTag tag = run.front().layer;
      for (const auto& op : run) {
        u = gate_matrix(op) * u;
        if (op.layer != tag) tag = LayerTag::Other;
      }
      out.append(GateOp::fused(q, u, tag));
    }
    run.clear();
  };

  for (const auto& raw : circuit.ops()) {
    GateOp op = bind_op(raw, b);
    op.trainable = false;
    op.feature_index = -1;
    if (op.arity() == 1) {
      pending[static_cast<std::size_t>(op.qubits[0])].push_back(op);
    } else {
      flush(op.qubits[0]);
      flush(op.qubits[1]);
      out.append(op);
    }
  }
  for (int q = 0; q < n; ++q) flush(q);
  return out;
}

int circuit_depth(const Circuit& circuit) {
  std::vector<int> frontier(static_cast<std::size_t>(circuit.n_qubits()), 0);
  int depth = 0;
  for (const auto& op : circuit.ops()) {
    int layer = frontier[static_cast<std::size_t>(op.qubits[0])];
    if (op.arity() == 2) layer = std::max(layer, frontier[static_cast<std::size_t>(op.qubits[1])]);
    ++layer;
    frontier[static_cast<std::size_t>(op.qubits[0])] = layer;
    if (op.arity() == 2) frontier[static_cast<std::size_t>(op.qubits[1])] = layer;
    depth = std::max(depth, layer);
  }
  return depth;
}

std::vector<Complex> circuit_unitary(const Circuit& circuit, Bindings b) {
  const int n = circuit.n_qubits();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Complex> u(dim * dim);
  for (std::size_t col = 0; col < dim; ++col) {
    Statevector s = Statevector::basis(n, col);
    run_inplace(circuit, b, s);
    std::copy(s.amplitudes().begin(), s.amplitudes().end(), u.begin() + static_cast<std::ptrdiff_t>(col * dim));
  }
  return u;
}

}  // namespace qtrojan::qsim
