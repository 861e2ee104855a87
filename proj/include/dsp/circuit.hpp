#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dsp/linalg.hpp"

namespace dsp {

enum class GateKind { H, S, Sdg, X, Y, Z, Rx, Ry, Rz, U1q, Cnot };

const char* gate_name(GateKind kind);

// One gate application. Single-qubit kinds use q0; CNOT uses q0 as control
// and q1 as target. Rotation kinds carry an angle, U1q carries an arbitrary
// 2x2 unitary payload.
struct Gate {
  GateKind kind = GateKind::H;
  int q0 = 0;
  int q1 = -1;
  double angle = 0.0;
  Eigen::Matrix2cd payload = Eigen::Matrix2cd::Zero();

  static Gate h(int q) { return {GateKind::H, q}; }
  static Gate s(int q) { return {GateKind::S, q}; }
  static Gate sdg(int q) { return {GateKind::Sdg, q}; }
  static Gate x(int q) { return {GateKind::X, q}; }
  static Gate y(int q) { return {GateKind::Y, q}; }
  static Gate z(int q) { return {GateKind::Z, q}; }
  static Gate rx(int q, double theta) { return {GateKind::Rx, q, -1, theta}; }
  static Gate ry(int q, double theta) { return {GateKind::Ry, q, -1, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::Rz, q, -1, theta}; }
  static Gate cnot(int control, int target);
  // Validates unitarity of the payload.
  static Gate u1q(int q, const Eigen::Matrix2cd& u,
                  const Tolerances& tol = default_tolerances());

  bool is_two_qubit() const { return kind == GateKind::Cnot; }
  bool is_rotation() const {
    return kind == GateKind::Rx || kind == GateKind::Ry || kind == GateKind::Rz;
  }
  std::vector<int> targets() const;
};

// Rotation convention: R_P(theta) = exp(i*theta*P/2), so RZ(theta) =
// diag(e^{i theta/2}, e^{-i theta/2}). Flipping this sign silently corrupts
// every energy downstream; tests pin it.
Eigen::Matrix2cd rotation_matrix(GateKind kind, double theta);

// Dense matrix of a gate: 2x2, or 4x4 for CNOT with the control as the first
// (most significant) factor.
ComplexMatrix gate_matrix(const Gate& g);

Gate adjoint(const Gate& g);

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n) : n_qubits(n) {}

  // Validates gate targets against the register size.
  void append(const Gate& g);
  void extend(const Circuit& other);
  std::size_t cnot_count() const;
};

// Gates reversed, each replaced by its adjoint.
Circuit inverse(const Circuit& c);

// Product of embedded gate matrices in application order; the test oracle
// for everything else. Capped at limits.max_unitary_qubits.
ComplexMatrix unitary_of(const Circuit& c,
                         const SimLimits& limits = default_limits());

// Word over {I,X,Y,Z}; text position i addresses qubit i.
struct PauliString {
  std::string word;

  int size() const { return static_cast<int>(word.size()); }
  bool is_identity() const { return word.find_first_not_of('I') == std::string::npos; }
  std::vector<int> support() const;  // qubits with non-I letters
};

PauliString parse_pauli(const std::string& text);
std::string format_pauli(const PauliString& p);
ComplexMatrix pauli_matrix(const PauliString& p);

// Real-weighted sum of Pauli strings, all of equal length.
struct Observable {
  std::vector<std::pair<double, PauliString>> terms;

  int n_qubits() const { return terms.empty() ? 0 : terms.front().second.size(); }
  void validate() const;
};

ComplexMatrix observable_matrix(const Observable& o);

// Circuit text format, one gate per line (see README for the grammar):
//   QUBITS n
//   H q | S q | SDG q | X q | Y q | Z q
//   RX q angle | RY q angle | RZ q angle
//   CX control target
//   U1Q q a_re a_im b_re b_im c_re c_im d_re d_im
// '#' starts a comment. A rotation angle may be the literal `theta`,
// `-theta`, or `<float>*theta`, producing a one-parameter circuit that must
// be bound before simulation.
struct ParsedCircuit {
  Circuit circuit;
  // Gate index -> multiplier m; binding sets angle = m * theta.
  std::vector<std::pair<std::size_t, double>> theta_slots;

  bool has_theta() const { return !theta_slots.empty(); }
  Circuit bind(double theta) const;
  // The circuit as-is; throws InputError if a theta slot is unbound.
  const Circuit& fixed() const;
};

ParsedCircuit parse_circuit_text(const std::string& text);
ParsedCircuit load_circuit_file(const std::string& path);
std::string format_circuit(const Circuit& c);

}  // namespace dsp
