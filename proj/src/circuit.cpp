#include "dsp/circuit.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsp/errors.hpp"

namespace dsp {

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "SDG";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::Rx: return "RX";
    case GateKind::Ry: return "RY";
    case GateKind::Rz: return "RZ";
    case GateKind::U1q: return "U1Q";
    case GateKind::Cnot: return "CX";
  }
  return "?";
}

Gate Gate::cnot(int control, int target) {
  if (control == target) throw InputError("CNOT targets must be distinct");
  Gate g;
  g.kind = GateKind::Cnot;
  g.q0 = control;
  g.q1 = target;
  return g;
}

Gate Gate::u1q(int q, const Eigen::Matrix2cd& u, const Tolerances& tol) {
  if (!is_unitary(u, tol.unitarity))
    throw InputError("U1Q payload is not unitary within tolerance");
  Gate g;
  g.kind = GateKind::U1q;
  g.q0 = q;
  g.payload = u;
  return g;
}

std::vector<int> Gate::targets() const {
  if (is_two_qubit()) return {q0, q1};
  return {q0};
}

Eigen::Matrix2cd rotation_matrix(GateKind kind, double theta) {
  // exp(i theta P / 2) = cos(theta/2) I + i sin(theta/2) P
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  switch (kind) {
    case GateKind::Rx:
      m << Complex(c, 0), Complex(0, s), Complex(0, s), Complex(c, 0);
      return m;
    case GateKind::Ry:
      m << Complex(c, 0), Complex(s, 0), Complex(-s, 0), Complex(c, 0);
      return m;
    case GateKind::Rz:
      m << Complex(c, s), Complex(0, 0), Complex(0, 0), Complex(c, -s);
      return m;
    default:
      throw InputError("rotation_matrix: not a rotation kind");
  }
}

ComplexMatrix gate_matrix(const Gate& g) {
  switch (g.kind) {
    case GateKind::H: return hadamard();
    case GateKind::S: return phase_s();
    case GateKind::Sdg: return phase_sdg();
    case GateKind::X: return pauli_x();
    case GateKind::Y: return pauli_y();
    case GateKind::Z: return pauli_z();
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz: return rotation_matrix(g.kind, g.angle);
    case GateKind::U1q: return g.payload;
    case GateKind::Cnot: {
      // Control is the first (most significant) factor.
      ComplexMatrix m = ComplexMatrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 3) = 1;
      m(3, 2) = 1;
      return m;
    }
  }
  throw InputError("gate_matrix: unknown gate kind");
}

Gate adjoint(const Gate& g) {
  Gate out = g;
  switch (g.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::Cnot:
      return out;
    case GateKind::S:
      out.kind = GateKind::Sdg;
      return out;
    case GateKind::Sdg:
      out.kind = GateKind::S;
      return out;
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
      out.angle = -g.angle;
      return out;
    case GateKind::U1q:
      out.payload = g.payload.adjoint().eval();
      return out;
  }
  throw InputError("adjoint: unknown gate kind");
}

void Circuit::append(const Gate& g) {
  for (int q : g.targets())
    if (q < 0 || q >= n_qubits)
      throw InputError("gate target out of range for register");
  gates.push_back(g);
}

void Circuit::extend(const Circuit& other) {
  for (const Gate& g : other.gates) append(g);
}

std::size_t Circuit::cnot_count() const {
  std::size_t count = 0;
  for (const Gate& g : gates)
    if (g.kind == GateKind::Cnot) ++count;
  return count;
}

Circuit inverse(const Circuit& c) {
  Circuit out(c.n_qubits);
  out.gates.reserve(c.gates.size());
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it)
    out.gates.push_back(adjoint(*it));
  return out;
}

ComplexMatrix unitary_of(const Circuit& c, const SimLimits& limits) {
  if (c.n_qubits > limits.max_unitary_qubits)
    throw InputError("unitary_of: register exceeds the dense-unitary cap");
  const int dim = 1 << c.n_qubits;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const Gate& g : c.gates)
    u = embed(gate_matrix(g), g.targets(), c.n_qubits) * u;
  return u;
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (word[i] != 'I') out.push_back(i);
  return out;
}

PauliString parse_pauli(const std::string& text) {
  if (text.empty()) throw InputError("empty Pauli string");
  for (char ch : text)
    if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z')
      throw InputError(std::string("invalid Pauli letter '") + ch + "'");
  return PauliString{text};
}

std::string format_pauli(const PauliString& p) { return p.word; }

ComplexMatrix pauli_matrix(const PauliString& p) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char ch : p.word) {
    switch (ch) {
      case 'I': out = kron(out, pauli_i()); break;
      case 'X': out = kron(out, pauli_x()); break;
      case 'Y': out = kron(out, pauli_y()); break;
      case 'Z': out = kron(out, pauli_z()); break;
      default: throw InputError("invalid Pauli letter");
    }
  }
  return out;
}

void Observable::validate() const {
  const int n = n_qubits();
  for (const auto& [coeff, pauli] : terms) {
    if (!std::isfinite(coeff)) throw InputError("observable coefficient not finite");
    if (pauli.size() != n) throw InputError("observable terms differ in length");
  }
}

ComplexMatrix observable_matrix(const Observable& o) {
  o.validate();
  const int dim = 1 << o.n_qubits();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (const auto& [coeff, pauli] : o.terms) out += coeff * pauli_matrix(pauli);
  return out;
}

Circuit ParsedCircuit::bind(double theta) const {
  Circuit out = circuit;
  for (const auto& [index, multiplier] : theta_slots)
    out.gates[index].angle = multiplier * theta;
  return out;
}

const Circuit& ParsedCircuit::fixed() const {
  if (has_theta())
    throw InputError("circuit has an unbound theta parameter");
  return circuit;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    tokens.push_back(tok);
  }
  return tokens;
}

int parse_qubit(const std::string& tok, int line_no) {
  try {
    size_t used = 0;
    const int q = std::stoi(tok, &used);
    if (used != tok.size() || q < 0) throw std::invalid_argument("");
    return q;
  } catch (const std::exception&) {
    throw InputError("line " + std::to_string(line_no) + ": bad qubit index '" +
                     tok + "'");
  }
}

double parse_double(const std::string& tok, int line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw InputError("line " + std::to_string(line_no) + ": bad number '" + tok +
                     "'");
  }
}

// Angle token: float, `theta`, `-theta`, or `<float>*theta`. Returns the
// fixed angle, or the theta multiplier via `multiplier`.
double parse_angle(const std::string& tok, int line_no, bool& is_theta,
                   double& multiplier) {
  is_theta = false;
  if (tok == "theta") {
    is_theta = true;
    multiplier = 1.0;
    return 0.0;
  }
  if (tok == "-theta") {
    is_theta = true;
    multiplier = -1.0;
    return 0.0;
  }
  if (const auto star = tok.find("*theta");
      star != std::string::npos && star + 6 == tok.size()) {
    is_theta = true;
    multiplier = parse_double(tok.substr(0, star), line_no);
    return 0.0;
  }
  return parse_double(tok, line_no);
}

}  // namespace

ParsedCircuit parse_circuit_text(const std::string& text) {
  ParsedCircuit out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    if (!have_header) {
      if (tokens[0] != "QUBITS" || tokens.size() != 2)
        throw InputError("line " + std::to_string(line_no) +
                         ": expected 'QUBITS n' header");
      const int n = parse_qubit(tokens[1], line_no);
      if (n < 1) throw InputError("register must have at least one qubit");
      out.circuit = Circuit(n);
      have_header = true;
      continue;
    }

    const std::string& op = tokens[0];
    auto expect = [&](std::size_t count) {
      if (tokens.size() != count)
        throw InputError("line " + std::to_string(line_no) + ": '" + op +
                         "' expects " + std::to_string(count - 1) + " argument(s)");
    };

    try {
      if (op == "H" || op == "S" || op == "SDG" || op == "X" || op == "Y" ||
          op == "Z") {
        expect(2);
        const int q = parse_qubit(tokens[1], line_no);
        if (op == "H") out.circuit.append(Gate::h(q));
        else if (op == "S") out.circuit.append(Gate::s(q));
        else if (op == "SDG") out.circuit.append(Gate::sdg(q));
        else if (op == "X") out.circuit.append(Gate::x(q));
        else if (op == "Y") out.circuit.append(Gate::y(q));
        else out.circuit.append(Gate::z(q));
      } else if (op == "RX" || op == "RY" || op == "RZ") {
        expect(3);
        const int q = parse_qubit(tokens[1], line_no);
        bool is_theta = false;
        double multiplier = 0.0;
        const double angle = parse_angle(tokens[2], line_no, is_theta, multiplier);
        Gate g = op == "RX"   ? Gate::rx(q, angle)
                 : op == "RY" ? Gate::ry(q, angle)
                              : Gate::rz(q, angle);
        out.circuit.append(g);
        if (is_theta)
          out.theta_slots.emplace_back(out.circuit.gates.size() - 1, multiplier);
      } else if (op == "CX") {
        expect(3);
        out.circuit.append(Gate::cnot(parse_qubit(tokens[1], line_no),
                                      parse_qubit(tokens[2], line_no)));
      } else if (op == "U1Q") {
        expect(10);
        const int q = parse_qubit(tokens[1], line_no);
        double v[8];
        for (int i = 0; i < 8; ++i) v[i] = parse_double(tokens[2 + i], line_no);
        Eigen::Matrix2cd u;
        u << Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5]),
            Complex(v[6], v[7]);
        out.circuit.append(Gate::u1q(q, u));
      } else {
        throw InputError("line " + std::to_string(line_no) + ": unknown gate '" +
                         op + "'");
      }
    } catch (const InputError& err) {
      // Re-tag errors thrown by append/u1q with the offending line.
      std::string what = err.what();
      if (what.rfind("line ", 0) == 0) throw;
      throw InputError("line " + std::to_string(line_no) + ": " + what);
    }
  }

  if (!have_header) throw InputError("missing 'QUBITS n' header");
  return out;
}

ParsedCircuit load_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open circuit file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_circuit_text(buffer.str());
}

namespace {

std::string format_angle(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string format_circuit(const Circuit& c) {
  std::ostringstream out;
  out << "QUBITS " << c.n_qubits << "\n";
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::H:
      case GateKind::S:
      case GateKind::Sdg:
      case GateKind::X:
      case GateKind::Y:
      case GateKind::Z:
        out << gate_name(g.kind) << " " << g.q0 << "\n";
        break;
      case GateKind::Rx:
      case GateKind::Ry:
      case GateKind::Rz:
        out << gate_name(g.kind) << " " << g.q0 << " " << format_angle(g.angle)
            << "\n";
        break;
      case GateKind::Cnot:
        out << "CX " << g.q0 << " " << g.q1 << "\n";
        break;
      case GateKind::U1q: {
        out << "U1Q " << g.q0;
        for (int r = 0; r < 2; ++r)
          for (int col = 0; col < 2; ++col)
            out << " " << format_angle(g.payload(r, col).real()) << " "
                << format_angle(g.payload(r, col).imag());
        out << "\n";
        break;
      }
    }
  }
  return out.str();
}

}  // namespace dsp
