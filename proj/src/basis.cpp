#include "dsp/basis.hpp"

#include "dsp/errors.hpp"

namespace dsp {

const char* topology_name(Topology t) {
  return t == Topology::all_to_all ? "all-to-all" : "linear";
}

Topology parse_topology(const std::string& name) {
  if (name == "all-to-all" || name == "all_to_all") return Topology::all_to_all;
  if (name == "linear") return Topology::linear;
  throw InputError("unknown topology: " + name);
}

std::pair<Circuit, PauliString> compile_single_qubit_layer(const PauliString& sigma) {
  if (sigma.is_identity())
    throw InputError("basis compiler: identity string has no measurement basis");
  Circuit layer(sigma.size());
  PauliString conjugated{std::string(sigma.word.size(), 'I')};
  for (int q = 0; q < sigma.size(); ++q) {
    switch (sigma.word[q]) {
      case 'I':
        break;
      case 'Z':
        conjugated.word[q] = 'Z';
        break;
      case 'X':
        layer.append(Gate::h(q));
        conjugated.word[q] = 'Z';
        break;
      case 'Y':
        // (H S^3) Y (H S^3)^dag = Z, with S^3 = SDG exactly.
        layer.append(Gate::sdg(q));
        layer.append(Gate::h(q));
        conjugated.word[q] = 'Z';
        break;
      default:
        throw InputError("invalid Pauli letter");
    }
  }
  return {layer, conjugated};
}

CompiledBasis compile_all_to_all(const PauliString& sigma) {
  auto [circuit, conjugated] = compile_single_qubit_layer(sigma);

  CompiledBasis out;
  out.topology = Topology::all_to_all;
  out.pivot = -1;
  for (int q = 0; q < conjugated.size(); ++q) {
    if (conjugated.word[q] != 'Z') continue;
    if (out.pivot < 0) {
      out.pivot = q;
      continue;
    }
    // CNOT(q -> pivot) merges Z_q Z_pivot into Z_pivot.
    circuit.append(Gate::cnot(q, out.pivot));
  }
  out.circuit = std::move(circuit);
  return out;
}

CompiledBasis compile_linear(const PauliString& sigma) {
  auto [circuit, conjugated] = compile_single_qubit_layer(sigma);

  CompiledBasis out;
  out.topology = Topology::linear;
  out.pivot = 0;

  int highest = -1;
  for (int q = 0; q < conjugated.size(); ++q)
    if (conjugated.word[q] == 'Z') highest = q;

  // Sweep the accumulated Z from `highest` down to qubit 0 with
  // nearest-neighbor blocks: a Z-bearing qubit merges with one CNOT, an
  // identity qubit is hopped over with two.
  for (int q = highest - 1; q >= 0; --q) {
    if (conjugated.word[q] == 'Z') {
      circuit.append(Gate::cnot(q + 1, q));
    } else {
      circuit.append(Gate::cnot(q, q + 1));
      circuit.append(Gate::cnot(q + 1, q));
    }
  }
  out.circuit = std::move(circuit);
  return out;
}

CompiledBasis compile_basis(const PauliString& sigma, Topology t) {
  return t == Topology::all_to_all ? compile_all_to_all(sigma)
                                   : compile_linear(sigma);
}

}  // namespace dsp
