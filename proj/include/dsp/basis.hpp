#pragma once

#include <utility>

#include "dsp/circuit.hpp"

namespace dsp {

enum class Topology { all_to_all, linear };

const char* topology_name(Topology t);
Topology parse_topology(const std::string& name);

// The compiled measurement-basis transformation B with B sigma B^dag =
// Z_pivot, containing only H, S/SDG and CNOT gates. On the linear topology
// every CNOT is nearest-neighbor.
struct CompiledBasis {
  Circuit circuit;
  int pivot = 0;
  Topology topology = Topology::all_to_all;
};

// Single-qubit layer: per qubit I,Z -> nothing; X -> H; Y -> SDG then H
// (S^3 = S^dag exactly for the phase gate). Returns the layer and the
// conjugated string, which has Z wherever the input had X, Y or Z.
std::pair<Circuit, PauliString> compile_single_qubit_layer(const PauliString& sigma);

// Pivot = lowest-index qubit with a non-identity letter; one CNOT(i -> pivot)
// per other Z-bearing qubit of the conjugated string, ascending. At most
// n-1 CNOTs.
CompiledBasis compile_all_to_all(const PauliString& sigma);

// Pivot = qubit 0. Sweeps the highest Z-bearing qubit down to the pivot with
// nearest-neighbor CNOT blocks: qubits carrying Z merge with one CNOT,
// identity qubits are hopped over with two. At most 2(n-1) CNOTs.
CompiledBasis compile_linear(const PauliString& sigma);

CompiledBasis compile_basis(const PauliString& sigma, Topology t);

}  // namespace dsp
