#include <doctest.h>

#include <cmath>

#include "dsp/basis.hpp"
#include "dsp/errors.hpp"
#include "test_util.hpp"

using namespace dsp;
using dsp::test::max_abs_diff;

namespace {

// The defining identity: unitary_of(B) sigma unitary_of(B)^dag = Z_pivot.
double identity_error(const CompiledBasis& basis, const PauliString& sigma) {
  const ComplexMatrix b = unitary_of(basis.circuit);
  const ComplexMatrix lhs = b * pauli_matrix(sigma) * b.adjoint();
  std::string z_word(sigma.size(), 'I');
  z_word[basis.pivot] = 'Z';
  return max_abs_diff(lhs, pauli_matrix(PauliString{z_word}));
}

std::string word_from_index(int index, int n) {
  const std::string letters = "IXYZ";
  std::string word(n, 'I');
  for (int q = 0; q < n; ++q) {
    word[q] = letters[index % 4];
    index /= 4;
  }
  return word;
}

}  // namespace

TEST_CASE("single-qubit layer conjugates letters to Z") {
  const auto [layer, conjugated] = compile_single_qubit_layer(parse_pauli("XIZX"));
  CHECK(conjugated.word == "ZIZZ");
  REQUIRE(layer.gates.size() == 2);
  CHECK(layer.gates[0].kind == GateKind::H);
  CHECK(layer.gates[0].q0 == 0);
  CHECK(layer.gates[1].kind == GateKind::H);
  CHECK(layer.gates[1].q0 == 3);

  const auto [empty_layer, unchanged] = compile_single_qubit_layer(parse_pauli("ZZZZ"));
  CHECK(empty_layer.gates.empty());
  CHECK(unchanged.word == "ZZZZ");

  // Y needs SDG then H; check the 2x2 conjugation directly.
  const auto [y_layer, y_word] = compile_single_qubit_layer(parse_pauli("YIII"));
  REQUIRE(y_layer.gates.size() == 2);
  CHECK(y_layer.gates[0].kind == GateKind::Sdg);
  CHECK(y_layer.gates[1].kind == GateKind::H);
  const ComplexMatrix r = hadamard() * phase_sdg();
  CHECK(max_abs_diff(r * pauli_y() * r.adjoint(), pauli_z()) < 1e-15);
  CHECK(y_word.word == "ZIII");

  CHECK_THROWS_AS(compile_single_qubit_layer(parse_pauli("III")), InputError);
}

TEST_CASE("all-to-all compilation of the worked example") {
  const CompiledBasis basis = compile_all_to_all(parse_pauli("XIZX"));
  CHECK(basis.pivot == 0);
  REQUIRE(basis.circuit.gates.size() == 4);
  CHECK(basis.circuit.gates[0].kind == GateKind::H);   // qubit 0
  CHECK(basis.circuit.gates[1].kind == GateKind::H);   // qubit 3
  CHECK(basis.circuit.gates[2].kind == GateKind::Cnot);
  CHECK(basis.circuit.gates[2].q0 == 2);
  CHECK(basis.circuit.gates[2].q1 == 0);
  CHECK(basis.circuit.gates[3].q0 == 3);
  CHECK(basis.circuit.gates[3].q1 == 0);
  CHECK(identity_error(basis, parse_pauli("XIZX")) < 1e-10);
}

TEST_CASE("all-to-all trivial cases") {
  const CompiledBasis z0 = compile_all_to_all(parse_pauli("ZIII"));
  CHECK(z0.pivot == 0);
  CHECK(z0.circuit.gates.empty());

  // Pivot relabeling when qubit 0 carries identity.
  const CompiledBasis late = compile_all_to_all(parse_pauli("IIYZ"));
  CHECK(late.pivot == 2);
  CHECK(identity_error(late, parse_pauli("IIYZ")) < 1e-10);

  CHECK_THROWS_AS(compile_all_to_all(parse_pauli("II")), InputError);
}

TEST_CASE("linear compilation of small cases") {
  const CompiledBasis zz = compile_linear(parse_pauli("ZZ"));
  CHECK(zz.pivot == 0);
  REQUIRE(zz.circuit.gates.size() == 1);
  CHECK(zz.circuit.gates[0].kind == GateKind::Cnot);
  CHECK(zz.circuit.gates[0].q0 == 1);
  CHECK(zz.circuit.gates[0].q1 == 0);
  CHECK(identity_error(zz, parse_pauli("ZZ")) < 1e-12);

  const CompiledBasis single = compile_linear(parse_pauli("Z"));
  CHECK(single.circuit.gates.empty());

  // Z..I..Z: the identity qubit is hopped over with two CNOTs.
  const CompiledBasis ziz = compile_linear(parse_pauli("ZIZ"));
  REQUIRE(ziz.circuit.gates.size() == 3);
  CHECK(ziz.circuit.gates[0].q0 == 1);
  CHECK(ziz.circuit.gates[0].q1 == 2);
  CHECK(ziz.circuit.gates[1].q0 == 2);
  CHECK(ziz.circuit.gates[1].q1 == 1);
  CHECK(ziz.circuit.gates[2].q0 == 1);
  CHECK(ziz.circuit.gates[2].q1 == 0);
  CHECK(identity_error(ziz, parse_pauli("ZIZ")) < 1e-12);
}

TEST_CASE("exhaustive identity check on both topologies") {
  for (int n = 1; n <= 4; ++n) {
    const int total = 1 << (2 * n);
    for (int index = 1; index < total; ++index) {
      const PauliString sigma = parse_pauli(word_from_index(index, n));
      if (sigma.is_identity()) continue;

      const CompiledBasis a2a = compile_all_to_all(sigma);
      CHECK(identity_error(a2a, sigma) < 1e-10);
      CHECK(a2a.circuit.cnot_count() <= static_cast<std::size_t>(n - 1 < 0 ? 0 : n - 1));

      const CompiledBasis lin = compile_linear(sigma);
      CHECK(identity_error(lin, sigma) < 1e-10);
      CHECK(lin.circuit.cnot_count() <= static_cast<std::size_t>(2 * (n - 1)));
      for (const Gate& g : lin.circuit.gates)
        if (g.kind == GateKind::Cnot) CHECK(std::abs(g.q0 - g.q1) == 1);
    }
  }
}

TEST_CASE("random identity checks at larger registers") {
  Rng rng(71);
  const std::string letters = "IXYZ";
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 5 + trial % 4;  // 5..8
    std::string word(n, 'I');
    while (PauliString{word}.is_identity())
      for (int q = 0; q < n; ++q) word[q] = letters[rng.uniform_int(0, 3)];
    const PauliString sigma{word};

    CHECK(identity_error(compile_all_to_all(sigma), sigma) < 1e-10);
    CHECK(identity_error(compile_linear(sigma), sigma) < 1e-10);
  }
}

TEST_CASE("compiled circuits use only H, S-family and CNOT gates") {
  Rng rng(72);
  const std::string letters = "IXYZ";
  for (int trial = 0; trial < 20; ++trial) {
    std::string word(5, 'I');
    word[rng.uniform_int(0, 4)] = 'Y';
    for (int q = 0; q < 5; ++q)
      if (word[q] == 'I' && rng.uniform01() < 0.5)
        word[q] = letters[rng.uniform_int(1, 3)];
    for (Topology t : {Topology::all_to_all, Topology::linear}) {
      const CompiledBasis basis = compile_basis(PauliString{word}, t);
      for (const Gate& g : basis.circuit.gates) {
        const bool allowed = g.kind == GateKind::H || g.kind == GateKind::S ||
                             g.kind == GateKind::Sdg || g.kind == GateKind::Cnot;
        CHECK(allowed);
      }
    }
  }
}
