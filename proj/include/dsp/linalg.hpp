#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "dsp/rng.hpp"
#include "dsp/tolerances.hpp"

namespace dsp {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Qubit ordering convention, fixed here and used everywhere in this library:
// qubit 0 is the MOST significant bit of a basis-state index. A register
// state |q0 q1 ... q_{n-1}> has index q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}.
// Equivalently, qubit i occupies the i-th factor (from the left) of Kronecker
// products, and position i of a Pauli-string literal addresses qubit i.

const ComplexMatrix& pauli_i();
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& hadamard();
const ComplexMatrix& phase_s();
const ComplexMatrix& phase_sdg();

// Kronecker product, a-index major: result((i*rbuild)+k, ...) = a(i,j)*b(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Embeds a 2^k x 2^k operator acting on `targets` (gate factor j acts on
// register qubit targets[j]) into the full 2^n space, identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& op, const std::vector<int>& targets,
                    int n_qubits);

bool is_hermitian(const ComplexMatrix& m, double tol);
bool is_unitary(const ComplexMatrix& m, double tol);
bool all_finite(const ComplexMatrix& m);

// Closed-form eigendecomposition of a 2x2 Hermitian matrix, dominant
// eigenvector first. `degenerate` is set when the eigenvalue gap is below
// the configured threshold; eigenvectors are still valid but no axis is
// preferred and callers that need a dominant direction must not guess.
struct HermitianEig2 {
  std::array<double, 2> eigenvalues{};  // sorted descending
  std::array<Eigen::Vector2cd, 2> eigenvectors{};
  bool degenerate = false;
};

HermitianEig2 eig2_hermitian(const ComplexMatrix& m,
                             const Tolerances& tol = default_tolerances());

// Conditional state of the last qubit (the ancilla, least significant index
// position) given that a POVM element `final_povm` fired on the leading n
// qubits: rho_a = Tr_register[(final_povm (x) I) rho], unnormalized, plus its
// trace p_tilde. Throws SimulationError("post-selection starved") when
// p_tilde falls below `floor`.
std::pair<Eigen::Matrix2cd, double> conditional_ancilla_state(
    const ComplexMatrix& rho, const ComplexMatrix& final_povm,
    double floor = default_tolerances().post_selection_floor);

// Haar-distributed random unitary: complex Gaussian matrix, QR
// orthonormalization, then R-diagonal phase normalization.
ComplexMatrix haar_unitary(int dim, Rng& rng);

}  // namespace dsp
