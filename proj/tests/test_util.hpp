#pragma once

#include <cmath>

#include "dsp/circuit.hpp"
#include "dsp/linalg.hpp"
#include "dsp/rng.hpp"

namespace dsp::test {

inline ComplexMatrix random_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

inline ComplexMatrix random_hermitian(int dim, Rng& rng) {
  const ComplexMatrix m = random_matrix(dim, dim, rng);
  return 0.5 * (m + m.adjoint());
}

inline ComplexVector random_state(int dim, Rng& rng) {
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
  v.normalize();
  return v;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Statevector from a circuit applied to |0...0>.
inline ComplexVector output_state(const Circuit& c) {
  ComplexVector psi = ComplexVector::Zero(1 << c.n_qubits);
  psi(0) = 1.0;
  return unitary_of(c) * psi;
}

}  // namespace dsp::test
