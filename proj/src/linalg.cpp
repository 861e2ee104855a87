#include "dsp/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "dsp/errors.hpp"

namespace dsp {

namespace {

ComplexMatrix make2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

const ComplexMatrix& pauli_i() {
  static const ComplexMatrix m = make2(1, 0, 0, 1);
  return m;
}

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m = make2(0, 1, 1, 0);
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m = make2(0, Complex(0, -1), Complex(0, 1), 0);
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m = make2(1, 0, 0, -1);
  return m;
}

const ComplexMatrix& hadamard() {
  static const ComplexMatrix m = make2(1, 1, 1, -1) / std::sqrt(2.0);
  return m;
}

const ComplexMatrix& phase_s() {
  static const ComplexMatrix m = make2(1, 0, 0, Complex(0, 1));
  return m;
}

const ComplexMatrix& phase_sdg() {
  static const ComplexMatrix m = make2(1, 0, 0, Complex(0, -1));
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

// Bit position (LSB numbering) of register qubit q; qubit 0 is the MSB.
inline int bit_of(int q, int n) { return n - 1 - q; }

}  // namespace

ComplexMatrix embed(const ComplexMatrix& op, const std::vector<int>& targets,
                    int n_qubits) {
  const int k = static_cast<int>(targets.size());
  if (op.rows() != (1 << k) || op.cols() != (1 << k))
    throw InputError("embed: operator dimension does not match target count");
  for (int i = 0; i < k; ++i) {
    if (targets[i] < 0 || targets[i] >= n_qubits)
      throw InputError("embed: target out of range");
    for (int j = i + 1; j < k; ++j)
      if (targets[i] == targets[j]) throw InputError("embed: duplicate target");
  }

  const int dim = 1 << n_qubits;
  // Scatter gate index bits (gate factor 0 most significant) onto the
  // register bit positions of the targets.
  auto spread = [&](int gate_index) {
    int out = 0;
    for (int j = 0; j < k; ++j)
      if (gate_index >> (k - 1 - j) & 1) out |= 1 << bit_of(targets[j], n_qubits);
    return out;
  };
  int target_mask = 0;
  for (int j = 0; j < k; ++j) target_mask |= 1 << bit_of(targets[j], n_qubits);

  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int rest = 0; rest < dim; ++rest) {
    if (rest & target_mask) continue;
    for (int gi = 0; gi < (1 << k); ++gi)
      for (int gj = 0; gj < (1 << k); ++gj)
        out(rest | spread(gi), rest | spread(gj)) = op(gi, gj);
  }
  return out;
}

bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  ComplexMatrix gram = m.adjoint() * m;
  gram -= ComplexMatrix::Identity(m.rows(), m.cols());
  return gram.cwiseAbs().maxCoeff() <= tol;
}

HermitianEig2 eig2_hermitian(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != 2 || m.cols() != 2)
    throw InputError("eig2_hermitian: matrix must be 2x2");
  if (!is_hermitian(m, tol.hermiticity))
    throw InputError("eig2_hermitian: matrix not Hermitian within tolerance");

  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  // Use the symmetrized off-diagonal so tiny Hermiticity error cancels.
  const Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));

  const double mean = 0.5 * (a + d);
  const double half_gap = std::hypot(0.5 * (a - d), std::abs(b));

  HermitianEig2 out;
  out.eigenvalues = {mean + half_gap, mean - half_gap};
  out.degenerate = 2.0 * half_gap < tol.degenerate_gap;

  Eigen::Vector2cd v0, v1;
  if (std::abs(b) == 0.0) {
    if (a >= d) {
      v0 << 1, 0;
      v1 << 0, 1;
    } else {
      v0 << 0, 1;
      v1 << 1, 0;
    }
  } else {
    // (m - lambda1 I) annihilates v0; the kernel direction (b, lambda1 - a)
    // is nonzero because b != 0.
    v0 << b, Complex(out.eigenvalues[0] - a, 0.0);
    v0.normalize();
    // Orthogonal complement in 2 dimensions.
    v1 << -std::conj(v0(1)), std::conj(v0(0));
  }
  out.eigenvectors = {v0, v1};
  return out;
}

std::pair<Eigen::Matrix2cd, double> conditional_ancilla_state(
    const ComplexMatrix& rho, const ComplexMatrix& final_povm, double floor) {
  const Eigen::Index reg_dim = final_povm.rows();
  if (final_povm.cols() != reg_dim || rho.rows() != 2 * reg_dim ||
      rho.cols() != 2 * reg_dim)
    throw InputError("conditional_ancilla_state: dimension mismatch");

  // rho_a(a, a') = sum_{r, r'} povm(r, r') rho((r', a), (r, a')) with the
  // ancilla occupying the least significant index position.
  Eigen::Matrix2cd rho_a = Eigen::Matrix2cd::Zero();
  for (Eigen::Index r = 0; r < reg_dim; ++r)
    for (Eigen::Index rp = 0; rp < reg_dim; ++rp) {
      const Complex w = final_povm(r, rp);
      if (w == Complex(0, 0)) continue;
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap)
          rho_a(a, ap) += w * rho(2 * rp + a, 2 * r + ap);
    }

  const double p_tilde = rho_a.trace().real();
  if (p_tilde < floor) throw SimulationError("post-selection starved");
  return {rho_a, p_tilde};
}

ComplexMatrix haar_unitary(int dim, Rng& rng) {
  ComplexMatrix gauss(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      gauss(i, j) = Complex(rng.normal(), rng.normal());

  Eigen::HouseholderQR<ComplexMatrix> qr(gauss);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the R-diagonal phases; without this the distribution is not Haar.
  for (int j = 0; j < dim; ++j) {
    const Complex rd = r(j, j);
    const double len = std::abs(rd);
    const Complex phase = len > 0 ? rd / len : Complex(1, 0);
    q.col(j) *= phase;
  }
  return q;
}

}  // namespace dsp
