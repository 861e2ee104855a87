#include "dsp/purify.hpp"

#include <cmath>

#include "dsp/errors.hpp"

namespace dsp {

const char* method_name(Method m) {
  switch (m) {
    case Method::raw: return "raw";
    case Method::dsp_projective: return "dsp_projective";
    case Method::dsp_pauli: return "dsp";
    case Method::dsp_tomography: return "tp";
    case Method::analytic: return "analytic";
  }
  return "?";
}

MitigatedEstimate estimate_projective(double p00, double p01, double p0,
                                      double floor) {
  if (p0 <= floor)
    throw SimulationError("purification denominator vanished");
  MitigatedEstimate est;
  est.method = Method::dsp_projective;
  est.value = (p00 - p01) / p0;
  est.denominator = p0;
  est.p_tilde = p00 + p01;
  return est;
}

MitigatedEstimate estimate_pauli(double cond_z, double cond_x, double floor) {
  const double denominator = 1.0 + cond_x;
  if (denominator <= floor)
    throw SimulationError("denominator collapse (ancilla near |->)");
  MitigatedEstimate est;
  est.method = Method::dsp_pauli;
  est.value = cond_z / denominator;
  est.denominator = denominator;
  return est;
}

MitigatedEstimate tomography_purify(double x, double y, double z,
                                    const Tolerances& tol) {
  const double raw_norm = std::sqrt(x * x + y * y + z * z);
  if (raw_norm < tol.bloch_degenerate)
    throw SimulationError("tomography degenerate - no dominant eigenvector");
  // A Bloch vector outside the unit sphere (shot noise) is pulled back onto
  // it; the dominant-eigenvector direction is unchanged by the rescale.
  if (raw_norm > 1.0) {
    x /= raw_norm;
    y /= raw_norm;
    z /= raw_norm;
  }

  ComplexMatrix rho_a =
      0.5 * (pauli_i() + x * pauli_x() + y * pauli_y() + z * pauli_z());
  const HermitianEig2 eig = eig2_hermitian(rho_a, tol);
  if (eig.degenerate)
    throw SimulationError("tomography degenerate - no dominant eigenvector");

  const Eigen::Vector2cd chi = eig.eigenvectors[0];
  const double chi_x = (chi.adjoint() * pauli_x() * chi)(0).real();
  const double chi_y = (chi.adjoint() * pauli_y() * chi)(0).real();
  const double chi_z = (chi.adjoint() * pauli_z() * chi)(0).real();

  MitigatedEstimate est = estimate_pauli(chi_z, chi_x);
  est.method = Method::dsp_tomography;
  est.cond_y_abs = std::abs(chi_y);
  // Purity of the measured (pre-purification) state.
  est.tomo_purity = 0.5 * (1.0 + raw_norm * raw_norm);
  return est;
}

NoiselessReference noiseless_reference(double z) {
  if (std::abs(z) > 1.0 + 1e-12)
    throw InputError("noiseless_reference: |z| must be <= 1");
  NoiselessReference ref;
  ref.p_tilde = 0.5 * (1.0 + z * z);
  ref.x = 1.0 / ref.p_tilde - 1.0;
  ref.y = 0.0;
  ref.z = z / ref.p_tilde;
  return ref;
}

double equal_error_fidelity(double f, double p, int m) {
  if (m < 1) throw InputError("equal_error_fidelity: m must be >= 1");
  if (f < 0 || p < 0 || f + p > 1.0 + 1e-12)
    throw InputError("equal_error_fidelity: need f, p >= 0 and f + p <= 1");
  return f * f / (f * f + p * p / m);
}

}  // namespace dsp
