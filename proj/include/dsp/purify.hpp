#pragma once

#include "dsp/linalg.hpp"
#include "dsp/tolerances.hpp"

namespace dsp {

enum class Method { raw, dsp_projective, dsp_pauli, dsp_tomography, analytic };

const char* method_name(Method m);

struct MitigatedEstimate {
  double value = 0.0;
  Method method = Method::raw;
  // Diagnostics; fields are only meaningful for the methods that set them.
  double p_tilde = 0.0;
  double denominator = 0.0;
  double cond_y_abs = 0.0;
  double tomo_purity = 0.0;
};

// (p00 - p01) / p0 from the no-ancilla pipeline probabilities.
MitigatedEstimate estimate_projective(
    double p00, double p01, double p0,
    double floor = default_tolerances().denominator_floor);

// cond_z / (1 + cond_x) from the ancilla pipeline. Throws
// SimulationError("denominator collapse...") when 1 + cond_x hits the floor.
MitigatedEstimate estimate_pauli(
    double cond_z, double cond_x,
    double floor = default_tolerances().denominator_floor);

// Builds rho_a = (I + xX + yY + zZ)/2, rescales an unphysical Bloch vector
// (norm > 1, possible under shot noise) back to the unit sphere, replaces the
// state by its dominant eigenvector, and evaluates cond_z/(1 + cond_x) on
// that pure state.
MitigatedEstimate tomography_purify(double x, double y, double z,
                                    const Tolerances& tol = default_tolerances());

// Closed-form noiseless ancilla statistics as a function of z = <psi|Z_1|psi>.
struct NoiselessReference {
  double p_tilde;
  double x;
  double y;
  double z;
};

NoiselessReference noiseless_reference(double z);

// Fidelity of the purified equal-error-probability state: F^2/(F^2 + p^2/M).
double equal_error_fidelity(double f, double p, int m);

}  // namespace dsp
