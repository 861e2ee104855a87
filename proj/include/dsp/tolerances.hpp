#pragma once

namespace dsp {

// Numerical tolerances and floors used across the library, centralized so
// tests and callers tighten or relax them together.
struct Tolerances {
  double hermiticity = 1e-10;        // max element of |M - M^dag|
  double unitarity = 1e-10;          // max element of |U^dag U - I|
  double kraus_completeness = 1e-12; // max element of |sum K^dag K - I|
  double eig_reconstruction = 1e-12;
  double degenerate_gap = 1e-12;     // 2x2 eigenvalue gap treated as degenerate
  double bloch_degenerate = 1e-9;    // Bloch norm below which no dominant axis exists
  double post_selection_floor = 1e-12;
  double denominator_floor = 1e-12;
};

const Tolerances& default_tolerances();

// Hard size caps for dense simulation. A density matrix holds 4^n complex
// entries and each gate application costs O(4^n), so these are memory caps,
// not performance suggestions.
struct SimLimits {
  int max_unitary_qubits = 12;
  int max_density_qubits = 13;
};

const SimLimits& default_limits();

}  // namespace dsp
