#pragma once

#include <cstdint>
#include <vector>

#include "dsp/circuit.hpp"
#include "dsp/linalg.hpp"
#include "dsp/noise.hpp"

namespace dsp {

// Dense density matrix over n qubits. The trace is carried explicitly:
// forward states have unit trace, but dual states under non-unital noise
// do not (they are positive operators, not normalized states).
struct DensityMatrix {
  int n_qubits = 0;
  ComplexMatrix matrix;

  static DensityMatrix zero_state(int n);
  static DensityMatrix pure(const ComplexVector& psi);

  int dim() const { return 1 << n_qubits; }
  double trace() const;
  double purity() const;  // Tr(rho^2) / Tr(rho)^2-free raw Tr(rho^2)
  // Hermiticity and finiteness; eigenvalue positivity is spot-checked in
  // tests, not here (it costs a full eigendecomposition).
  void validate(const Tolerances& tol = default_tolerances()) const;
};

// In-place kernels. `targets[j]` is the register qubit the j-th (most
// significant) factor of `op` acts on.
void apply_matrix_left(ComplexMatrix& m, const ComplexMatrix& op,
                       const std::vector<int>& targets, int n_qubits);
void apply_matrix_right(ComplexMatrix& m, const ComplexMatrix& op,
                        const std::vector<int>& targets, int n_qubits);
// rho <- U rho U^dag
void apply_unitary(ComplexMatrix& rho, const ComplexMatrix& u,
                   const std::vector<int>& targets, int n_qubits);
void apply_gate(ComplexMatrix& rho, const Gate& g, int n_qubits);
// rho <- sum_k K rho K^dag
void apply_channel(ComplexMatrix& rho, const KrausChannel& ch,
                   const std::vector<int>& targets, int n_qubits);
// m <- sum_k K^dag m K  (the Hilbert-Schmidt dual map)
void apply_channel_dual(ComplexMatrix& m, const KrausChannel& ch,
                        const std::vector<int>& targets, int n_qubits);

// Tr(sigma * rho) for a Pauli word, O(2^n) via the permutation structure.
double expectation_pauli(const ComplexMatrix& rho, const PauliString& sigma);
double expectation_pauli_state(const ComplexVector& psi, const PauliString& sigma);

// All-zeros register state deformed by the model's preparation flips.
DensityMatrix initial_state(const NoiseModel& nm, int n_qubits);
// Tensor product over qubits of each outcome-0 measurement POVM element.
ComplexMatrix final_povm_zero(const NoiseModel& nm, int n_qubits);

// Applies each gate's unitary conjugation then its attached noise channel,
// in circuit order.
DensityMatrix run_forward(const Circuit& c, const NoiseModel& nm,
                          const DensityMatrix& init);

// Dual pass: with the noisy inverse circuit written as a composition of
// elementary channels, the dual map applies the elementary duals in
// REVERSED order with every Kraus operator replaced by its adjoint. Walking
// c_inv backwards therefore applies the original circuit's gates in original
// order, interleaved with dual noise channels. `boundary` is |0...0><0...0|
// or, with measurement errors, the POVM element from final_povm_zero.
DensityMatrix run_dual(const Circuit& c_inv, const NoiseModel& nm,
                       const ComplexMatrix& boundary);

// Tr(O (rho rhobar + rhobar rho)/2) / Tr((rho rhobar + rhobar rho)/2).
// Throws SimulationError("purification denominator vanished") below floor.
double analytic_estimate(const DensityMatrix& rho, const DensityMatrix& rho_bar,
                         const ComplexMatrix& obs,
                         double floor = default_tolerances().denominator_floor);

struct PipelineOptions {
  // Switches off the intermediate measurement's own noise: the ancilla CNOT
  // channel and ancilla readout error (ancilla pipeline), or the pivot flip
  // on the intermediate outcome (no-ancilla pipeline). Final-measurement
  // errors stay on.
  bool ideal_intermediate = false;
  // 0 = exact expectations; otherwise multinomial sampling of outcome
  // distributions with this many shots per measured basis.
  long shots = 0;
  std::uint64_t shot_seed = 0;
};

struct PipelineResult {
  // No-ancilla mode: joint probabilities of intermediate outcome b and final
  // all-zeros, plus the idle-intermediate denominator probability.
  double p_tilde_b0 = 0.0;
  double p_tilde_b1 = 0.0;
  double p_zero = 0.0;
  // Ancilla mode: conditional ancilla Pauli expectations given the final
  // all-zeros outcome, and the post-selection probability.
  double cond_x = 0.0;
  double cond_y = 0.0;
  double cond_z = 0.0;
  double p_tilde = 0.0;
};

// Full circuit is U = b·a (a first). The intermediate step acts on `pivot`.
//
// No-ancilla mode runs two noisy simulations: intermediate idle for the
// denominator probability, and a projective intermediate measurement on the
// pivot for the joint probabilities.
PipelineResult run_pipeline_no_ancilla(const Circuit& a, const Circuit& b,
                                       int pivot, const NoiseModel& nm,
                                       const PipelineOptions& opt = {});

// Ancilla mode simulates on n+1 qubits: U, CNOT(pivot -> ancilla) with its
// pair channel, U^dag, then final register measurement; the ancilla's
// conditional state supplies cond_x/cond_y/cond_z.
PipelineResult run_pipeline_ancilla(const Circuit& a, const Circuit& b,
                                    int pivot, const NoiseModel& nm,
                                    const PipelineOptions& opt = {});

// Multinomial counts for a normalized distribution; deterministic in rng.
std::vector<long> sample_counts(const std::vector<double>& probs, long shots,
                                Rng& rng);

// Reported noisy expectation of a Pauli observable measured directly on
// `rho`: support qubits are rotated to the Z basis, each support qubit's
// measurement-site error is applied, and the Z-word read out.
double measure_observable_noisy(const DensityMatrix& rho,
                                const PauliString& sigma,
                                const NoiseModel& nm);

}  // namespace dsp
