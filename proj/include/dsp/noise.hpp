#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dsp/circuit.hpp"
#include "dsp/linalg.hpp"

namespace dsp {

// Completely positive trace-preserving map as an explicit Kraus list.
// When every Kraus operator is sqrt(w) * (Pauli word), `pauli_terms` carries
// that structure so the simulator can conjugate by bit permutations instead
// of dense matrix products; the two application paths are equivalent and
// cross-checked in tests.
struct KrausChannel {
  int arity = 1;
  std::vector<ComplexMatrix> kraus_ops;

  struct PauliTerm {
    double weight;
    std::string word;  // length == arity, letters IXYZ
  };
  std::vector<PauliTerm> pauli_terms;

  bool is_pauli_mixture() const { return !pauli_terms.empty(); }
  int dim() const { return 1 << arity; }

  // Throws InputError unless sum K^dag K = I within tol.
  void validate(double tol = default_tolerances().kraus_completeness) const;
  bool is_trace_preserving(double tol = default_tolerances().kraus_completeness) const;
  bool is_unital(double tol = default_tolerances().kraus_completeness) const;

  static KrausChannel identity(int arity);
};

// Mixture (1 - eps)[I] + (eps/3)(X[.]X + Y[.]Y + Z[.]Z). Requires
// 0 <= eps <= 3/4.
KrausChannel depolarizing_1q(double eps);

// Mixture (1 - 16 eps/15)[I] + (eps/15) sum over all 16 two-qubit Pauli
// pairs. Requires 0 <= eps <= 15/16.
KrausChannel depolarizing_2q(double eps);

// (1 - eta)[I] + eta [Z].
KrausChannel dephasing(double eta);

// K0 = |0><0| + sqrt(1-delta)|1><1|, K1 = sqrt(delta)|0><1|.
KrausChannel amplitude_damping(double delta);

// Kraus set of outer∘inner (inner applied first): all pairwise products.
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);

// Lifts a single-qubit channel to a two-qubit channel acting on factor
// `slot` (0 = most significant) of the pair.
KrausChannel lift_1q_to_2q(const KrausChannel& ch, int slot);

// Error map attached after an ideal CNOT on the ordered pair (i, j):
// A_j(delta_j) ∘ A_i(delta_i) ∘ D_j(eta_j) ∘ D_i(eta_i) ∘ E_ij(eps_p),
// realized as Kraus-set products in that exact order.
KrausChannel cnot_composite_channel(double eps_p, double eta_i, double eta_j,
                                    double delta_i, double delta_j);

// Per-qubit measurement-site error: a classical outcome flip with
// probability `flip`, and/or the pre-measurement channel A(damp)∘E(dep)
// applied before ideal readout.
struct MeasurementNoise {
  double flip = 0.0;
  double dep = 0.0;   // single-qubit depolarizing rate
  double damp = 0.0;  // amplitude damping rate

  bool is_identity() const { return flip == 0.0 && dep == 0.0 && damp == 0.0; }
  // POVM element reporting outcome 0, i.e. the Heisenberg-dual of the full
  // measurement-site error applied to |0><0|.
  Eigen::Matrix2cd povm_zero() const;
  // The pre-measurement state channel A(damp)∘E(dep); identity when unused.
  KrausChannel pre_channel() const;
};

// Sampled error rates for one unordered qubit pair. For "appc" models only
// `depol` is set; for "appe" models the composite rates are set. The first
// pair index (min) plays the role of i in the composite map.
struct PairRates {
  double depol = 0.0;
  double eps_p = 0.0, eta_i = 0.0, eta_j = 0.0, delta_i = 0.0, delta_j = 0.0;

  bool is_zero() const;
  KrausChannel build() const;
};

// Immutable after sampling or loading. Covers `n_qubits` index slots; when a
// model is sampled for an n-qubit register it covers n+1 slots so the same
// rates also serve the ancilla pipeline (the ancilla is slot n).
struct NoiseModel {
  std::string kind = "none";  // none | appc | appe | explicit
  std::uint64_t seed = 0;
  double eps_total = 0.0;  // eps_t for appc; per-gate eps for appe
  int n_gates = 0;         // gate count the appc average rate was scaled by
  int n_qubits = 0;

  std::map<std::pair<int, int>, PairRates> pair_rates;
  std::vector<MeasurementNoise> measurement;  // size n_qubits
  std::vector<double> prep_flip;              // SPAM |0>->|1| prep error, size n_qubits

  bool is_noiseless() const;
  // nullptr when the pair has no noise attached.
  const KrausChannel* channel_for_pair(int a, int b) const;
  MeasurementNoise measurement_for(int q) const;
  double prep_flip_for(int q) const;

  // Builds channels from the rate tables; called by samplers and loaders.
  void finalize();

  static NoiseModel none();

 private:
  std::map<std::pair<int, int>, KrausChannel> channels_;
};

// Model samplers. Both cover n_register+1 slots; every sampled rate is
// uniform in [0.5, 1.5] times its nominal value and the draw order is
// fixed, so a (kind, seed, parameters) triple pins the model bit-exactly.
//
// appc (Pauli family): average rate eps = eps_t/n_gates; per pair a
// two-qubit depolarizing rate, per qubit a classical measurement flip
// probability.
NoiseModel sample_model_appc(int n_register, int n_gates, double eps_t,
                             std::uint64_t seed);

// appe (composite family): per pair eps_p, eta_i, eta_j ~ U[0.5 eps/6,
// 1.5 eps/6] and delta_i, delta_j ~ U[0.5 eps/2, 1.5 eps/2] feeding the
// composite CNOT map; per qubit measurement dep ~ U[0.5*3eps/4, 1.5*3eps/4]
// and damp ~ U[0.5 eps, 1.5 eps].
NoiseModel sample_model_appe(int n_register, double eps, std::uint64_t seed);

// JSON round trip carrying the kind, seed, nominal rates and the full
// sampled tables, so a run can be replayed without resampling.
std::string noise_model_to_json(const NoiseModel& nm);
NoiseModel noise_model_from_json(const std::string& text);
NoiseModel load_noise_model(const std::string& path);

}  // namespace dsp
