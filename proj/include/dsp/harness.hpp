#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsp/basis.hpp"
#include "dsp/circuit.hpp"
#include "dsp/density.hpp"
#include "dsp/noise.hpp"
#include "dsp/purify.hpp"

namespace dsp {

// Random circuit on an all-to-all network: one Haar-random single-qubit gate
// per qubit, then n_gates repetitions of {random distinct pair, CNOT, two
// Haar-random single-qubit gates on that pair}.
Circuit generate_random_circuit(int n, int n_gates, std::uint64_t seed);

// Random Z/I word with a Z pinned at position 0 (the pivot).
PauliString sample_random_observable(int n, std::uint64_t seed);

// r = mean|o_em - o_ef| / mean|o_n - o_ef| over circuits. Throws
// SimulationError when the denominator mean vanishes.
double rescaling_factor(const std::vector<double>& o_em,
                        const std::vector<double>& o_n,
                        const std::vector<double>& o_ef);

struct RandomTestPoint {
  int n = 4;
  double g = 1.0;  // n_gates = round(g * n^2)
  double eps_t = 0.1;

  int n_gates() const;
};

struct RandomTestConfig {
  std::vector<RandomTestPoint> points;
  int n_circuits = 25;
  std::uint64_t seed = 1;
  std::string model_kind = "appc";  // appc | appe
  std::vector<std::string> methods = {"dsp", "tp"};
  long shots = 0;  // 0 = exact
  int jobs = 1;    // <=1 sequential; 0 = hardware concurrency
};

struct ExperimentRecord {
  int n = 0;
  int n_gates = 0;
  double eps_t = 0.0;
  std::string model;
  int circuit_id = 0;
  std::uint64_t seed = 0;  // per-circuit root seed
  double o_ef = 0.0, o_n = 0.0, o_dsp = 0.0, o_tp = 0.0, p_tilde = 0.0;
  bool failed = false;
  std::string failure;
};

struct RescalingSummary {
  int n = 0;
  int n_gates = 0;
  double eps_t = 0.0;
  std::string model;
  std::string method;
  double r = 0.0;
  bool r_defined = true;  // false for the 0/0 case (e.g. eps_t = 0)
  int n_failed = 0;
};

struct RandomTestResult {
  std::vector<ExperimentRecord> records;
  std::vector<RescalingSummary> summaries;
};

// Per circuit: A random, B = all-to-all compile of a random observable,
// o_ef (channels off), o_n (channels on, direct measurement after A),
// o_dsp (ancilla pipeline + Pauli estimator), o_tp (same pipeline +
// tomography purification). Per-circuit streams derive from the config seed
// via child_seed, so records are reproducible independent of job count.
// Per-circuit simulation failures are flagged records, excluded from r.
RandomTestResult run_random_test(const RandomTestConfig& cfg);

// CSV renderings; byte-stable for a given result.
std::string records_csv(const RandomTestResult& result);
std::string summary_csv(const RandomTestResult& result);

struct HamiltonianSpec {
  int n_qubits = 0;
  std::vector<std::pair<double, PauliString>> terms;
  std::string meta_json;  // free-form metadata echoed from the file
  double distance = 0.0;  // bond distance from meta, 0 when absent

  Observable observable() const;
  double identity_coefficient() const;
};

HamiltonianSpec load_hamiltonian(const std::string& path);
// Optional structural check: identity + 4 Z + 6 ZZ + 4 double-excitation
// terms on 4 qubits.
void validate_h2_structure(const HamiltonianSpec& h);

// Energy of the bound ansatz under one estimation method. Each non-identity
// term is measured with A = ansatz(theta) and B = compile(sigma_k) on the
// given topology; a term failure aborts with the term identity in the
// message.
double vqe_energy(const HamiltonianSpec& h, const ParsedCircuit& ansatz,
                  double theta, const NoiseModel& nm, Method method,
                  Topology topology = Topology::linear,
                  const PipelineOptions& opt = {});

// Noiseless 1-D minimization over theta in [-pi, pi]: dense 401-point grid
// scan, ties broken toward the lowest theta, then golden-section refinement
// to 1e-6.
double optimize_theta(const HamiltonianSpec& h, const ParsedCircuit& ansatz);

struct VqeStudyConfig {
  HamiltonianSpec hamiltonian;
  ParsedCircuit ansatz;
  std::optional<double> theta;  // nullopt = optimize noiselessly first
  std::string model_kind = "appe";  // appe | appc
  double eps = 0.02;
  int n_models = 10;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::raw, Method::dsp_pauli,
                                 Method::dsp_tomography};
  Topology topology = Topology::linear;
  long shots = 0;
  int jobs = 1;
};

struct VqeRow {
  double distance = 0.0;
  double theta = 0.0;
  std::string method;
  double energy = 0.0;
  std::uint64_t model_seed = 0;  // 0 for the noiseless reference row
};

// Rows: one noiseless reference ("ef") row plus one row per (model, method).
std::vector<VqeRow> run_vqe_study(const VqeStudyConfig& cfg);
std::string vqe_csv(const std::vector<VqeRow>& rows);

// Deterministic double formatting used by every CSV writer (%.17g).
std::string format_double(double v);

}  // namespace dsp
