#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dsp/errors.hpp"
#include "dsp/harness.hpp"
#include "test_util.hpp"

using namespace dsp;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

HamiltonianSpec single_term_hamiltonian(double coeff, const std::string& word) {
  HamiltonianSpec h;
  h.n_qubits = static_cast<int>(word.size());
  h.terms.emplace_back(coeff, parse_pauli(word));
  return h;
}

}  // namespace

TEST_CASE("random circuit generator structure and determinism") {
  const Circuit bare = generate_random_circuit(4, 0, 5);
  CHECK(bare.gates.size() == 4);
  CHECK(bare.cnot_count() == 0);

  const Circuit c = generate_random_circuit(4, 16, 5);
  CHECK(c.cnot_count() == 16);
  int u1q = 0;
  for (const Gate& g : c.gates)
    if (g.kind == GateKind::U1q) {
      ++u1q;
      CHECK(is_unitary(g.payload, 1e-12));
    }
  CHECK(u1q == 4 + 32);

  const Circuit again = generate_random_circuit(4, 16, 5);
  REQUIRE(again.gates.size() == c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    CHECK(again.gates[i].kind == c.gates[i].kind);
    CHECK(again.gates[i].q0 == c.gates[i].q0);
  }
  CHECK_THROWS_AS(generate_random_circuit(1, 4, 5), InputError);
}

TEST_CASE("random observable pins the pivot and is balanced elsewhere") {
  CHECK(sample_random_observable(1, 9).word == "Z");

  int z_count = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const PauliString sigma = sample_random_observable(4, 1000 + i);
    REQUIRE(sigma.word[0] == 'Z');
    for (int q = 1; q < 4; ++q) {
      CHECK((sigma.word[q] == 'Z' || sigma.word[q] == 'I'));
      z_count += sigma.word[q] == 'Z';
    }
  }
  // 3-sigma band around half of the 3*draws non-pivot letters.
  const double expected = 1.5 * draws;
  const double sigma_bound = 3 * std::sqrt(3 * draws * 0.25);
  CHECK(std::abs(z_count - expected) < sigma_bound);
}

TEST_CASE("rescaling factor arithmetic") {
  CHECK(rescaling_factor({0.11, 0.13}, {0.2, 0.2}, {0.1, 0.1}) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rescaling_factor({0.1, 0.1}, {0.3, 0.4}, {0.1, 0.1}) == 0.0);
  CHECK(rescaling_factor({0.3, 0.4}, {0.3, 0.4}, {0.1, 0.1}) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(rescaling_factor({0.2}, {0.1}, {0.1}), SimulationError);
  CHECK_THROWS_AS(rescaling_factor({}, {}, {}), InputError);
}

TEST_CASE("random test with zero error collapses all methods onto o_ef") {
  RandomTestConfig cfg;
  cfg.points = {{3, 1.0, 0.0}};
  cfg.n_circuits = 5;
  cfg.seed = 21;
  const RandomTestResult result = run_random_test(cfg);
  REQUIRE(result.records.size() == 5);
  for (const ExperimentRecord& rec : result.records) {
    REQUIRE_FALSE(rec.failed);
    CHECK(rec.o_n == doctest::Approx(rec.o_ef).epsilon(1e-9));
    CHECK(rec.o_dsp == doctest::Approx(rec.o_ef).epsilon(1e-9));
    CHECK(rec.o_tp == doctest::Approx(rec.o_ef).epsilon(1e-9));
  }
  for (const RescalingSummary& s : result.summaries) CHECK_FALSE(s.r_defined);
  CHECK(summary_csv(result).find("undefined") != std::string::npos);
}

TEST_CASE("random test is deterministic and mitigates under appc noise") {
  RandomTestConfig cfg;
  cfg.points = {{3, 1.0, 0.1}};
  cfg.n_circuits = 8;
  cfg.seed = 33;
  cfg.jobs = 2;

  const RandomTestResult a = run_random_test(cfg);
  const RandomTestResult b = run_random_test(cfg);
  CHECK(records_csv(a) == records_csv(b));
  CHECK(summary_csv(a) == summary_csv(b));

  // Results are a function of seeds alone, not of the worker count.
  cfg.jobs = 1;
  const RandomTestResult sequential = run_random_test(cfg);
  CHECK(records_csv(sequential) == records_csv(a));

  for (const RescalingSummary& s : a.summaries) {
    REQUIRE(s.r_defined);
    CHECK(s.r < 1.0);
    CHECK(s.n_failed == 0);
  }
  for (const ExperimentRecord& rec : a.records) {
    CHECK(rec.p_tilde > 0.0);
    CHECK(rec.p_tilde <= 1.0 + 1e-10);
  }
}

TEST_CASE("random test runs the composite error family") {
  RandomTestConfig cfg;
  cfg.points = {{2, 1.0, 0.08}};
  cfg.n_circuits = 3;
  cfg.seed = 17;
  cfg.model_kind = "appe";
  const RandomTestResult result = run_random_test(cfg);
  for (const ExperimentRecord& rec : result.records) {
    REQUIRE_FALSE(rec.failed);
    CHECK(rec.model == "appe");
    CHECK(std::abs(rec.o_dsp) < 1.1);
    CHECK(std::abs(rec.o_tp) <= 1.0 + 1e-9);
  }
  for (const RescalingSummary& s : result.summaries) CHECK(s.r_defined);
}

TEST_CASE("random test in shot mode stays near the exact records") {
  RandomTestConfig cfg;
  cfg.points = {{2, 1.0, 0.05}};
  cfg.n_circuits = 2;
  cfg.seed = 19;
  const RandomTestResult exact = run_random_test(cfg);
  cfg.shots = 200000;
  const RandomTestResult sampled = run_random_test(cfg);
  for (int i = 0; i < 2; ++i) {
    CHECK(sampled.records[i].o_ef == exact.records[i].o_ef);  // shots only
    CHECK(std::abs(sampled.records[i].o_dsp - exact.records[i].o_dsp) < 0.05);
    CHECK(std::abs(sampled.records[i].o_tp - exact.records[i].o_tp) < 0.05);
  }
  // Shot mode is deterministic too.
  const RandomTestResult again = run_random_test(cfg);
  CHECK(records_csv(again) == records_csv(sampled));
}

TEST_CASE("records CSV round trips doubles bit-exactly") {
  RandomTestConfig cfg;
  cfg.points = {{2, 1.0, 0.2}};
  cfg.n_circuits = 3;
  cfg.seed = 77;
  const RandomTestResult result = run_random_test(cfg);
  const std::string csv = records_csv(result);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  int row = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream fs(line);
    std::string field;
    while (std::getline(fs, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 11);
    CHECK(std::stod(fields[6]) == result.records[row].o_ef);
    CHECK(std::stod(fields[7]) == result.records[row].o_n);
    CHECK(std::stod(fields[8]) == result.records[row].o_dsp);
    CHECK(std::stod(fields[9]) == result.records[row].o_tp);
    CHECK(std::stod(fields[10]) == result.records[row].p_tilde);
    ++row;
  }
  CHECK(row == 3);
}

TEST_CASE("hamiltonian loading and structural validation") {
  const auto path = write_temp(
      "dsp_test_h.json",
      R"({"n_qubits": 2,
          "terms": [{"pauli": "II", "coeff": -1.0},
                    {"pauli": "ZZ", "coeff": 0.5}],
          "meta": {"distance_angstrom": 0.75}})");
  const HamiltonianSpec h = load_hamiltonian(path.string());
  CHECK(h.n_qubits == 2);
  CHECK(h.terms.size() == 2);
  CHECK(h.distance == doctest::Approx(0.75));
  CHECK(h.identity_coefficient() == doctest::Approx(-1.0));

  CHECK_THROWS_AS(load_hamiltonian("/nonexistent/file.json"), InputError);
  CHECK_THROWS_AS(validate_h2_structure(h), InputError);
}

TEST_CASE("vqe energy on a single-term Hamiltonian") {
  // A = X on qubit 0 flips the pivot, so <Z_0> = -1 regardless of theta.
  const HamiltonianSpec h = single_term_hamiltonian(1.0, "ZIII");
  ParsedCircuit ansatz;
  ansatz.circuit = Circuit(4);
  ansatz.circuit.append(Gate::x(0));

  for (Method method : {Method::raw, Method::dsp_projective, Method::dsp_pauli,
                        Method::dsp_tomography, Method::analytic}) {
    const double energy =
        vqe_energy(h, ansatz, 0.0, NoiseModel::none(), method);
    CHECK(energy == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("noiseless raw and mitigated vqe energies coincide") {
  Rng rng(81);
  HamiltonianSpec h;
  h.n_qubits = 3;
  h.terms.emplace_back(0.5, parse_pauli("III"));
  h.terms.emplace_back(-0.7, parse_pauli("ZZI"));
  h.terms.emplace_back(0.3, parse_pauli("IXY"));
  h.terms.emplace_back(0.2, parse_pauli("ZIZ"));

  ParsedCircuit ansatz;
  ansatz.circuit = generate_random_circuit(3, 4, rng.next_u64());

  const double raw =
      vqe_energy(h, ansatz, 0.0, NoiseModel::none(), Method::raw);
  const double dsp =
      vqe_energy(h, ansatz, 0.0, NoiseModel::none(), Method::dsp_pauli);
  const double tp =
      vqe_energy(h, ansatz, 0.0, NoiseModel::none(), Method::dsp_tomography);
  CHECK(raw == doctest::Approx(dsp).epsilon(1e-9));
  CHECK(raw == doctest::Approx(tp).epsilon(1e-9));
}

TEST_CASE("vqe term failures carry the term identity") {
  // A noise-free state orthogonal to the all-zeros outcome cannot occur in
  // the pipeline, so force a denominator collapse instead: X_0 prepares
  // |1...>, and measuring Z_0 leaves cond_x near... use starved post-selects
  // via a prep flip of 1 on the ancilla-side register qubit.
  HamiltonianSpec h = single_term_hamiltonian(1.0, "ZI");
  ParsedCircuit ansatz;
  ansatz.circuit = Circuit(2);

  NoiseModel nm;
  nm.kind = "explicit";
  nm.n_qubits = 3;
  nm.prep_flip = {1.0, 0.0, 0.0};  // register qubit 0 always flips
  nm.measurement.resize(3);
  nm.finalize();

  try {
    vqe_energy(h, ansatz, 0.0, nm, Method::dsp_pauli);
    FAIL("expected a SimulationError");
  } catch (const SimulationError& err) {
    CHECK(std::string(err.what()).find("term ZI") != std::string::npos);
  }
}

TEST_CASE("optimize_theta finds the grid-and-refine minimum") {
  // <Z> after RY(theta) is cos(theta); the minimum sits at the boundary.
  HamiltonianSpec h = single_term_hamiltonian(1.0, "Z");
  ParsedCircuit ansatz = parse_circuit_text("QUBITS 1\nRY 0 theta\n");
  const double theta_star = optimize_theta(h, ansatz);
  const double energy = vqe_energy(h, ansatz, theta_star, NoiseModel::none(),
                                   Method::raw);
  CHECK(energy == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(std::abs(theta_star) - M_PI) < 1e-5);

  // Identity-only Hamiltonian: every theta ties; the scan stays at the
  // lowest grid point.
  HamiltonianSpec flat = single_term_hamiltonian(2.0, "I");
  CHECK(optimize_theta(flat, ansatz) == doctest::Approx(-M_PI).epsilon(1e-9));
}

TEST_CASE("vqe study emits one reference row plus model rows") {
  HamiltonianSpec h;
  h.n_qubits = 2;
  h.terms.emplace_back(0.25, parse_pauli("II"));
  h.terms.emplace_back(-1.0, parse_pauli("ZI"));
  h.terms.emplace_back(0.4, parse_pauli("XX"));
  h.distance = 0.5;

  VqeStudyConfig cfg;
  cfg.hamiltonian = h;
  cfg.ansatz = parse_circuit_text("QUBITS 2\nRY 0 theta\nCX 0 1\n");
  cfg.model_kind = "appe";
  cfg.eps = 0.02;
  cfg.n_models = 2;
  cfg.seed = 5;
  cfg.methods = {Method::raw, Method::dsp_pauli, Method::dsp_tomography};

  const auto rows = run_vqe_study(cfg);
  REQUIRE(rows.size() == 1 + 2 * 3);
  CHECK(rows[0].method == "ef");
  CHECK(rows[0].model_seed == 0);

  // Deterministic replay.
  const auto rows2 = run_vqe_study(cfg);
  CHECK(vqe_csv(rows) == vqe_csv(rows2));

  // The reference row is the exact minimum of this toy model's energy.
  for (const auto& row : rows) CHECK(std::isfinite(row.energy));
}

TEST_CASE("child seeds are stable and spread") {
  CHECK(child_seed(1, 0) == child_seed(1, 0));
  CHECK(child_seed(1, 0) != child_seed(1, 1));
  CHECK(child_seed(1, 0) != child_seed(2, 0));
}
