// End-to-end tests of the `dsp` binary: exit codes, file formats, manifests
// and byte-exact replay. The binary path arrives via the DSP_CLI environment
// variable and the shipped data files via DSP_DATA.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const char* cli = std::getenv("DSP_CLI");
  REQUIRE(cli != nullptr);
  const std::string command = std::string(cli) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buffer;
  while (fgets(buffer.data(), buffer.size(), pipe)) output += buffer.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "dsp_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double value_from_output(const std::string& output, const std::string& method) {
  const std::string key = "method=" + method + " value=";
  const auto pos = output.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(output.substr(pos + key.size()));
}

const std::string kBellCircuit = "QUBITS 2\nH 0\nCX 0 1\n";

}  // namespace

TEST_CASE("estimate on a Bell pair returns the zero Z marginal") {
  const fs::path circuit = write_file("bell.txt", kBellCircuit);
  const RunResult res = run("estimate " + circuit.string() + " ZI --method dsp");
  CHECK(res.exit_code == 0);
  CHECK(value_from_output(res.output, "dsp") == doctest::Approx(0.0));
  CHECK(res.output.find("p_tilde=") != std::string::npos);
  CHECK(res.output.find("cond_y=") != std::string::npos);
}

TEST_CASE("estimate short-circuits the identity observable") {
  const fs::path circuit = write_file("bell.txt", kBellCircuit);
  const RunResult res = run("estimate " + circuit.string() + " II");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("value=1") != std::string::npos);
}

TEST_CASE("estimate methods agree on a noiseless circuit") {
  const fs::path circuit =
      write_file("twist.txt", "QUBITS 2\nH 0\nRZ 0 0.37\nCX 0 1\nRY 1 -0.81\n");
  const RunResult res =
      run("estimate " + circuit.string() +
          " ZZ --method raw --method projective --method dsp --method tp "
          "--method analytic");
  CHECK(res.exit_code == 0);
  const double raw = value_from_output(res.output, "raw");
  for (const char* m : {"projective", "dsp", "tp", "analytic"})
    CHECK(value_from_output(res.output, m) == doctest::Approx(raw).epsilon(1e-9));
}

TEST_CASE("estimate exit codes distinguish input from simulation errors") {
  CHECK(run("estimate /nonexistent.txt ZI").exit_code == 2);

  const fs::path bad = write_file("bad.txt", "QUBITS 2\nH 5\n");
  CHECK(run("estimate " + bad.string() + " ZI").exit_code == 2);

  const fs::path garbled = write_file("garbled.txt", "QUBITS 2\nFROB 1\n");
  CHECK(run("estimate " + garbled.string() + " ZI").exit_code == 2);

  // Certain preparation flip on a register qubit starves post-selection.
  const fs::path circuit = write_file("idle.txt", "QUBITS 1\n");
  const fs::path noise = write_file("starve.json", R"({
    "kind": "explicit", "n_qubits": 2,
    "prep_flip": [{"q": 0, "p": 1.0}]
  })");
  const RunResult res = run("estimate " + circuit.string() + " Z --noise " +
                            noise.string() + " --method dsp");
  CHECK(res.exit_code == 3);
  CHECK(res.output.find("post-selection starved") != std::string::npos);
}

TEST_CASE("estimate with shots samples near the exact value") {
  const fs::path circuit = write_file("bell.txt", kBellCircuit);
  const RunResult res = run("estimate " + circuit.string() +
                            " ZI --method dsp --shots 400000 --seed 12");
  CHECK(res.exit_code == 0);
  CHECK(std::abs(value_from_output(res.output, "dsp")) < 0.02);

  const RunResult again = run("estimate " + circuit.string() +
                              " ZI --method dsp --shots 400000 --seed 12");
  CHECK(again.output == res.output);
}

TEST_CASE("compile-basis prints the pivot and a parseable circuit") {
  const RunResult res = run("compile-basis XIZX --topology all-to-all");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("# pivot qubit: 0") != std::string::npos);
  CHECK(res.output.find("QUBITS 4") != std::string::npos);
  CHECK(res.output.find("CX 2 0") != std::string::npos);
  CHECK(res.output.find("CX 3 0") != std::string::npos);

  const RunResult linear = run("compile-basis ZIZ --topology linear");
  CHECK(linear.exit_code == 0);
  CHECK(linear.output.find("CX 1 2") != std::string::npos);

  CHECK(run("compile-basis IIII").exit_code == 2);
}

TEST_CASE("random-test writes CSVs plus manifest and reruns byte-exactly") {
  const fs::path config = write_file("rt.json", R"({
    "points": [{"n": 3, "g": 1.0, "eps_t": 0.1}],
    "n_circuits": 4,
    "seed": 11,
    "model": "appc",
    "methods": ["dsp", "tp"]
  })");
  const fs::path out_a = temp_dir() / "rt_a";
  const fs::path out_b = temp_dir() / "rt_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  const RunResult first =
      run("random-test " + config.string() + " --out " + out_a.string());
  CHECK(first.exit_code == 0);
  REQUIRE(fs::exists(out_a / "records.csv"));
  REQUIRE(fs::exists(out_a / "summary.csv"));
  REQUIRE(fs::exists(out_a / "manifest.json"));

  const RunResult replay = run("rerun " + (out_a / "manifest.json").string() +
                               " --out " + out_b.string());
  CHECK(replay.exit_code == 0);
  CHECK(slurp(out_a / "records.csv") == slurp(out_b / "records.csv"));
  CHECK(slurp(out_a / "summary.csv") == slurp(out_b / "summary.csv"));
}

TEST_CASE("random-test with zero error reports undefined rescaling") {
  const fs::path config = write_file("rt0.json", R"({
    "points": [{"n": 2, "g": 1.0, "eps_t": 0.0}],
    "n_circuits": 2,
    "seed": 3,
    "model": "appc"
  })");
  const fs::path out = temp_dir() / "rt_zero";
  fs::remove_all(out);
  const RunResult res =
      run("random-test " + config.string() + " --out " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("undefined") != std::string::npos);
  CHECK(slurp(out / "summary.csv").find("undefined") != std::string::npos);
}

TEST_CASE("vqe accepts an explicit noise model file") {
  const char* data = std::getenv("DSP_DATA");
  REQUIRE(data != nullptr);
  const fs::path noise = write_file("explicit.json", R"({
    "kind": "explicit", "n_qubits": 5,
    "pair_rates": [{"i": 0, "j": 1, "depol": 0.02},
                   {"i": 2, "j": 3, "depol": 0.02}],
    "measurement": [{"q": 0, "flip": 0.01}, {"q": 1, "flip": 0.01}]
  })");
  const fs::path out = temp_dir() / "vqe_explicit";
  fs::remove_all(out);
  const RunResult res = run("vqe " + std::string(data) + "/h2_sto3g_r0735.json" +
                            " --ansatz " + std::string(data) + "/h2_ansatz.txt" +
                            " --theta 0.2235 --noise " + noise.string() +
                            " --method raw --method dsp --out " + out.string());
  CHECK(res.exit_code == 0);
  const std::string csv = slurp(out / "vqe.csv");
  CHECK(csv.find("ef") != std::string::npos);
  CHECK(csv.find("dsp") != std::string::npos);
}

TEST_CASE("vqe drives the shipped Hamiltonian and replays byte-exactly") {
  const char* data = std::getenv("DSP_DATA");
  REQUIRE(data != nullptr);
  const std::string hamiltonian = std::string(data) + "/h2_sto3g_r0735.json";
  const std::string ansatz = std::string(data) + "/h2_ansatz.txt";
  REQUIRE(fs::exists(hamiltonian));
  REQUIRE(fs::exists(ansatz));

  const fs::path out_a = temp_dir() / "vqe_a";
  const fs::path out_b = temp_dir() / "vqe_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  const RunResult res = run("vqe " + hamiltonian + " --ansatz " + ansatz +
                            " --theta 0.2231 --models 2 --eps 0.02 --seed 7" +
                            " --out " + out_a.string());
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(out_a / "vqe.csv"));
  REQUIRE(fs::exists(out_a / "manifest.json"));

  const std::string csv = slurp(out_a / "vqe.csv");
  CHECK(csv.find("distance,theta,method,energy,model_seed") == 0);
  CHECK(csv.find("ef") != std::string::npos);
  CHECK(csv.find("dsp") != std::string::npos);
  CHECK(csv.find("tp") != std::string::npos);

  const RunResult replay = run("rerun " + (out_a / "manifest.json").string() +
                               " --out " + out_b.string());
  CHECK(replay.exit_code == 0);
  CHECK(slurp(out_a / "vqe.csv") == slurp(out_b / "vqe.csv"));

  CHECK(run("vqe /missing_h.json --ansatz " + ansatz).exit_code == 2);
}
