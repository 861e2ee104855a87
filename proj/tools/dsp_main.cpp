// Command-line driver: reproducible, config-driven runs of the estimators,
// the random-circuit rescaling study and the VQE energy study. Every file
// output is accompanied by a manifest that `rerun` replays bit-exactly.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsp/basis.hpp"
#include "dsp/density.hpp"
#include "dsp/errors.hpp"
#include "dsp/harness.hpp"
#include "dsp/noise.hpp"
#include "dsp/purify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kArtifactVersion = "1.0.0";

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dsp::InputError("cannot write file: " + path.string());
  out << content;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw dsp::InputError("cannot open file: " + path.string());
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::parse_error& err) {
    throw dsp::InputError(path.string() + ": " + err.what());
  }
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const json& config, const std::vector<std::string>& outputs,
                    long duration_ms) {
  json doc;
  doc["artifact_version"] = kArtifactVersion;
  doc["command"] = command;
  doc["config"] = config;
  doc["outputs"] = outputs;
  doc["duration_ms"] = duration_ms;
  write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
}

dsp::Method parse_method(const std::string& name) {
  if (name == "raw") return dsp::Method::raw;
  if (name == "dsp" || name == "pauli") return dsp::Method::dsp_pauli;
  if (name == "tp" || name == "tomography") return dsp::Method::dsp_tomography;
  if (name == "projective") return dsp::Method::dsp_projective;
  if (name == "analytic") return dsp::Method::analytic;
  throw dsp::InputError("unknown method: " + name);
}

// ---------------------------------------------------------------- estimate

int cmd_estimate(const std::string& circuit_path, const std::string& observable,
                 const std::string& noise_path,
                 const std::vector<std::string>& method_names,
                 const std::string& topology_name, double theta, bool has_theta,
                 long shots, std::uint64_t seed) {
  const dsp::PauliString sigma = dsp::parse_pauli(observable);
  if (sigma.is_identity()) {
    // <I> = 1 by definition; nothing to run.
    std::cout << "method=identity value=1\n";
    return 0;
  }

  const dsp::ParsedCircuit parsed = dsp::load_circuit_file(circuit_path);
  const dsp::Circuit a = parsed.has_theta() && has_theta
                             ? parsed.bind(theta)
                             : parsed.fixed();
  if (sigma.size() != a.n_qubits)
    throw dsp::InputError("observable length does not match circuit register");

  dsp::NoiseModel nm = noise_path.empty() ? dsp::NoiseModel::none()
                                          : dsp::load_noise_model(noise_path);
  const dsp::Topology topology = dsp::parse_topology(topology_name);

  dsp::PipelineOptions opt;
  opt.shots = shots;
  opt.shot_seed = seed;

  const dsp::CompiledBasis basis = dsp::compile_basis(sigma, topology);

  std::optional<dsp::PipelineResult> ancilla;
  std::optional<double> p_tilde;
  auto ancilla_result = [&]() -> const dsp::PipelineResult& {
    if (!ancilla) {
      ancilla = dsp::run_pipeline_ancilla(a, basis.circuit, basis.pivot, nm, opt);
      p_tilde = ancilla->p_tilde;
    }
    return *ancilla;
  };

  for (const std::string& name : method_names) {
    const dsp::Method method = parse_method(name);
    double value = 0.0;
    switch (method) {
      case dsp::Method::raw: {
        const dsp::DensityMatrix rho =
            dsp::run_forward(a, nm, dsp::initial_state(nm, a.n_qubits));
        value = dsp::measure_observable_noisy(rho, sigma, nm);
        break;
      }
      case dsp::Method::dsp_projective: {
        const dsp::PipelineResult pipe =
            dsp::run_pipeline_no_ancilla(a, basis.circuit, basis.pivot, nm, opt);
        value = dsp::estimate_projective(pipe.p_tilde_b0, pipe.p_tilde_b1,
                                         pipe.p_zero)
                    .value;
        if (!p_tilde) p_tilde = pipe.p_tilde_b0 + pipe.p_tilde_b1;
        break;
      }
      case dsp::Method::dsp_pauli: {
        const auto& pipe = ancilla_result();
        value = dsp::estimate_pauli(pipe.cond_z, pipe.cond_x).value;
        break;
      }
      case dsp::Method::dsp_tomography: {
        const auto& pipe = ancilla_result();
        value = dsp::tomography_purify(pipe.cond_x, pipe.cond_y, pipe.cond_z).value;
        break;
      }
      case dsp::Method::analytic: {
        dsp::Circuit u = a;
        u.extend(basis.circuit);
        const dsp::DensityMatrix rho =
            dsp::run_forward(u, nm, dsp::initial_state(nm, u.n_qubits));
        const dsp::DensityMatrix rho_bar = dsp::run_dual(
            dsp::inverse(u), nm, dsp::final_povm_zero(nm, u.n_qubits));
        value = dsp::analytic_estimate(
            rho, rho_bar, dsp::embed(dsp::pauli_z(), {basis.pivot}, u.n_qubits));
        break;
      }
    }
    std::cout << "method=" << name << " value=" << dsp::format_double(value)
              << "\n";
  }

  if (p_tilde)
    std::cout << "p_tilde=" << dsp::format_double(*p_tilde) << "\n";
  if (ancilla)
    std::cout << "cond_y=" << dsp::format_double(ancilla->cond_y) << "\n";
  return 0;
}

// ------------------------------------------------------------- random-test

dsp::RandomTestConfig random_config_from_json(const json& doc) {
  dsp::RandomTestConfig cfg;
  try {
    for (const auto& row : doc.at("points")) {
      dsp::RandomTestPoint pt;
      pt.n = row.at("n").get<int>();
      pt.g = row.at("g").get<double>();
      pt.eps_t = row.at("eps_t").get<double>();
      cfg.points.push_back(pt);
    }
    cfg.n_circuits = doc.value("n_circuits", 25);
    cfg.seed = doc.value("seed", std::uint64_t{1});
    cfg.model_kind = doc.value("model", "appc");
    if (doc.contains("methods"))
      cfg.methods = doc["methods"].get<std::vector<std::string>>();
    cfg.shots = doc.value("shots", 0L);
    cfg.jobs = doc.value("jobs", 0);
  } catch (const json::exception& err) {
    throw dsp::InputError(std::string("random-test config: ") + err.what());
  }
  return cfg;
}

json random_config_to_json(const dsp::RandomTestConfig& cfg) {
  json doc;
  doc["points"] = json::array();
  for (const auto& pt : cfg.points)
    doc["points"].push_back({{"n", pt.n}, {"g", pt.g}, {"eps_t", pt.eps_t}});
  doc["n_circuits"] = cfg.n_circuits;
  doc["seed"] = cfg.seed;
  doc["model"] = cfg.model_kind;
  doc["methods"] = cfg.methods;
  doc["shots"] = cfg.shots;
  doc["jobs"] = cfg.jobs;
  return doc;
}

int cmd_random_test(const json& config, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const dsp::RandomTestConfig cfg = random_config_from_json(config);

  fs::create_directories(out_dir);
  const dsp::RandomTestResult result = dsp::run_random_test(cfg);
  write_file(out_dir / "records.csv", dsp::records_csv(result));
  write_file(out_dir / "summary.csv", dsp::summary_csv(result));

  const auto duration = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  write_manifest(out_dir, "random-test", random_config_to_json(cfg),
                 {"records.csv", "summary.csv"}, duration.count());

  int failed = 0;
  for (const auto& rec : result.records) failed += rec.failed;
  std::cout << "records: " << result.records.size() - failed
            << " ok, " << failed << " failed\n";
  for (const auto& s : result.summaries)
    std::cout << "n=" << s.n << " n_g=" << s.n_gates << " eps_t=" << s.eps_t
              << " method=" << s.method << " r="
              << (s.r_defined ? dsp::format_double(s.r) : "undefined") << "\n";
  return 0;
}

// -------------------------------------------------------------------- vqe

int cmd_vqe(const json& config, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::string> hamiltonian_paths;
  dsp::VqeStudyConfig base;
  std::string noise_file;
  try {
    hamiltonian_paths = config.at("hamiltonians").get<std::vector<std::string>>();
    base.ansatz = dsp::load_circuit_file(config.at("ansatz").get<std::string>());
    if (config.contains("theta") && !config["theta"].is_null())
      base.theta = config["theta"].get<double>();
    base.model_kind = config.value("model", "appe");
    base.eps = config.value("eps", 0.02);
    base.n_models = config.value("n_models", 10);
    base.seed = config.value("seed", std::uint64_t{1});
    noise_file = config.value("noise_file", "");
    base.topology = dsp::parse_topology(config.value("topology", "linear"));
    base.shots = config.value("shots", 0L);
    base.jobs = config.value("jobs", 0);
    base.methods.clear();
    for (const auto& name :
         config.value("methods", std::vector<std::string>{"raw", "dsp", "tp"}))
      base.methods.push_back(parse_method(name));
  } catch (const json::exception& err) {
    throw dsp::InputError(std::string("vqe config: ") + err.what());
  }

  fs::create_directories(out_dir);

  std::vector<dsp::VqeRow> all_rows;
  for (const std::string& path : hamiltonian_paths) {
    dsp::VqeStudyConfig cfg = base;
    cfg.hamiltonian = dsp::load_hamiltonian(path);

    if (!noise_file.empty()) {
      // Explicit model: one row per method against the loaded model.
      const dsp::NoiseModel nm = dsp::load_noise_model(noise_file);
      const double theta = cfg.theta ? *cfg.theta
                                     : dsp::optimize_theta(cfg.hamiltonian,
                                                           cfg.ansatz);
      dsp::VqeRow ef;
      ef.distance = cfg.hamiltonian.distance;
      ef.theta = theta;
      ef.method = "ef";
      ef.energy = dsp::vqe_energy(cfg.hamiltonian, cfg.ansatz, theta,
                                  dsp::NoiseModel::none(), dsp::Method::raw,
                                  cfg.topology);
      ef.model_seed = nm.seed;
      all_rows.push_back(ef);
      for (dsp::Method method : cfg.methods) {
        dsp::PipelineOptions opt;
        opt.shots = cfg.shots;
        opt.shot_seed = dsp::child_seed(cfg.seed, 0x5u);
        dsp::VqeRow row;
        row.distance = cfg.hamiltonian.distance;
        row.theta = theta;
        row.method = dsp::method_name(method);
        row.model_seed = nm.seed;
        row.energy = dsp::vqe_energy(cfg.hamiltonian, cfg.ansatz, theta, nm,
                                     method, cfg.topology, opt);
        all_rows.push_back(row);
      }
    } else {
      const auto rows = dsp::run_vqe_study(cfg);
      all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }
  }

  write_file(out_dir / "vqe.csv", dsp::vqe_csv(all_rows));

  const auto duration = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  write_manifest(out_dir, "vqe", config, {"vqe.csv"}, duration.count());

  for (const auto& row : all_rows)
    std::cout << "distance=" << row.distance << " method=" << row.method
              << " energy=" << dsp::format_double(row.energy) << "\n";
  return 0;
}

// ------------------------------------------------------------ compile-basis

int cmd_compile_basis(const std::string& pauli, const std::string& topology) {
  const dsp::CompiledBasis basis =
      dsp::compile_basis(dsp::parse_pauli(pauli), dsp::parse_topology(topology));
  std::cout << "# pivot qubit: " << basis.pivot << "\n"
            << dsp::format_circuit(basis.circuit);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-matrix simulator with dual-state and tomography "
               "purification estimators"};
  app.set_version_flag("--version", kArtifactVersion);
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "Estimate a Pauli observable on a circuit's output state");
  std::string circuit_path, observable, noise_path, topology = "all-to-all";
  std::vector<std::string> methods{"dsp"};
  double theta = 0.0;
  long shots = 0;
  std::uint64_t seed = 1;
  estimate->add_option("circuit", circuit_path, "circuit file")->required();
  estimate->add_option("observable", observable, "Pauli string, e.g. ZIZX")
      ->required();
  estimate->add_option("--noise", noise_path, "noise model JSON");
  estimate->add_option("--method", methods,
                       "raw | projective | dsp | tp | analytic");
  estimate->add_option("--topology", topology, "all-to-all | linear");
  auto* theta_opt = estimate->add_option("--theta", theta, "bind ansatz theta");
  estimate->add_option("--shots", shots, "0 = exact expectations");
  estimate->add_option("--seed", seed, "shot sampling seed");

  // random-test
  auto* random_test = app.add_subcommand(
      "random-test", "Random-circuit rescaling-factor study");
  std::string config_path, out_dir = ".";
  int jobs = -1;
  random_test->add_option("config", config_path, "config JSON")->required();
  random_test->add_option("--out", out_dir, "output directory");
  random_test->add_option("--jobs", jobs, "worker threads (0 = auto)");

  // vqe
  auto* vqe = app.add_subcommand("vqe", "VQE ground-state energy study");
  std::vector<std::string> hamiltonians;
  std::string ansatz_path, vqe_noise, vqe_model = "appe",
              vqe_topology = "linear", vqe_out = ".";
  std::vector<std::string> vqe_methods{"raw", "dsp", "tp"};
  double eps = 0.02, vqe_theta = 0.0;
  int n_models = 10;
  long vqe_shots = 0;
  std::uint64_t vqe_seed = 1;
  int vqe_jobs = 0;
  vqe->add_option("hamiltonians", hamiltonians, "Hamiltonian JSON file(s)")
      ->required();
  vqe->add_option("--ansatz", ansatz_path, "ansatz circuit file")->required();
  auto* vqe_theta_opt =
      vqe->add_option("--theta", vqe_theta, "fixed theta (default: optimize)");
  vqe->add_option("--noise", vqe_noise, "explicit noise model JSON");
  vqe->add_option("--model", vqe_model, "sampled model kind: appe | appc");
  vqe->add_option("--eps", eps, "per-gate error rate for sampled models");
  vqe->add_option("--models", n_models, "number of sampled models");
  vqe->add_option("--method", vqe_methods, "raw | projective | dsp | tp | analytic");
  vqe->add_option("--topology", vqe_topology, "all-to-all | linear");
  vqe->add_option("--seed", vqe_seed, "model sampling seed");
  vqe->add_option("--shots", vqe_shots, "0 = exact expectations");
  vqe->add_option("--jobs", vqe_jobs, "worker threads (0 = auto)");
  vqe->add_option("--out", vqe_out, "output directory");

  // compile-basis
  auto* compile =
      app.add_subcommand("compile-basis", "Print the basis change circuit B");
  std::string compile_pauli, compile_topology = "all-to-all";
  compile->add_option("pauli", compile_pauli, "Pauli string")->required();
  compile->add_option("--topology", compile_topology, "all-to-all | linear");

  // rerun
  auto* rerun = app.add_subcommand("rerun", "Replay a manifest bit-exactly");
  std::string manifest_path, rerun_out = ".";
  rerun->add_option("manifest", manifest_path, "manifest.json")->required();
  rerun->add_option("--out", rerun_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (estimate->parsed())
      return cmd_estimate(circuit_path, observable, noise_path, methods,
                          topology, theta, theta_opt->count() > 0, shots, seed);
    if (random_test->parsed()) {
      json config = read_json_file(config_path);
      if (jobs >= 0) config["jobs"] = jobs;
      return cmd_random_test(config, out_dir);
    }
    if (vqe->parsed()) {
      json config;
      config["hamiltonians"] = hamiltonians;
      config["ansatz"] = ansatz_path;
      if (vqe_theta_opt->count() > 0)
        config["theta"] = vqe_theta;
      else
        config["theta"] = nullptr;
      config["model"] = vqe_model;
      config["eps"] = eps;
      config["n_models"] = n_models;
      if (!vqe_noise.empty()) config["noise_file"] = vqe_noise;
      config["methods"] = vqe_methods;
      config["topology"] = vqe_topology;
      config["seed"] = vqe_seed;
      config["shots"] = vqe_shots;
      config["jobs"] = vqe_jobs;
      return cmd_vqe(config, vqe_out);
    }
    if (compile->parsed())
      return cmd_compile_basis(compile_pauli, compile_topology);
    if (rerun->parsed()) {
      const json manifest = read_json_file(manifest_path);
      const std::string command = manifest.at("command").get<std::string>();
      const json& config = manifest.at("config");
      if (command == "random-test") return cmd_random_test(config, rerun_out);
      if (command == "vqe") return cmd_vqe(config, rerun_out);
      throw dsp::InputError("manifest command not replayable: " + command);
    }
  } catch (const dsp::SimulationError& err) {
    std::cerr << "simulation error: " << err.what() << "\n";
    return 3;
  } catch (const dsp::InputError& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
