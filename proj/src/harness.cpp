#include "dsp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dsp/errors.hpp"
#include "dsp/rng.hpp"

namespace dsp {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Circuit generate_random_circuit(int n, int n_gates, std::uint64_t seed) {
  if (n < 2) throw InputError("random circuit needs at least two qubits");
  if (n_gates < 0) throw InputError("negative gate count");
  Rng rng(seed);
  Circuit c(n);
  for (int q = 0; q < n; ++q) c.append(Gate::u1q(q, haar_unitary(2, rng)));
  for (int g = 0; g < n_gates; ++g) {
    const int control = rng.uniform_int(0, n - 1);
    int target = rng.uniform_int(0, n - 2);
    if (target >= control) ++target;
    c.append(Gate::cnot(control, target));
    c.append(Gate::u1q(control, haar_unitary(2, rng)));
    c.append(Gate::u1q(target, haar_unitary(2, rng)));
  }
  return c;
}

PauliString sample_random_observable(int n, std::uint64_t seed) {
  if (n < 1) throw InputError("observable needs at least one qubit");
  Rng rng(seed);
  std::string word(n, 'I');
  word[0] = 'Z';  // pivot position is always measured
  for (int q = 1; q < n; ++q) word[q] = rng.uniform01() < 0.5 ? 'Z' : 'I';
  return PauliString{word};
}

double rescaling_factor(const std::vector<double>& o_em,
                        const std::vector<double>& o_n,
                        const std::vector<double>& o_ef) {
  if (o_em.size() != o_ef.size() || o_n.size() != o_ef.size() || o_ef.empty())
    throw InputError("rescaling_factor: mismatched or empty record lists");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < o_ef.size(); ++i) {
    num += std::abs(o_em[i] - o_ef[i]);
    den += std::abs(o_n[i] - o_ef[i]);
  }
  if (den == 0) throw SimulationError("rescaling factor undefined (zero unmitigated error)");
  return num / den;
}

int RandomTestPoint::n_gates() const {
  const int count = static_cast<int>(std::lround(g * n * n));
  return std::max(count, 1);
}

namespace {

ExperimentRecord run_one_circuit(const RandomTestPoint& pt,
                                 const std::string& model_kind, long shots,
                                 int circuit_id, std::uint64_t circuit_seed) {
  ExperimentRecord rec;
  rec.n = pt.n;
  rec.n_gates = pt.n_gates();
  rec.eps_t = pt.eps_t;
  rec.model = model_kind;
  rec.circuit_id = circuit_id;
  rec.seed = circuit_seed;

  const Circuit a =
      generate_random_circuit(pt.n, rec.n_gates, child_seed(circuit_seed, 0));
  const PauliString sigma =
      sample_random_observable(pt.n, child_seed(circuit_seed, 1));
  NoiseModel nm;
  if (model_kind == "appc") {
    nm = sample_model_appc(pt.n, rec.n_gates, pt.eps_t,
                           child_seed(circuit_seed, 2));
  } else if (model_kind == "appe") {
    nm = sample_model_appe(pt.n, pt.eps_t / rec.n_gates,
                           child_seed(circuit_seed, 2));
  } else {
    throw InputError("unknown model kind: " + model_kind);
  }

  try {
    const DensityMatrix rho_ideal =
        run_forward(a, NoiseModel::none(), DensityMatrix::zero_state(pt.n));
    rec.o_ef = expectation_pauli(rho_ideal.matrix, sigma);

    const DensityMatrix rho_noisy = run_forward(a, nm, initial_state(nm, pt.n));
    rec.o_n = measure_observable_noisy(rho_noisy, sigma, nm);

    const CompiledBasis basis = compile_all_to_all(sigma);
    PipelineOptions opt;
    opt.shots = shots;
    opt.shot_seed = child_seed(circuit_seed, 3);
    const PipelineResult pipe =
        run_pipeline_ancilla(a, basis.circuit, basis.pivot, nm, opt);
    rec.p_tilde = pipe.p_tilde;
    rec.o_dsp = estimate_pauli(pipe.cond_z, pipe.cond_x).value;
    rec.o_tp = tomography_purify(pipe.cond_x, pipe.cond_y, pipe.cond_z).value;
  } catch (const SimulationError& err) {
    rec.failed = true;
    rec.failure = err.what();
  }
  return rec;
}

void parallel_tasks(int jobs, std::size_t task_count,
                    const std::function<void(std::size_t)>& work) {
  if (jobs == 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
  }
  jobs = std::min<std::size_t>(jobs, task_count);
  if (jobs <= 1) {
    for (std::size_t t = 0; t < task_count; ++t) work(t);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= task_count) return;
      try {
        work(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RandomTestResult run_random_test(const RandomTestConfig& cfg) {
  if (cfg.points.empty()) throw InputError("random test: no points configured");
  if (cfg.n_circuits < 1) throw InputError("random test: n_circuits must be >= 1");
  for (const auto& m : cfg.methods)
    if (m != "raw" && m != "dsp" && m != "tp")
      throw InputError("random test: unknown method " + m);

  RandomTestResult result;
  result.records.resize(cfg.points.size() * cfg.n_circuits);

  parallel_tasks(cfg.jobs, result.records.size(), [&](std::size_t task) {
    const std::size_t point_index = task / cfg.n_circuits;
    const int circuit_id = static_cast<int>(task % cfg.n_circuits);
    const std::uint64_t point_seed = child_seed(cfg.seed, point_index);
    const std::uint64_t circuit_seed = child_seed(point_seed, circuit_id);
    result.records[task] = run_one_circuit(cfg.points[point_index],
                                           cfg.model_kind, cfg.shots,
                                           circuit_id, circuit_seed);
  });

  // Rescaling summaries per point and method, failures excluded and counted.
  for (std::size_t p = 0; p < cfg.points.size(); ++p) {
    std::vector<double> ef, n_raw, dsp, tp;
    int n_failed = 0;
    for (int i = 0; i < cfg.n_circuits; ++i) {
      const ExperimentRecord& rec = result.records[p * cfg.n_circuits + i];
      if (rec.failed) {
        ++n_failed;
        continue;
      }
      ef.push_back(rec.o_ef);
      n_raw.push_back(rec.o_n);
      dsp.push_back(rec.o_dsp);
      tp.push_back(rec.o_tp);
    }
    for (const std::string& method : cfg.methods) {
      if (method == "raw") continue;
      RescalingSummary s;
      s.n = cfg.points[p].n;
      s.n_gates = cfg.points[p].n_gates();
      s.eps_t = cfg.points[p].eps_t;
      s.model = cfg.model_kind;
      s.method = method;
      s.n_failed = n_failed;
      try {
        s.r = rescaling_factor(method == "dsp" ? dsp : tp, n_raw, ef);
      } catch (const SimulationError&) {
        s.r = 0.0;
        s.r_defined = false;
      } catch (const InputError&) {
        s.r = 0.0;
        s.r_defined = false;
      }
      result.summaries.push_back(std::move(s));
    }
  }
  return result;
}

std::string records_csv(const RandomTestResult& result) {
  std::ostringstream out;
  out << "n,n_g,eps_t,model,circuit_id,seed,o_ef,o_n,o_dsp,o_tp,p_tilde\n";
  for (const ExperimentRecord& rec : result.records) {
    if (rec.failed) continue;
    out << rec.n << ',' << rec.n_gates << ',' << format_double(rec.eps_t) << ','
        << rec.model << ',' << rec.circuit_id << ',' << rec.seed << ','
        << format_double(rec.o_ef) << ',' << format_double(rec.o_n) << ','
        << format_double(rec.o_dsp) << ',' << format_double(rec.o_tp) << ','
        << format_double(rec.p_tilde) << '\n';
  }
  return out.str();
}

std::string summary_csv(const RandomTestResult& result) {
  std::ostringstream out;
  out << "n,n_g,eps_t,model,method,r\n";
  for (const RescalingSummary& s : result.summaries) {
    out << s.n << ',' << s.n_gates << ',' << format_double(s.eps_t) << ','
        << s.model << ',' << s.method << ','
        << (s.r_defined ? format_double(s.r) : std::string("undefined")) << '\n';
  }
  return out.str();
}

Observable HamiltonianSpec::observable() const {
  Observable o;
  o.terms = terms;
  return o;
}

double HamiltonianSpec::identity_coefficient() const {
  double sum = 0;
  for (const auto& [coeff, pauli] : terms)
    if (pauli.is_identity()) sum += coeff;
  return sum;
}

HamiltonianSpec load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open Hamiltonian file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& err) {
    throw InputError(std::string("Hamiltonian JSON: ") + err.what());
  }

  try {
    HamiltonianSpec h;
    h.n_qubits = doc.at("n_qubits").get<int>();
    for (const auto& row : doc.at("terms")) {
      const PauliString pauli = parse_pauli(row.at("pauli").get<std::string>());
      if (pauli.size() != h.n_qubits)
        throw InputError("Hamiltonian term length does not match n_qubits");
      const double coeff = row.at("coeff").get<double>();
      if (!std::isfinite(coeff)) throw InputError("non-finite coefficient");
      h.terms.emplace_back(coeff, pauli);
    }
    if (doc.contains("meta")) {
      h.meta_json = doc["meta"].dump();
      if (doc["meta"].contains("distance_angstrom"))
        h.distance = doc["meta"]["distance_angstrom"].get<double>();
      else if (doc["meta"].contains("distance"))
        h.distance = doc["meta"]["distance"].get<double>();
    }
    return h;
  } catch (const nlohmann::json::exception& err) {
    throw InputError(std::string("Hamiltonian JSON: ") + err.what());
  }
}

void validate_h2_structure(const HamiltonianSpec& h) {
  if (h.n_qubits != 4) throw InputError("H2 Hamiltonian must act on 4 qubits");
  if (h.terms.size() != 15) throw InputError("H2 Hamiltonian must have 15 terms");
  int identity = 0, z1 = 0, z2 = 0, xy4 = 0;
  for (const auto& [coeff, pauli] : h.terms) {
    const auto support = pauli.support();
    int n_x = 0, n_y = 0, n_z = 0;
    for (char ch : pauli.word) {
      n_x += ch == 'X';
      n_y += ch == 'Y';
      n_z += ch == 'Z';
    }
    if (support.empty()) ++identity;
    else if (n_z == 1 && support.size() == 1) ++z1;
    else if (n_z == 2 && support.size() == 2) ++z2;
    else if (n_x == 2 && n_y == 2) ++xy4;
    else throw InputError("unexpected H2 term: " + pauli.word);
  }
  if (identity != 1 || z1 != 4 || z2 != 6 || xy4 != 4)
    throw InputError("H2 Hamiltonian does not have the 1+4+6+4 structure");
}

double vqe_energy(const HamiltonianSpec& h, const ParsedCircuit& ansatz,
                  double theta, const NoiseModel& nm, Method method,
                  Topology topology, const PipelineOptions& opt) {
  if (ansatz.circuit.n_qubits != h.n_qubits)
    throw InputError("ansatz register does not match Hamiltonian");
  const Circuit a = ansatz.bind(theta);
  const int n = h.n_qubits;

  double energy = 0.0;
  // The raw state does not depend on the measured term; reuse it.
  DensityMatrix raw_state;
  if (method == Method::raw)
    raw_state = run_forward(a, nm, initial_state(nm, n));

  int term_index = 0;
  for (const auto& [coeff, sigma] : h.terms) {
    if (sigma.is_identity()) {
      energy += coeff;
      ++term_index;
      continue;
    }
    try {
      double value = 0.0;
      switch (method) {
        case Method::raw:
          value = measure_observable_noisy(raw_state, sigma, nm);
          break;
        case Method::dsp_projective: {
          const CompiledBasis basis = compile_basis(sigma, topology);
          PipelineOptions term_opt = opt;
          term_opt.shot_seed = child_seed(opt.shot_seed, term_index);
          const PipelineResult pipe = run_pipeline_no_ancilla(
              a, basis.circuit, basis.pivot, nm, term_opt);
          value = estimate_projective(pipe.p_tilde_b0, pipe.p_tilde_b1,
                                      pipe.p_zero)
                      .value;
          break;
        }
        case Method::dsp_pauli:
        case Method::dsp_tomography: {
          const CompiledBasis basis = compile_basis(sigma, topology);
          PipelineOptions term_opt = opt;
          term_opt.shot_seed = child_seed(opt.shot_seed, term_index);
          const PipelineResult pipe = run_pipeline_ancilla(
              a, basis.circuit, basis.pivot, nm, term_opt);
          value = method == Method::dsp_pauli
                      ? estimate_pauli(pipe.cond_z, pipe.cond_x).value
                      : tomography_purify(pipe.cond_x, pipe.cond_y, pipe.cond_z)
                            .value;
          break;
        }
        case Method::analytic: {
          const CompiledBasis basis = compile_basis(sigma, topology);
          Circuit u = a;
          u.extend(basis.circuit);
          const DensityMatrix rho = run_forward(u, nm, initial_state(nm, n));
          const DensityMatrix rho_bar =
              run_dual(inverse(u), nm, final_povm_zero(nm, n));
          value = analytic_estimate(rho, rho_bar,
                                    embed(pauli_z(), {basis.pivot}, n));
          break;
        }
      }
      energy += coeff * value;
    } catch (const SimulationError& err) {
      throw SimulationError("term " + sigma.word + ": " + err.what());
    }
    ++term_index;
  }
  return energy;
}

double optimize_theta(const HamiltonianSpec& h, const ParsedCircuit& ansatz) {
  const NoiseModel none = NoiseModel::none();
  const auto energy_at = [&](double theta) {
    return vqe_energy(h, ansatz, theta, none, Method::raw);
  };

  // Dense scan; ties broken toward the lowest theta by strict comparison.
  constexpr int kGridPoints = 401;
  const double lo = -M_PI, hi = M_PI;
  const double step = (hi - lo) / (kGridPoints - 1);
  double best_theta = lo;
  double best_energy = energy_at(lo);
  for (int i = 1; i < kGridPoints; ++i) {
    const double theta = lo + i * step;
    const double e = energy_at(theta);
    if (e < best_energy) {
      best_energy = e;
      best_theta = theta;
    }
  }

  // Golden-section refinement inside the bracketing grid cells.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(lo, best_theta - step);
  double b = std::min(hi, best_theta + step);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = energy_at(c), fd = energy_at(d);
  while (b - a > 1e-6) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = energy_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = energy_at(d);
    }
  }
  const double refined = 0.5 * (a + b);
  // Keep the grid point unless refinement strictly improves on it, so ties
  // (e.g. a constant Hamiltonian) resolve to the lowest grid theta.
  return energy_at(refined) < best_energy ? refined : best_theta;
}

std::vector<VqeRow> run_vqe_study(const VqeStudyConfig& cfg) {
  const double theta =
      cfg.theta ? *cfg.theta : optimize_theta(cfg.hamiltonian, cfg.ansatz);

  std::vector<VqeRow> rows;
  {
    VqeRow ef;
    ef.distance = cfg.hamiltonian.distance;
    ef.theta = theta;
    ef.method = "ef";
    ef.energy = vqe_energy(cfg.hamiltonian, cfg.ansatz, theta,
                           NoiseModel::none(), Method::raw, cfg.topology);
    ef.model_seed = 0;
    rows.push_back(ef);
  }

  struct Task {
    int model_index;
    Method method;
  };
  std::vector<Task> tasks;
  for (int m = 0; m < cfg.n_models; ++m)
    for (Method method : cfg.methods) tasks.push_back({m, method});
  std::vector<VqeRow> task_rows(tasks.size());

  parallel_tasks(cfg.jobs, tasks.size(), [&](std::size_t t) {
    const Task& task = tasks[t];
    const std::uint64_t model_seed = child_seed(cfg.seed, task.model_index);
    NoiseModel nm;
    if (cfg.model_kind == "appe") {
      nm = sample_model_appe(cfg.hamiltonian.n_qubits, cfg.eps, model_seed);
    } else if (cfg.model_kind == "appc") {
      // eps is interpreted per gate, so the appc average uses n_gates = 1.
      nm = sample_model_appc(cfg.hamiltonian.n_qubits, 1, cfg.eps, model_seed);
    } else {
      throw InputError("unknown model kind: " + cfg.model_kind);
    }
    PipelineOptions opt;
    opt.shots = cfg.shots;
    opt.shot_seed = child_seed(model_seed, 0x5u);
    VqeRow row;
    row.distance = cfg.hamiltonian.distance;
    row.theta = theta;
    row.method = method_name(task.method);
    row.model_seed = model_seed;
    row.energy = vqe_energy(cfg.hamiltonian, cfg.ansatz, theta, nm, task.method,
                            cfg.topology, opt);
    task_rows[t] = row;
  });

  rows.insert(rows.end(), task_rows.begin(), task_rows.end());
  return rows;
}

std::string vqe_csv(const std::vector<VqeRow>& rows) {
  std::ostringstream out;
  out << "distance,theta,method,energy,model_seed\n";
  for (const VqeRow& row : rows)
    out << format_double(row.distance) << ',' << format_double(row.theta) << ','
        << row.method << ',' << format_double(row.energy) << ','
        << row.model_seed << '\n';
  return out.str();
}

}  // namespace dsp
