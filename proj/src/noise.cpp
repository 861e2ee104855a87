#include "dsp/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsp/errors.hpp"

namespace dsp {

namespace {

const ComplexMatrix& pauli_of(char letter) {
  switch (letter) {
    case 'I': return pauli_i();
    case 'X': return pauli_x();
    case 'Y': return pauli_y();
    case 'Z': return pauli_z();
  }
  throw InputError("invalid Pauli letter in channel term");
}

ComplexMatrix word_matrix(const std::string& word) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char ch : word) out = kron(out, pauli_of(ch));
  return out;
}

// Single-letter product with the phase dropped; conjugation weights do not
// see Pauli phases.
char letter_product(char a, char b) {
  if (a == 'I') return b;
  if (b == 'I') return a;
  if (a == b) return 'I';
  // The remaining pairs multiply to the third letter.
  const std::string letters = "XYZ";
  for (char ch : letters)
    if (ch != a && ch != b) return ch;
  return 'I';
}

KrausChannel from_pauli_terms(int arity,
                              std::vector<KrausChannel::PauliTerm> terms) {
  KrausChannel ch;
  ch.arity = arity;
  for (const auto& term : terms) {
    if (term.weight < 0) throw InputError("negative Pauli mixture weight");
    if (term.weight == 0) continue;
    ch.kraus_ops.push_back(std::sqrt(term.weight) * word_matrix(term.word));
    ch.pauli_terms.push_back(term);
  }
  return ch;
}

}  // namespace

void KrausChannel::validate(double tol) const {
  if (kraus_ops.empty()) throw InputError("channel has no Kraus operators");
  for (const auto& k : kraus_ops)
    if (k.rows() != dim() || k.cols() != dim())
      throw InputError("Kraus operator dimension mismatch");
  if (!is_trace_preserving(tol))
    throw InputError("channel is not trace preserving");
}

bool KrausChannel::is_trace_preserving(double tol) const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
  for (const auto& k : kraus_ops) sum += k.adjoint() * k;
  sum -= ComplexMatrix::Identity(dim(), dim());
  return sum.cwiseAbs().maxCoeff() <= tol;
}

bool KrausChannel::is_unital(double tol) const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
  for (const auto& k : kraus_ops) sum += k * k.adjoint();
  sum -= ComplexMatrix::Identity(dim(), dim());
  return sum.cwiseAbs().maxCoeff() <= tol;
}

KrausChannel KrausChannel::identity(int arity) {
  return from_pauli_terms(arity, {{1.0, std::string(arity, 'I')}});
}

KrausChannel depolarizing_1q(double eps) {
  if (eps < 0 || eps > 0.75)
    throw InputError("depolarizing_1q: rate must be in [0, 3/4]");
  std::vector<KrausChannel::PauliTerm> terms{{1.0 - eps, "I"}};
  for (const char* p : {"X", "Y", "Z"}) terms.push_back({eps / 3.0, p});
  return from_pauli_terms(1, std::move(terms));
}

KrausChannel depolarizing_2q(double eps) {
  if (eps < 0 || eps > 15.0 / 16.0)
    throw InputError("depolarizing_2q: rate must be in [0, 15/16]");
  std::vector<KrausChannel::PauliTerm> terms{{1.0 - 16.0 * eps / 15.0, "II"}};
  const std::string letters = "IXYZ";
  for (char a : letters)
    for (char b : letters)
      terms.push_back({eps / 15.0, std::string{a, b}});
  return from_pauli_terms(2, std::move(terms));
}

KrausChannel dephasing(double eta) {
  if (eta < 0 || eta > 1) throw InputError("dephasing: rate must be in [0, 1]");
  return from_pauli_terms(1, {{1.0 - eta, "I"}, {eta, "Z"}});
}

KrausChannel amplitude_damping(double delta) {
  if (delta < 0 || delta > 1)
    throw InputError("amplitude_damping: rate must be in [0, 1]");
  KrausChannel ch;
  ch.arity = 1;
  ComplexMatrix k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - delta);
  k1 << 0, std::sqrt(delta), 0, 0;
  ch.kraus_ops = {k0};
  if (delta > 0) ch.kraus_ops.push_back(k1);
  return ch;
}

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  if (outer.arity != inner.arity)
    throw InputError("compose: channel arities differ");
  KrausChannel ch;
  ch.arity = outer.arity;
  ch.kraus_ops.reserve(outer.kraus_ops.size() * inner.kraus_ops.size());
  for (const auto& o : outer.kraus_ops)
    for (const auto& i : inner.kraus_ops) ch.kraus_ops.push_back(o * i);

  if (outer.is_pauli_mixture() && inner.is_pauli_mixture()) {
    for (const auto& o : outer.pauli_terms)
      for (const auto& i : inner.pauli_terms) {
        std::string word(ch.arity, 'I');
        for (int q = 0; q < ch.arity; ++q)
          word[q] = letter_product(o.word[q], i.word[q]);
        ch.pauli_terms.push_back({o.weight * i.weight, word});
      }
  }
  return ch;
}

KrausChannel lift_1q_to_2q(const KrausChannel& ch, int slot) {
  if (ch.arity != 1) throw InputError("lift_1q_to_2q: channel must act on one qubit");
  if (slot != 0 && slot != 1) throw InputError("lift_1q_to_2q: slot must be 0 or 1");
  KrausChannel out;
  out.arity = 2;
  for (const auto& k : ch.kraus_ops)
    out.kraus_ops.push_back(slot == 0 ? kron(k, pauli_i()) : kron(pauli_i(), k));
  if (ch.is_pauli_mixture()) {
    for (const auto& term : ch.pauli_terms) {
      std::string word = slot == 0 ? std::string{term.word[0], 'I'}
                                   : std::string{'I', term.word[0]};
      out.pauli_terms.push_back({term.weight, word});
    }
  }
  return out;
}

KrausChannel cnot_composite_channel(double eps_p, double eta_i, double eta_j,
                                    double delta_i, double delta_j) {
  KrausChannel ch = depolarizing_2q(eps_p);
  ch = compose(lift_1q_to_2q(dephasing(eta_i), 0), ch);
  ch = compose(lift_1q_to_2q(dephasing(eta_j), 1), ch);
  ch = compose(lift_1q_to_2q(amplitude_damping(delta_i), 0), ch);
  ch = compose(lift_1q_to_2q(amplitude_damping(delta_j), 1), ch);
  return ch;
}

Eigen::Matrix2cd MeasurementNoise::povm_zero() const {
  // Reported-0 element: pre-measurement channel C = A(damp)∘E(dep) applied
  // before ideal readout and a classical flip on the outcome, so
  // E_0 = C^dag-map of [(1-flip)|0><0| + flip|1><1|].
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0 - flip;
  m(1, 1) = flip;
  if (dep == 0.0 && damp == 0.0) return m;
  const KrausChannel ch = pre_channel();
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (const auto& k : ch.kraus_ops) out += k.adjoint() * m * k;
  return out;
}

KrausChannel MeasurementNoise::pre_channel() const {
  if (dep == 0.0 && damp == 0.0) return KrausChannel::identity(1);
  return compose(amplitude_damping(damp), depolarizing_1q(dep));
}

bool PairRates::is_zero() const {
  return depol == 0 && eps_p == 0 && eta_i == 0 && eta_j == 0 && delta_i == 0 &&
         delta_j == 0;
}

KrausChannel PairRates::build() const {
  const bool composite =
      eps_p != 0 || eta_i != 0 || eta_j != 0 || delta_i != 0 || delta_j != 0;
  if (depol != 0 && composite)
    throw InputError("pair rates mix depolarizing and composite families");
  if (composite)
    return cnot_composite_channel(eps_p, eta_i, eta_j, delta_i, delta_j);
  return depolarizing_2q(depol);
}

bool NoiseModel::is_noiseless() const {
  for (const auto& [pair, rates] : pair_rates)
    if (!rates.is_zero()) return false;
  for (const auto& m : measurement)
    if (!m.is_identity()) return false;
  for (double p : prep_flip)
    if (p != 0) return false;
  return true;
}

const KrausChannel* NoiseModel::channel_for_pair(int a, int b) const {
  const auto it = channels_.find({std::min(a, b), std::max(a, b)});
  return it == channels_.end() ? nullptr : &it->second;
}

MeasurementNoise NoiseModel::measurement_for(int q) const {
  if (q < 0) throw InputError("negative qubit index");
  if (q >= static_cast<int>(measurement.size())) return {};
  return measurement[q];
}

double NoiseModel::prep_flip_for(int q) const {
  if (q < 0) throw InputError("negative qubit index");
  if (q >= static_cast<int>(prep_flip.size())) return 0.0;
  return prep_flip[q];
}

void NoiseModel::finalize() {
  channels_.clear();
  for (const auto& [pair, rates] : pair_rates) {
    if (pair.first >= pair.second)
      throw InputError("pair rates must be keyed (min, max)");
    if (rates.is_zero()) continue;
    channels_.emplace(pair, rates.build());
  }
}

NoiseModel NoiseModel::none() {
  NoiseModel nm;
  nm.kind = "none";
  return nm;
}

NoiseModel sample_model_appc(int n_register, int n_gates, double eps_t,
                             std::uint64_t seed) {
  if (n_gates < 1) throw InputError("sample_model_appc: n_gates must be >= 1");
  if (eps_t < 0) throw InputError("sample_model_appc: eps_t must be >= 0");
  NoiseModel nm;
  nm.kind = "appc";
  nm.seed = seed;
  nm.eps_total = eps_t;
  nm.n_gates = n_gates;
  nm.n_qubits = n_register + 1;  // extra slot serves the ancilla

  const double eps = eps_t / n_gates;
  Rng rng(seed);
  // Fixed draw order: pairs lexicographic, then per-qubit flips.
  for (int i = 0; i < nm.n_qubits; ++i)
    for (int j = i + 1; j < nm.n_qubits; ++j)
      nm.pair_rates[{i, j}].depol = rng.uniform(0.5 * eps, 1.5 * eps);
  nm.measurement.resize(nm.n_qubits);
  for (int q = 0; q < nm.n_qubits; ++q)
    nm.measurement[q].flip = rng.uniform(0.5 * eps, 1.5 * eps);

  nm.finalize();
  return nm;
}

NoiseModel sample_model_appe(int n_register, double eps, std::uint64_t seed) {
  if (eps < 0) throw InputError("sample_model_appe: eps must be >= 0");
  NoiseModel nm;
  nm.kind = "appe";
  nm.seed = seed;
  nm.eps_total = eps;
  nm.n_qubits = n_register + 1;

  Rng rng(seed);
  for (int i = 0; i < nm.n_qubits; ++i)
    for (int j = i + 1; j < nm.n_qubits; ++j) {
      PairRates& r = nm.pair_rates[{i, j}];
      r.eps_p = rng.uniform(0.5 * eps / 6, 1.5 * eps / 6);
      r.eta_i = rng.uniform(0.5 * eps / 6, 1.5 * eps / 6);
      r.eta_j = rng.uniform(0.5 * eps / 6, 1.5 * eps / 6);
      r.delta_i = rng.uniform(0.5 * eps / 2, 1.5 * eps / 2);
      r.delta_j = rng.uniform(0.5 * eps / 2, 1.5 * eps / 2);
    }
  nm.measurement.resize(nm.n_qubits);
  for (int q = 0; q < nm.n_qubits; ++q) {
    nm.measurement[q].dep = rng.uniform(0.5 * 3 * eps / 4, 1.5 * 3 * eps / 4);
    nm.measurement[q].damp = rng.uniform(0.5 * eps, 1.5 * eps);
  }

  nm.finalize();
  return nm;
}

std::string noise_model_to_json(const NoiseModel& nm) {
  nlohmann::json doc;
  doc["kind"] = nm.kind;
  doc["seed"] = nm.seed;
  doc["eps_total"] = nm.eps_total;
  doc["n_gates"] = nm.n_gates;
  doc["n_qubits"] = nm.n_qubits;

  auto& pairs = doc["pair_rates"] = nlohmann::json::array();
  for (const auto& [pair, r] : nm.pair_rates) {
    nlohmann::json row;
    row["i"] = pair.first;
    row["j"] = pair.second;
    if (r.depol != 0) row["depol"] = r.depol;
    if (r.eps_p != 0) row["eps_p"] = r.eps_p;
    if (r.eta_i != 0) row["eta_i"] = r.eta_i;
    if (r.eta_j != 0) row["eta_j"] = r.eta_j;
    if (r.delta_i != 0) row["delta_i"] = r.delta_i;
    if (r.delta_j != 0) row["delta_j"] = r.delta_j;
    pairs.push_back(row);
  }

  auto& meas = doc["measurement"] = nlohmann::json::array();
  for (int q = 0; q < static_cast<int>(nm.measurement.size()); ++q) {
    const MeasurementNoise& m = nm.measurement[q];
    nlohmann::json row;
    row["q"] = q;
    if (m.flip != 0) row["flip"] = m.flip;
    if (m.dep != 0) row["dep"] = m.dep;
    if (m.damp != 0) row["damp"] = m.damp;
    meas.push_back(row);
  }

  if (!nm.prep_flip.empty()) {
    auto& prep = doc["prep_flip"] = nlohmann::json::array();
    for (int q = 0; q < static_cast<int>(nm.prep_flip.size()); ++q) {
      if (nm.prep_flip[q] == 0) continue;
      prep.push_back({{"q", q}, {"p", nm.prep_flip[q]}});
    }
  }

  return doc.dump(2);
}

NoiseModel noise_model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw InputError(std::string("noise model JSON: ") + err.what());
  }

  try {
    NoiseModel nm;
    nm.kind = doc.value("kind", "explicit");
    nm.seed = doc.value("seed", std::uint64_t{0});
    nm.eps_total = doc.value("eps_total", 0.0);
    nm.n_gates = doc.value("n_gates", 0);
    nm.n_qubits = doc.at("n_qubits").get<int>();
    if (nm.n_qubits < 1) throw InputError("noise model: n_qubits must be >= 1");

    for (const auto& row : doc.value("pair_rates", nlohmann::json::array())) {
      const int i = row.at("i").get<int>();
      const int j = row.at("j").get<int>();
      if (i >= j || i < 0 || j >= nm.n_qubits)
        throw InputError("noise model: bad pair indices");
      PairRates& r = nm.pair_rates[{i, j}];
      r.depol = row.value("depol", 0.0);
      r.eps_p = row.value("eps_p", 0.0);
      r.eta_i = row.value("eta_i", 0.0);
      r.eta_j = row.value("eta_j", 0.0);
      r.delta_i = row.value("delta_i", 0.0);
      r.delta_j = row.value("delta_j", 0.0);
    }

    nm.measurement.resize(nm.n_qubits);
    for (const auto& row : doc.value("measurement", nlohmann::json::array())) {
      const int q = row.at("q").get<int>();
      if (q < 0 || q >= nm.n_qubits)
        throw InputError("noise model: bad measurement qubit");
      nm.measurement[q].flip = row.value("flip", 0.0);
      nm.measurement[q].dep = row.value("dep", 0.0);
      nm.measurement[q].damp = row.value("damp", 0.0);
    }

    if (doc.contains("prep_flip")) {
      nm.prep_flip.assign(nm.n_qubits, 0.0);
      for (const auto& row : doc["prep_flip"]) {
        const int q = row.at("q").get<int>();
        if (q < 0 || q >= nm.n_qubits)
          throw InputError("noise model: bad prep_flip qubit");
        nm.prep_flip[q] = row.at("p").get<double>();
      }
    }

    nm.finalize();
    return nm;
  } catch (const nlohmann::json::exception& err) {
    throw InputError(std::string("noise model JSON: ") + err.what());
  }
}

NoiseModel load_noise_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open noise model file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return noise_model_from_json(buffer.str());
}

}  // namespace dsp
