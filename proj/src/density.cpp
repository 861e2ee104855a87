#include "dsp/density.hpp"

#include <algorithm>
#include <cmath>

#include "dsp/errors.hpp"

namespace dsp {

namespace {

inline int bit_of(int q, int n) { return n - 1 - q; }

// Index-space action of a full-register Pauli word: word * |x> =
// lam[x] * |x ^ flip>. lam entries are in {1, -1, i, -i}.
struct PauliAction {
  int flip = 0;
  std::vector<Complex> lam;
};

PauliAction pauli_action(const std::string& word, int n_qubits) {
  PauliAction act;
  act.lam.assign(std::size_t{1} << n_qubits, Complex(1, 0));
  const int dim = 1 << n_qubits;
  for (int q = 0; q < static_cast<int>(word.size()); ++q) {
    const char letter = word[q];
    if (letter == 'I') continue;
    const int bit = 1 << bit_of(q, n_qubits);
    if (letter == 'X' || letter == 'Y') act.flip |= bit;
    if (letter == 'X') continue;
    for (int x = 0; x < dim; ++x) {
      if (letter == 'Z') {
        if (x & bit) act.lam[x] = -act.lam[x];
      } else {  // Y
        act.lam[x] *= (x & bit) ? Complex(0, -1) : Complex(0, 1);
      }
    }
  }
  return act;
}

std::string word_on_register(const std::string& word,
                             const std::vector<int>& targets, int n_qubits) {
  std::string full(n_qubits, 'I');
  for (std::size_t j = 0; j < targets.size(); ++j) full[targets[j]] = word[j];
  return full;
}

void check_targets(const std::vector<int>& targets, int n_qubits) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n_qubits)
      throw InputError("target out of range");
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i] == targets[j]) throw InputError("duplicate target");
  }
}

struct TargetMap {
  int k;
  int mask = 0;
  std::vector<int> spread;  // gate index -> register index bits
  std::vector<int> bases;   // indices with all target bits zero

  TargetMap(const std::vector<int>& targets, int n_qubits)
      : k(static_cast<int>(targets.size())) {
    const int dim = 1 << n_qubits;
    spread.assign(std::size_t{1} << k, 0);
    for (int g = 0; g < (1 << k); ++g)
      for (int j = 0; j < k; ++j)
        if (g >> (k - 1 - j) & 1)
          spread[g] |= 1 << bit_of(targets[j], n_qubits);
    for (int j = 0; j < k; ++j) mask |= 1 << bit_of(targets[j], n_qubits);
    bases.reserve(dim >> k);
    for (int r = 0; r < dim; ++r)
      if (!(r & mask)) bases.push_back(r);
  }
};

}  // namespace

DensityMatrix DensityMatrix::zero_state(int n) {
  DensityMatrix rho;
  rho.n_qubits = n;
  rho.matrix = ComplexMatrix::Zero(1 << n, 1 << n);
  rho.matrix(0, 0) = 1.0;
  return rho;
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const int dim = static_cast<int>(psi.size());
  int n = 0;
  while ((1 << n) < dim) ++n;
  if ((1 << n) != dim) throw InputError("state dimension is not a power of two");
  DensityMatrix rho;
  rho.n_qubits = n;
  rho.matrix = psi * psi.adjoint();
  return rho;
}

double DensityMatrix::trace() const { return matrix.trace().real(); }

double DensityMatrix::purity() const { return (matrix * matrix).trace().real(); }

void DensityMatrix::validate(const Tolerances& tol) const {
  if (matrix.rows() != dim() || matrix.cols() != dim())
    throw InputError("density matrix dimension mismatch");
  if (!all_finite(matrix)) throw SimulationError("density matrix has non-finite entries");
  if (!is_hermitian(matrix, tol.hermiticity))
    throw SimulationError("density matrix not Hermitian within tolerance");
}

void apply_matrix_left(ComplexMatrix& m, const ComplexMatrix& op,
                       const std::vector<int>& targets, int n_qubits) {
  check_targets(targets, n_qubits);
  const TargetMap tm(targets, n_qubits);
  const int dk = 1 << tm.k;
  if (op.rows() != dk || op.cols() != dk)
    throw InputError("operator dimension does not match target count");
  const int dim = 1 << n_qubits;

  std::vector<Complex> buf(dk);
  for (int c = 0; c < dim; ++c) {
    Complex* col = m.col(c).data();
    for (int base : tm.bases) {
      for (int g = 0; g < dk; ++g) buf[g] = col[base | tm.spread[g]];
      for (int g = 0; g < dk; ++g) {
        Complex acc(0, 0);
        for (int h = 0; h < dk; ++h) acc += op(g, h) * buf[h];
        col[base | tm.spread[g]] = acc;
      }
    }
  }
}

void apply_matrix_right(ComplexMatrix& m, const ComplexMatrix& op,
                        const std::vector<int>& targets, int n_qubits) {
  check_targets(targets, n_qubits);
  const TargetMap tm(targets, n_qubits);
  const int dk = 1 << tm.k;
  if (op.rows() != dk || op.cols() != dk)
    throw InputError("operator dimension does not match target count");
  const int dim = 1 << n_qubits;

  ComplexMatrix block(dim, dk);
  for (int base : tm.bases) {
    for (int g = 0; g < dk; ++g) block.col(g) = m.col(base | tm.spread[g]);
    block = (block * op).eval();
    for (int h = 0; h < dk; ++h) m.col(base | tm.spread[h]) = block.col(h);
  }
}

void apply_unitary(ComplexMatrix& rho, const ComplexMatrix& u,
                   const std::vector<int>& targets, int n_qubits) {
  apply_matrix_left(rho, u, targets, n_qubits);
  apply_matrix_right(rho, u.adjoint(), targets, n_qubits);
}

void apply_gate(ComplexMatrix& rho, const Gate& g, int n_qubits) {
  apply_unitary(rho, gate_matrix(g), g.targets(), n_qubits);
}

namespace {

// out += sum_i w_i P_i rho P_i^dag over the mixture terms, using the
// permutation structure: (P rho P^dag)(r, c) =
// lam(r^f) conj(lam(c^f)) rho(r^f, c^f).
void accumulate_pauli_mixture(ComplexMatrix& out, const ComplexMatrix& rho,
                              const KrausChannel& ch,
                              const std::vector<int>& targets, int n_qubits) {
  const int dim = 1 << n_qubits;
  for (const auto& term : ch.pauli_terms) {
    const PauliAction act =
        pauli_action(word_on_register(term.word, targets, n_qubits), n_qubits);
    const double w = term.weight;
    for (int c = 0; c < dim; ++c) {
      const int cf = c ^ act.flip;
      const Complex col_scale = w * std::conj(act.lam[cf]);
      const Complex* src = rho.col(cf).data();
      Complex* dst = out.col(c).data();
      for (int rf = 0; rf < dim; ++rf)
        dst[rf ^ act.flip] += col_scale * act.lam[rf] * src[rf];
    }
  }
}

}  // namespace

void apply_channel(ComplexMatrix& rho, const KrausChannel& ch,
                   const std::vector<int>& targets, int n_qubits) {
  check_targets(targets, n_qubits);
  if (static_cast<int>(targets.size()) != ch.arity)
    throw InputError("channel arity does not match target count");
  const int dim = 1 << n_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  if (ch.is_pauli_mixture()) {
    accumulate_pauli_mixture(out, rho, ch, targets, n_qubits);
  } else {
    ComplexMatrix tmp(dim, dim);
    for (const auto& k : ch.kraus_ops) {
      tmp = rho;
      apply_matrix_left(tmp, k, targets, n_qubits);
      apply_matrix_right(tmp, k.adjoint(), targets, n_qubits);
      out += tmp;
    }
  }
  rho.swap(out);
}

void apply_channel_dual(ComplexMatrix& m, const KrausChannel& ch,
                        const std::vector<int>& targets, int n_qubits) {
  check_targets(targets, n_qubits);
  if (static_cast<int>(targets.size()) != ch.arity)
    throw InputError("channel arity does not match target count");
  const int dim = 1 << n_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  if (ch.is_pauli_mixture()) {
    // A Pauli mixture is self-dual: K^dag = K up to a phase that cancels.
    accumulate_pauli_mixture(out, m, ch, targets, n_qubits);
  } else {
    ComplexMatrix tmp(dim, dim);
    for (const auto& k : ch.kraus_ops) {
      tmp = m;
      apply_matrix_left(tmp, k.adjoint(), targets, n_qubits);
      apply_matrix_right(tmp, k, targets, n_qubits);
      out += tmp;
    }
  }
  m.swap(out);
}

double expectation_pauli(const ComplexMatrix& rho, const PauliString& sigma) {
  const int n = sigma.size();
  const int dim = 1 << n;
  if (rho.rows() != dim || rho.cols() != dim)
    throw InputError("expectation_pauli: dimension mismatch");
  const PauliAction act = pauli_action(sigma.word, n);
  Complex sum(0, 0);
  for (int x = 0; x < dim; ++x) sum += act.lam[x] * rho(x, x ^ act.flip);
  return sum.real();
}

double expectation_pauli_state(const ComplexVector& psi, const PauliString& sigma) {
  const int n = sigma.size();
  const int dim = 1 << n;
  if (psi.size() != dim) throw InputError("expectation_pauli_state: dimension mismatch");
  const PauliAction act = pauli_action(sigma.word, n);
  Complex sum(0, 0);
  for (int x = 0; x < dim; ++x)
    sum += std::conj(psi(x ^ act.flip)) * act.lam[x] * psi(x);
  return sum.real();
}

DensityMatrix initial_state(const NoiseModel& nm, int n_qubits) {
  DensityMatrix rho = DensityMatrix::zero_state(n_qubits);
  bool any = false;
  for (int q = 0; q < n_qubits; ++q)
    if (nm.prep_flip_for(q) != 0) any = true;
  if (!any) return rho;

  const int dim = 1 << n_qubits;
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(dim);
  for (int x = 0; x < dim; ++x)
    for (int q = 0; q < n_qubits; ++q) {
      const double p = nm.prep_flip_for(q);
      diag(x) *= (x >> bit_of(q, n_qubits) & 1) ? p : 1.0 - p;
    }
  rho.matrix.setZero();
  rho.matrix.diagonal() = diag.cast<Complex>();
  return rho;
}

ComplexMatrix final_povm_zero(const NoiseModel& nm, int n_qubits) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q)
    out = kron(out, nm.measurement_for(q).povm_zero());
  return out;
}

DensityMatrix run_forward(const Circuit& c, const NoiseModel& nm,
                          const DensityMatrix& init) {
  if (init.n_qubits != c.n_qubits)
    throw InputError("run_forward: state and circuit dimensions differ");
  if (c.n_qubits > default_limits().max_density_qubits)
    throw InputError("run_forward: register exceeds the density-matrix cap");
  DensityMatrix rho = init;
  for (const Gate& g : c.gates) {
    apply_gate(rho.matrix, g, c.n_qubits);
    if (g.is_two_qubit()) {
      if (const KrausChannel* ch = nm.channel_for_pair(g.q0, g.q1)) {
        const std::vector<int> pair{std::min(g.q0, g.q1), std::max(g.q0, g.q1)};
        apply_channel(rho.matrix, *ch, pair, c.n_qubits);
      }
    }
  }
  return rho;
}

DensityMatrix run_dual(const Circuit& c_inv, const NoiseModel& nm,
                       const ComplexMatrix& boundary) {
  const int n = c_inv.n_qubits;
  if (boundary.rows() != (1 << n) || boundary.cols() != (1 << n))
    throw InputError("run_dual: boundary and circuit dimensions differ");
  if (n > default_limits().max_density_qubits)
    throw InputError("run_dual: register exceeds the density-matrix cap");

  DensityMatrix out;
  out.n_qubits = n;
  out.matrix = boundary;
  // The forward step for gate i is [channel_i] ∘ [gate_i]; walking the list
  // backwards, the dual applies channel_i's dual first, then conjugates by
  // the gate's adjoint.
  for (auto it = c_inv.gates.rbegin(); it != c_inv.gates.rend(); ++it) {
    const Gate& g = *it;
    if (g.is_two_qubit()) {
      if (const KrausChannel* ch = nm.channel_for_pair(g.q0, g.q1)) {
        const std::vector<int> pair{std::min(g.q0, g.q1), std::max(g.q0, g.q1)};
        apply_channel_dual(out.matrix, *ch, pair, n);
      }
    }
    apply_unitary(out.matrix, gate_matrix(g).adjoint(), g.targets(), n);
  }
  return out;
}

double analytic_estimate(const DensityMatrix& rho, const DensityMatrix& rho_bar,
                         const ComplexMatrix& obs, double floor) {
  if (rho.n_qubits != rho_bar.n_qubits)
    throw InputError("analytic_estimate: state dimensions differ");
  if (obs.rows() != rho.dim() || obs.cols() != rho.dim())
    throw InputError("analytic_estimate: observable dimension mismatch");
  const ComplexMatrix product = rho.matrix * rho_bar.matrix;
  const double denominator = product.trace().real();
  if (denominator < floor)
    throw SimulationError("purification denominator vanished");
  // Tr(O (AB + BA)/2) = Re Tr(O AB) for Hermitian O, A, B.
  const double numerator = (obs * product).trace().real();
  return numerator / denominator;
}

namespace {

// E_b rho E_b for the projector onto pivot-bit = b.
ComplexMatrix project_qubit(const ComplexMatrix& rho, int pivot, int b,
                            int n_qubits) {
  const int dim = 1 << n_qubits;
  const int bit = 1 << bit_of(pivot, n_qubits);
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int c = 0; c < dim; ++c) {
    if (((c & bit) != 0) != (b != 0)) continue;
    for (int r = 0; r < dim; ++r)
      if (((r & bit) != 0) == (b != 0)) out(r, c) = rho(r, c);
  }
  return out;
}

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr(a b) without forming the product.
  return a.cwiseProduct(b.transpose()).sum().real();
}

void run_gates_noisy(ComplexMatrix& rho, const Circuit& c, const NoiseModel& nm) {
  for (const Gate& g : c.gates) {
    apply_gate(rho, g, c.n_qubits);
    if (g.is_two_qubit()) {
      if (const KrausChannel* ch = nm.channel_for_pair(g.q0, g.q1)) {
        const std::vector<int> pair{std::min(g.q0, g.q1), std::max(g.q0, g.q1)};
        apply_channel(rho, *ch, pair, c.n_qubits);
      }
    }
  }
}

}  // namespace

std::vector<long> sample_counts(const std::vector<double>& probs, long shots,
                                Rng& rng) {
  if (shots < 1) throw InputError("sample_counts: shots must be >= 1");
  double total = 0;
  for (double p : probs) {
    if (p < -1e-9) throw InputError("sample_counts: negative probability");
    total += std::max(p, 0.0);
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw InputError("sample_counts: distribution not normalized");

  std::vector<long> counts(probs.size(), 0);
  for (long s = 0; s < shots; ++s) {
    const double u = rng.uniform01() * total;
    double acc = 0;
    std::size_t bucket = probs.size() - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += std::max(probs[i], 0.0);
      if (u < acc) {
        bucket = i;
        break;
      }
    }
    ++counts[bucket];
  }
  return counts;
}

PipelineResult run_pipeline_no_ancilla(const Circuit& a, const Circuit& b,
                                       int pivot, const NoiseModel& nm,
                                       const PipelineOptions& opt) {
  if (a.n_qubits != b.n_qubits)
    throw InputError("pipeline: A and B register sizes differ");
  const int n = a.n_qubits;
  if (pivot < 0 || pivot >= n) throw InputError("pipeline: pivot out of range");

  Circuit u = a;
  u.extend(b);
  const Circuit u_inv = inverse(u);
  const ComplexMatrix povm = final_povm_zero(nm, n);

  DensityMatrix rho_mid = run_forward(u, nm, initial_state(nm, n));

  // Idle intermediate: denominator probability.
  ComplexMatrix idle = rho_mid.matrix;
  run_gates_noisy(idle, u_inv, nm);
  const double p_zero = real_trace_product(povm, idle);

  // Projective intermediate measurement on the pivot. With a composite
  // measurement-site channel configured, it acts before the projection;
  // a classical flip scrambles only the reported outcome label.
  ComplexMatrix pre = rho_mid.matrix;
  double flip = 0.0;
  if (!opt.ideal_intermediate) {
    const MeasurementNoise mn = nm.measurement_for(pivot);
    flip = mn.flip;
    if (mn.dep != 0 || mn.damp != 0)
      apply_channel(pre, mn.pre_channel(), {pivot}, n);
  }
  double joint[2];
  for (int outcome = 0; outcome < 2; ++outcome) {
    ComplexMatrix branch = project_qubit(pre, pivot, outcome, n);
    run_gates_noisy(branch, u_inv, nm);
    joint[outcome] = real_trace_product(povm, branch);
  }

  PipelineResult res;
  res.p_zero = p_zero;
  res.p_tilde_b0 = (1.0 - flip) * joint[0] + flip * joint[1];
  res.p_tilde_b1 = (1.0 - flip) * joint[1] + flip * joint[0];

  if (opt.shots > 0) {
    Rng rng(opt.shot_seed);
    // Measured run: buckets (b=0 & zeros, b=1 & zeros, anything else).
    const double rest =
        std::max(0.0, 1.0 - res.p_tilde_b0 - res.p_tilde_b1);
    const auto measured =
        sample_counts({res.p_tilde_b0, res.p_tilde_b1, rest}, opt.shots, rng);
    // Idle run: buckets (zeros, rest).
    const auto idle_counts = sample_counts(
        {res.p_zero, std::max(0.0, 1.0 - res.p_zero)}, opt.shots, rng);
    res.p_tilde_b0 = static_cast<double>(measured[0]) / opt.shots;
    res.p_tilde_b1 = static_cast<double>(measured[1]) / opt.shots;
    res.p_zero = static_cast<double>(idle_counts[0]) / opt.shots;
  }
  return res;
}

PipelineResult run_pipeline_ancilla(const Circuit& a, const Circuit& b,
                                    int pivot, const NoiseModel& nm,
                                    const PipelineOptions& opt) {
  if (a.n_qubits != b.n_qubits)
    throw InputError("pipeline: A and B register sizes differ");
  const int n = a.n_qubits;
  const int total = n + 1;  // ancilla appended as qubit n
  if (pivot < 0 || pivot >= n) throw InputError("pipeline: pivot out of range");
  if (total > default_limits().max_density_qubits)
    throw InputError("pipeline: register exceeds the density-matrix cap");

  Circuit u(n);
  u.extend(a);
  u.extend(b);
  const Circuit u_inv = inverse(u);

  Circuit wide(total);
  for (const Gate& g : u.gates) wide.append(g);

  DensityMatrix rho = initial_state(nm, total);
  run_gates_noisy(rho.matrix, wide, nm);

  apply_gate(rho.matrix, Gate::cnot(pivot, n), total);
  if (!opt.ideal_intermediate) {
    if (const KrausChannel* ch = nm.channel_for_pair(pivot, n))
      apply_channel(rho.matrix, *ch, {std::min(pivot, n), std::max(pivot, n)},
                    total);
  }

  Circuit wide_inv(total);
  for (const Gate& g : u_inv.gates) wide_inv.append(g);
  run_gates_noisy(rho.matrix, wide_inv, nm);

  const ComplexMatrix povm = final_povm_zero(nm, n);
  auto [rho_a, p_tilde] = conditional_ancilla_state(rho.matrix, povm);
  rho_a /= p_tilde;

  // Ancilla readout error is part of the intermediate measurement.
  double flip_scale = 1.0;
  if (!opt.ideal_intermediate) {
    const MeasurementNoise mn = nm.measurement_for(n);
    flip_scale = 1.0 - 2.0 * mn.flip;
    if (mn.dep != 0 || mn.damp != 0) {
      Eigen::Matrix2cd transformed = Eigen::Matrix2cd::Zero();
      for (const auto& k : mn.pre_channel().kraus_ops)
        transformed += k * rho_a * k.adjoint();
      rho_a = transformed;
    }
  }

  PipelineResult res;
  res.p_tilde = p_tilde;

  if (opt.shots == 0) {
    res.cond_x = flip_scale * (pauli_x() * rho_a).trace().real();
    res.cond_y = flip_scale * (pauli_y() * rho_a).trace().real();
    res.cond_z = flip_scale * (pauli_z() * rho_a).trace().real();
    return res;
  }

  // Shot mode: measure the ancilla in the X, Y and Z bases by applying the
  // basis rotation explicitly (R = H for X, R = H S^dag for Y, identity for
  // Z), then sampling (zeros & 0, zeros & 1, rest).
  Rng rng(opt.shot_seed);
  const double flip = 0.5 * (1.0 - flip_scale);
  double* slots[3] = {&res.cond_x, &res.cond_y, &res.cond_z};
  const Eigen::Matrix2cd rotations[3] = {
      hadamard(), hadamard() * phase_sdg(), Eigen::Matrix2cd::Identity()};
  long post_selected_z = 0;
  for (int basis = 0; basis < 3; ++basis) {
    const Eigen::Matrix2cd rotated =
        rotations[basis] * rho_a * rotations[basis].adjoint();
    double p0 = std::clamp(rotated(0, 0).real(), 0.0, 1.0);
    double p1 = std::clamp(rotated(1, 1).real(), 0.0, 1.0);
    const double r0 = (1.0 - flip) * p0 + flip * p1;
    const double r1 = (1.0 - flip) * p1 + flip * p0;
    const std::vector<double> probs{p_tilde * r0, p_tilde * r1,
                                    std::max(0.0, 1.0 - p_tilde)};
    const auto counts = sample_counts(probs, opt.shots, rng);
    const long kept = counts[0] + counts[1];
    if (kept == 0) throw SimulationError("zero post-selected shots");
    *slots[basis] = static_cast<double>(counts[0] - counts[1]) / kept;
    if (basis == 2) post_selected_z = kept;
  }
  res.p_tilde = static_cast<double>(post_selected_z) / opt.shots;
  return res;
}

double measure_observable_noisy(const DensityMatrix& rho,
                                const PauliString& sigma,
                                const NoiseModel& nm) {
  if (sigma.size() != rho.n_qubits)
    throw InputError("observable length does not match register");
  if (sigma.is_identity()) return 1.0;

  ComplexMatrix m = rho.matrix;
  std::string z_word(sigma.size(), 'I');
  double flip_scale = 1.0;
  for (int q : sigma.support()) {
    z_word[q] = 'Z';
    const char letter = sigma.word[q];
    if (letter == 'X') {
      apply_unitary(m, hadamard(), {q}, rho.n_qubits);
    } else if (letter == 'Y') {
      apply_unitary(m, (hadamard() * phase_sdg()).eval(), {q}, rho.n_qubits);
    }
    const MeasurementNoise mn = nm.measurement_for(q);
    if (mn.dep != 0 || mn.damp != 0)
      apply_channel(m, mn.pre_channel(), {q}, rho.n_qubits);
    flip_scale *= 1.0 - 2.0 * mn.flip;
  }
  return flip_scale * expectation_pauli(m, PauliString{z_word});
}

}  // namespace dsp
