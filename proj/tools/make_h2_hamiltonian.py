#!/usr/bin/env python3
"""Generate the 4-qubit H2/STO-3G Hamiltonian JSON consumed by `dsp vqe`.

Computes the molecular integrals from scratch (s-type Gaussian closed forms
with the Boys function), runs restricted Hartree-Fock, builds the
second-quantized Hamiltonian over the four spin-orbitals (g-up, g-down,
u-up, u-down) and maps it to qubits with the Jordan-Wigner transform.
Qubit i is spin-orbital i; Pauli-string position i addresses qubit i.

Self-checks before writing: Hermiticity of the reconstruction, the 1+4+6+4
term structure, HF and exact ground energies against reference values, and
that the one-parameter pair-excitation ansatz shipped alongside reaches the
exact ground energy.

Usage: make_h2_hamiltonian.py [--distance 0.735] [--out FILE]
"""

import argparse
import itertools
import json
import math

import numpy as np
from scipy.special import erf

ANGSTROM_TO_BOHR = 1.0 / 0.52917721092

# STO-3G hydrogen: exponents and contraction coefficients (zeta = 1.24
# already folded in).
STO3G_ALPHA = np.array([3.42525091, 0.62391373, 0.16885540])
STO3G_COEFF = np.array([0.15432897, 0.53532814, 0.44463454])


def boys_f0(x):
    if x < 1e-12:
        return 1.0 - x / 3.0
    return 0.5 * math.sqrt(math.pi / x) * erf(math.sqrt(x))


def primitive_norm(alpha):
    return (2.0 * alpha / math.pi) ** 0.75


def build_integrals(r_bohr):
    """AO overlap, core Hamiltonian and (ab|cd) for two 1s centers."""
    centers = [np.array([0.0, 0.0, 0.0]), np.array([0.0, 0.0, r_bohr])]
    n = 2

    def prim_pairs(a_center, b_center):
        for alpha, da in zip(STO3G_ALPHA, STO3G_COEFF):
            for beta, db in zip(STO3G_ALPHA, STO3G_COEFF):
                c = da * db * primitive_norm(alpha) * primitive_norm(beta)
                yield alpha, beta, c, a_center, b_center

    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for alpha, beta, c, ra, rb in prim_pairs(centers[i], centers[j]):
                p = alpha + beta
                mu = alpha * beta / p
                rab2 = float(np.dot(ra - rb, ra - rb))
                ss = (math.pi / p) ** 1.5 * math.exp(-mu * rab2)
                S[i, j] += c * ss
                T[i, j] += c * mu * (3.0 - 2.0 * mu * rab2) * ss
                rp = (alpha * ra + beta * rb) / p
                for rc in centers:
                    rpc2 = float(np.dot(rp - rc, rp - rc))
                    V[i, j] += -c * (2.0 * math.pi / p) * math.exp(
                        -mu * rab2) * boys_f0(p * rpc2)

    eri = np.zeros((n, n, n, n))  # chemists' notation (ij|kl)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        val = 0.0
        for alpha, beta, c1, ra, rb in prim_pairs(centers[i], centers[j]):
            p = alpha + beta
            mu = alpha * beta / p
            rab2 = float(np.dot(ra - rb, ra - rb))
            rp = (alpha * ra + beta * rb) / p
            for gamma, delta, c2, rc, rd in prim_pairs(centers[k], centers[l]):
                q = gamma + delta
                nu = gamma * delta / q
                rcd2 = float(np.dot(rc - rd, rc - rd))
                rq = (gamma * rc + delta * rd) / q
                rpq2 = float(np.dot(rp - rq, rp - rq))
                val += c1 * c2 * (2.0 * math.pi ** 2.5 /
                                  (p * q * math.sqrt(p + q))) * math.exp(
                                      -mu * rab2 - nu * rcd2) * boys_f0(
                                          p * q / (p + q) * rpq2)
        eri[i, j, k, l] = val

    return S, T + V, eri


def run_rhf(S, h_core, eri):
    """Closed-shell SCF for 2 electrons in 2 AOs."""
    s_val, s_vec = np.linalg.eigh(S)
    x = s_vec @ np.diag(s_val ** -0.5) @ s_vec.T

    dm = np.zeros_like(S)
    energy = 0.0
    for _ in range(200):
        g = np.einsum("kl,ijkl->ij", dm, eri) - 0.5 * np.einsum(
            "kl,ikjl->ij", dm, eri)
        f = h_core + g
        e_orb, c_prime = np.linalg.eigh(x.T @ f @ x)
        c = x @ c_prime
        occupied = c[:, :1]
        new_dm = 2.0 * occupied @ occupied.T
        new_energy = 0.5 * np.einsum("ij,ij->", new_dm, h_core + f)
        if abs(new_energy - energy) < 1e-14 and np.allclose(dm, new_dm, atol=1e-12):
            dm = new_dm
            energy = new_energy
            break
        dm, energy = new_dm, new_energy
    return energy, c, e_orb


def jordan_wigner_hamiltonian(h_mo, eri_mo, e_nuc):
    """Dense 16x16 Hamiltonian over spin-orbitals (g-up, g-down, u-up, u-down)."""
    n_spin = 4

    def spatial(i):
        return i // 2

    def spin(i):
        return i % 2

    # Jordan-Wigner lowering operators; qubit 0 is the first tensor factor.
    iden = np.eye(2, dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|

    def annihilate(j):
        ops = [z] * j + [lower] + [iden] * (n_spin - j - 1)
        out = np.array([[1.0]], dtype=complex)
        for op in ops:
            out = np.kron(out, op)
        return out

    a = [annihilate(j) for j in range(n_spin)]
    ad = [op.conj().T for op in a]

    dim = 2 ** n_spin
    h = e_nuc * np.eye(dim, dtype=complex)
    for i in range(n_spin):
        for j in range(n_spin):
            if spin(i) != spin(j):
                continue
            h += h_mo[spatial(i), spatial(j)] * (ad[i] @ a[j])
    # (pq|rs) a+_{p s1} a+_{r s2} a_{s s2} a_{q s1} / 2 in chemists' notation.
    for p, q, r, s in itertools.product(range(2), repeat=4):
        for s1 in range(2):
            for s2 in range(2):
                i, j = 2 * p + s1, 2 * r + s2
                k, l = 2 * s + s2, 2 * q + s1
                h += 0.5 * eri_mo[p, q, r, s] * (ad[i] @ ad[j] @ a[k] @ a[l])
    return h


def pauli_decompose(h):
    """Project a 4-qubit Hermitian matrix onto real Pauli-word coefficients."""
    paulis = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.diag([1.0, -1.0]).astype(complex),
    }
    terms = {}
    for word in itertools.product("IXYZ", repeat=4):
        op = np.array([[1.0]], dtype=complex)
        for ch in word:
            op = np.kron(op, paulis[ch])
        coeff = np.trace(op @ h) / 16.0
        if abs(coeff.imag) > 1e-10:
            raise RuntimeError(f"non-real coefficient for {''.join(word)}")
        if abs(coeff.real) > 1e-12:
            terms["".join(word)] = float(coeff.real)
    return terms


def simulate_ansatz_energy(h, theta):
    """Pair-excitation ansatz: HF |1100> rotated by exp(-i theta/2 Y0X1X2X3)."""
    dim = 16
    psi = np.zeros(dim, dtype=complex)
    psi[0b1100] = 1.0
    paulis = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    }
    gen = np.array([[1.0]], dtype=complex)
    for ch in "YXXX":
        gen = np.kron(gen, paulis[ch])
    rotated = (math.cos(theta / 2) * np.eye(dim) -
               1j * math.sin(theta / 2) * gen) @ psi
    return float(np.real(rotated.conj() @ h @ rotated))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--distance", type=float, default=0.735,
                        help="H-H separation in Angstrom")
    parser.add_argument("--out", default="data/h2_sto3g_r0735.json")
    args = parser.parse_args()

    r_bohr = args.distance * ANGSTROM_TO_BOHR
    e_nuc = 1.0 / r_bohr

    S, h_core, eri = build_integrals(r_bohr)
    e_hf_elec, c, _ = run_rhf(S, h_core, eri)
    e_hf = e_hf_elec + e_nuc

    h_mo = c.T @ h_core @ c
    eri_mo = np.einsum("ip,jq,kr,ls,ijkl->pqrs", c, c, c, c, eri)

    h16 = jordan_wigner_hamiltonian(h_mo, eri_mo, e_nuc)
    if not np.allclose(h16, h16.conj().T, atol=1e-10):
        raise RuntimeError("JW Hamiltonian is not Hermitian")

    terms = pauli_decompose(h16)
    if len(terms) != 15:
        raise RuntimeError(f"expected 15 Pauli terms, got {len(terms)}")

    # Reconstruction and spectrum checks.
    e_exact = float(np.linalg.eigvalsh(h16)[0])
    hf_index = 0b1100
    e_hf_from_h = float(np.real(h16[hf_index, hf_index]))
    if abs(e_hf_from_h - e_hf) > 1e-8:
        raise RuntimeError(
            f"HF energy mismatch: SCF {e_hf:.10f} vs diagonal {e_hf_from_h:.10f}")

    thetas = np.linspace(-math.pi, math.pi, 2001)
    e_ansatz = min(simulate_ansatz_energy(h16, t) for t in thetas)
    if abs(e_ansatz - e_exact) > 1e-6:
        raise RuntimeError(
            f"ansatz does not reach the exact ground energy: "
            f"{e_ansatz:.10f} vs {e_exact:.10f}")

    doc = {
        "n_qubits": 4,
        "terms": [{"pauli": word, "coeff": coeff}
                  for word, coeff in sorted(terms.items())],
        "meta": {
            "molecule": "H2",
            "basis": "STO-3G",
            "mapping": "jordan-wigner",
            "spin_orbital_order": "g-up, g-down, u-up, u-down",
            "distance_angstrom": args.distance,
            "units": "hartree",
            "e_nuclear": e_nuc,
            "e_hf": e_hf,
            "e_fci": e_exact,
            "generator": "tools/make_h2_hamiltonian.py "
                         "(from-scratch STO-3G integrals, RHF, Jordan-Wigner)",
        },
    }
    with open(args.out, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")

    print(f"R = {args.distance} A ({r_bohr:.6f} bohr)")
    print(f"E_HF  = {e_hf:.10f} Ha")
    print(f"E_FCI = {e_exact:.10f} Ha")
    print(f"ansatz minimum = {e_ansatz:.10f} Ha")
    print(f"wrote {args.out} ({len(terms)} terms)")


if __name__ == "__main__":
    main()
