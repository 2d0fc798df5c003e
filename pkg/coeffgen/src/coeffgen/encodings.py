"""Fermion-to-qubit encodings for the 4-spin-orbital H2 problem.

Spin-orbital order is (g-up, g-down, u-up, u-down), qubit k storing mode
k under Jordan-Wigner with qubit 0 as the leftmost (most significant)
tensor factor, so the Hartree-Fock determinant is |1100>.

The Bravyi-Kitaev form is obtained from the Jordan-Wigner matrix by the
basis permutation |n> -> |Bn> (B the binary parity-accumulation map).
Qubits 1 and 3 of that form carry conserved parities and stay diagonal,
so they can be frozen at their Hartree-Fock values and dropped, leaving
the 2-qubit Hamiltonian.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .electronic import MOIntegrals

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_LOWER = np.array([[0, 1], [0, 0]], dtype=complex)
_PAULI = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}

# Rows of the n=4 Bravyi-Kitaev occupation-to-qubit map: qubit j stores
# the parity of these modes.
_BK_ROWS = ((0,), (0, 1), (2,), (0, 1, 2, 3))

FOUR_QUBIT_WEIGHT4 = ("XYYX", "YXXY", "XXYY", "YYXX")
FOUR_QUBIT_WEIGHT4_SIGNS = (1.0, 1.0, -1.0, -1.0)
TWO_QUBIT_ORDER = ("II", "IZ", "ZI", "XX", "YY", "ZZ")


def kron_chain(letters: str) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for letter in letters:
        out = np.kron(out, _PAULI[letter])
    return out


def annihilation(mode: int, n_modes: int = 4) -> np.ndarray:
    """Jordan-Wigner a_mode with the parity string on lower-index modes."""
    out = np.array([[1.0 + 0j]])
    for k in range(n_modes):
        if k < mode:
            out = np.kron(out, _Z)
        elif k == mode:
            out = np.kron(out, _LOWER)
        else:
            out = np.kron(out, _I)
    return out


def jordan_wigner_hamiltonian(mo: MOIntegrals) -> np.ndarray:
    """Dense 16x16 electronic Hamiltonian plus nuclear repulsion."""
    ops = [annihilation(k) for k in range(4)]
    dim = 16
    h = mo.e_nuclear * np.eye(dim, dtype=complex)
    spatial = [0, 0, 1, 1]
    spin = [0, 1, 0, 1]
    for p in range(4):
        for q in range(4):
            if spin[p] != spin[q]:
                continue
            hpq = mo.h[spatial[p], spatial[q]]
            if hpq != 0.0:
                h += hpq * ops[p].conj().T @ ops[q]
    for p in range(4):
        for q in range(4):
            for r in range(4):
                for s in range(4):
                    if spin[p] != spin[r] or spin[q] != spin[s]:
                        continue
                    v = mo.eri[spatial[p], spatial[r], spatial[q], spatial[s]]
                    if v == 0.0:
                        continue
                    h += (
                        0.5
                        * v
                        * ops[p].conj().T
                        @ ops[q].conj().T
                        @ ops[s]
                        @ ops[r]
                    )
    return h


def pauli_decompose(matrix: np.ndarray, tol: float = 1e-12) -> dict:
    """Real coefficients of a Hermitian matrix over the Pauli basis."""
    dim = matrix.shape[0]
    n = dim.bit_length() - 1
    out = {}
    for letters in itertools.product("IXYZ", repeat=n):
        word = "".join(letters)
        c = np.einsum("ij,ji->", kron_chain(word), matrix) / dim
        if abs(c.imag) > tol:
            raise ValueError(f"non-Hermitian input: imaginary weight on {word}")
        if abs(c.real) > tol:
            out[word] = float(c.real)
    return out


@dataclass(frozen=True)
class FourQubitCoefficients:
    h_ident: float
    h_z: tuple
    h_zz: dict
    h_s: float


@dataclass(frozen=True)
class TwoQubitCoefficients:
    values: tuple  # h0..h5 in the order II, IZ, ZI, XX, YY, ZZ


def four_qubit_coefficients(mo: MOIntegrals) -> FourQubitCoefficients:
    """Extract the Jordan-Wigner template terms, rejecting any stray term."""
    coeffs = pauli_decompose(jordan_wigner_hamiltonian(mo), tol=1e-10)
    h_z = [0.0] * 4
    h_zz = {}
    h_ident = coeffs.pop("IIII", 0.0)
    for i in range(4):
        word = "".join("Z" if k == i else "I" for k in range(4))
        h_z[i] = coeffs.pop(word, 0.0)
    for i in range(4):
        for j in range(i + 1, 4):
            word = "".join("Z" if k in (i, j) else "I" for k in range(4))
            if word in coeffs:
                h_zz[(i, j)] = coeffs.pop(word)
    quartics = [coeffs.pop(w, 0.0) for w in FOUR_QUBIT_WEIGHT4]
    if coeffs:
        raise ValueError(f"unexpected Pauli terms in 4-qubit Hamiltonian: {sorted(coeffs)}")
    h_s = quartics[0]
    for value, sign in zip(quartics, FOUR_QUBIT_WEIGHT4_SIGNS):
        if abs(value - sign * h_s) > 1e-10:
            raise ValueError("weight-4 terms break the expected sign pattern")
    return FourQubitCoefficients(
        h_ident=h_ident, h_z=tuple(h_z), h_zz=h_zz, h_s=h_s
    )


def bk_permutation() -> np.ndarray:
    """Permutation matrix sending occupation |n> to the parity image |Bn>."""
    perm = np.zeros((16, 16))
    for idx in range(16):
        bits = [(idx >> (3 - k)) & 1 for k in range(4)]
        image = 0
        for j, row in enumerate(_BK_ROWS):
            parity = 0
            for mode in row:
                parity ^= bits[mode]
            image |= parity << (3 - j)
        perm[image, idx] = 1.0
    return perm


def two_qubit_hamiltonian(mo: MOIntegrals) -> np.ndarray:
    """Dense 4x4 reduced Hamiltonian on the surviving Bravyi-Kitaev qubits.

    Qubits 1 and 3 of the Bravyi-Kitaev form hold the g-shell parity and
    the total parity, both 0 for any state reachable from Hartree-Fock;
    the corresponding block is extracted and the surviving pair is
    reordered so the Hartree-Fock state reads |01>.
    """
    perm = bk_permutation()
    h_bk = perm @ jordan_wigner_hamiltonian(mo) @ perm.T
    keep = [idx for idx in range(16) if (idx >> 2) & 1 == 0 and idx & 1 == 0]
    block = h_bk[np.ix_(keep, keep)]
    # keep-list order is (q0, q2) = 00, 01, 10, 11; swap to (q2, q0).
    swap = [0, 2, 1, 3]
    return block[np.ix_(swap, swap)]


def two_qubit_coefficients(mo: MOIntegrals) -> TwoQubitCoefficients:
    coeffs = pauli_decompose(two_qubit_hamiltonian(mo), tol=1e-10)
    values = tuple(coeffs.pop(word, 0.0) for word in TWO_QUBIT_ORDER)
    if coeffs:
        raise ValueError(f"unexpected Pauli terms in 2-qubit Hamiltonian: {sorted(coeffs)}")
    return TwoQubitCoefficients(values=values)
