"""Molecular-orbital integrals and exact (FCI) energies for minimal-basis H2.

The two symmetry orbitals g = (1sA + 1sB)/sqrt(2(1+S)) and
u = (1sA - 1sB)/sqrt(2(1-S)) diagonalize the Fock operator by parity, so
no SCF iteration is needed.  The full-CI problem in the two-electron
Sz = 0 space is a 4x4 matrix handled by explicit Slater-Condon rules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrals import AOIntegrals, angstrom_to_bohr, h2_ao_integrals


@dataclass(frozen=True)
class MOIntegrals:
    """Spatial-orbital integrals in the (g, u) basis plus nuclear repulsion."""

    r_bohr: float
    h: np.ndarray
    eri: np.ndarray
    e_nuclear: float

    @property
    def h_g(self) -> float:
        return float(self.h[0, 0])

    @property
    def h_u(self) -> float:
        return float(self.h[1, 1])

    @property
    def j_gg(self) -> float:
        return float(self.eri[0, 0, 0, 0])

    @property
    def j_uu(self) -> float:
        return float(self.eri[1, 1, 1, 1])

    @property
    def j_gu(self) -> float:
        return float(self.eri[0, 0, 1, 1])

    @property
    def k_gu(self) -> float:
        return float(self.eri[0, 1, 0, 1])


def mo_integrals(ao: AOIntegrals) -> MOIntegrals:
    s12 = ao.s[0, 1]
    c = np.array(
        [
            [1.0 / np.sqrt(2.0 * (1.0 + s12)), 1.0 / np.sqrt(2.0 * (1.0 - s12))],
            [1.0 / np.sqrt(2.0 * (1.0 + s12)), -1.0 / np.sqrt(2.0 * (1.0 - s12))],
        ]
    )
    overlap_mo = c.T @ ao.s @ c
    if not np.allclose(overlap_mo, np.eye(2), atol=1e-12):
        raise RuntimeError("symmetry orbitals failed to orthonormalize")
    h = c.T @ ao.h_core @ c
    eri = np.einsum("pi,qj,rk,sl,pqrs->ijkl", c, c, c, c, ao.eri, optimize=True)
    return MOIntegrals(r_bohr=ao.r_bohr, h=h, eri=eri, e_nuclear=ao.e_nuclear)


def mo_integrals_at(r_angstrom: float) -> MOIntegrals:
    return mo_integrals(h2_ao_integrals(angstrom_to_bohr(r_angstrom)))


def hartree_fock_energy(mo: MOIntegrals) -> float:
    """Total RHF energy with both electrons in g."""
    return 2.0 * mo.h_g + mo.j_gg + mo.e_nuclear


def sz0_ci_matrix(mo: MOIntegrals) -> np.ndarray:
    """Hamiltonian in the Sz = 0 determinant basis, nuclear repulsion included.

    Basis order (modes 0..3 = g-up, g-down, u-up, u-down, determinants as
    ascending mode pairs): {0,1}, {0,3}, {1,2}, {2,3}.  Off-diagonal
    elements follow the Slater-Condon double-excitation rule; single
    excitations vanish by g/u parity.
    """
    h_g, h_u = mo.h_g, mo.h_u
    j_gg, j_uu, j_gu, k = mo.j_gg, mo.j_uu, mo.j_gu, mo.k_gu
    diag = [
        2.0 * h_g + j_gg,
        h_g + h_u + j_gu,
        h_g + h_u + j_gu,
        2.0 * h_u + j_uu,
    ]
    m = np.diag(diag)
    m[0, 3] = m[3, 0] = k
    m[1, 2] = m[2, 1] = -k
    return m + mo.e_nuclear * np.eye(4)


def fci_ground_energy(mo: MOIntegrals) -> float:
    """Exact two-electron ground energy (total, hartree)."""
    return float(np.linalg.eigvalsh(sz0_ci_matrix(mo))[0])


def fci_ground_energy_at(r_angstrom: float) -> float:
    return fci_ground_energy(mo_integrals_at(r_angstrom))
