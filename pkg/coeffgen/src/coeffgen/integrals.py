"""Closed-form integrals over contracted s-type Gaussians on a line.

Implements the textbook expressions for overlap, kinetic, nuclear
attraction, and electron repulsion between 1s Gaussian primitives, plus
the STO-3G contraction for hydrogen.  All centers lie on one axis, so
positions are scalars in bohr.  Energies come out in hartree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# STO-3G hydrogen 1s: exponents already scaled by zeta^2 (zeta = 1.24)
# and contraction coefficients referring to unit-normalized primitives.
STO3G_H_EXPONENTS = (3.42525091, 0.62391373, 0.16885540)
STO3G_H_COEFFS = (0.15432897, 0.53532814, 0.44463454)

ANGSTROM_PER_BOHR = 0.529177210903


def angstrom_to_bohr(r: float) -> float:
    return r / ANGSTROM_PER_BOHR


def boys_f0(t: float) -> float:
    """The zeroth Boys function F0(t) = (1/2) sqrt(pi/t) erf(sqrt(t))."""
    if t < 1e-12:
        return 1.0 - t / 3.0
    st = math.sqrt(t)
    return 0.5 * math.sqrt(math.pi / t) * math.erf(st)


def _norm(alpha: float) -> float:
    return (2.0 * alpha / math.pi) ** 0.75


def overlap_prim(a: float, b: float, ra: float, rb: float) -> float:
    p = a + b
    mu = a * b / p
    return _norm(a) * _norm(b) * (math.pi / p) ** 1.5 * math.exp(-mu * (ra - rb) ** 2)


def kinetic_prim(a: float, b: float, ra: float, rb: float) -> float:
    p = a + b
    mu = a * b / p
    r2 = (ra - rb) ** 2
    return (
        _norm(a)
        * _norm(b)
        * mu
        * (3.0 - 2.0 * mu * r2)
        * (math.pi / p) ** 1.5
        * math.exp(-mu * r2)
    )


def attraction_prim(a: float, b: float, ra: float, rb: float, rc: float) -> float:
    """Attraction to a unit positive charge at rc (sign included: negative)."""
    p = a + b
    mu = a * b / p
    centroid = (a * ra + b * rb) / p
    return (
        -_norm(a)
        * _norm(b)
        * (2.0 * math.pi / p)
        * math.exp(-mu * (ra - rb) ** 2)
        * boys_f0(p * (centroid - rc) ** 2)
    )


def repulsion_prim(
    a: float,
    b: float,
    c: float,
    d: float,
    ra: float,
    rb: float,
    rc: float,
    rd: float,
) -> float:
    """(ab|cd) between primitives in chemist notation."""
    p = a + b
    q = c + d
    pq = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    return (
        _norm(a)
        * _norm(b)
        * _norm(c)
        * _norm(d)
        * 2.0
        * math.pi**2.5
        / (p * q * math.sqrt(p + q))
        * math.exp(-a * b / p * (ra - rb) ** 2 - c * d / q * (rc - rd) ** 2)
        * boys_f0(pq * (rp - rq) ** 2)
    )


@dataclass(frozen=True)
class ContractedGaussian:
    """A fixed-contraction s function: sum of normalized primitives."""

    center: float
    exponents: tuple = STO3G_H_EXPONENTS
    coefficients: tuple = STO3G_H_COEFFS

    def primitives(self):
        return zip(self.exponents, self.coefficients)


def overlap(f: ContractedGaussian, g: ContractedGaussian) -> float:
    return sum(
        cf * cg * overlap_prim(af, ag, f.center, g.center)
        for af, cf in f.primitives()
        for ag, cg in g.primitives()
    )


def kinetic(f: ContractedGaussian, g: ContractedGaussian) -> float:
    return sum(
        cf * cg * kinetic_prim(af, ag, f.center, g.center)
        for af, cf in f.primitives()
        for ag, cg in g.primitives()
    )


def attraction(f: ContractedGaussian, g: ContractedGaussian, rc: float) -> float:
    return sum(
        cf * cg * attraction_prim(af, ag, f.center, g.center, rc)
        for af, cf in f.primitives()
        for ag, cg in g.primitives()
    )


def repulsion(
    f: ContractedGaussian,
    g: ContractedGaussian,
    h: ContractedGaussian,
    k: ContractedGaussian,
) -> float:
    return sum(
        cf * cg * ch * ck
        * repulsion_prim(af, ag, ah, ak, f.center, g.center, h.center, k.center)
        for af, cf in f.primitives()
        for ag, cg in g.primitives()
        for ah, ch in h.primitives()
        for ak, ck in k.primitives()
    )


@dataclass(frozen=True)
class AOIntegrals:
    """Atomic-orbital matrices for H2 at one geometry (basis: 1s on A, 1s on B)."""

    r_bohr: float
    s: np.ndarray
    h_core: np.ndarray
    eri: np.ndarray
    e_nuclear: float


def h2_ao_integrals(r_bohr: float) -> AOIntegrals:
    """All STO-3G integrals for H2 at internuclear distance r (bohr)."""
    if r_bohr <= 0:
        raise ValueError(f"internuclear distance must be positive, got {r_bohr}")
    basis = [ContractedGaussian(0.0), ContractedGaussian(r_bohr)]
    nuclei = [0.0, r_bohr]
    n = len(basis)
    s = np.empty((n, n))
    t = np.empty((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s[i, j] = overlap(basis[i], basis[j])
            t[i, j] = kinetic(basis[i], basis[j])
            for rc in nuclei:
                v[i, j] += attraction(basis[i], basis[j], rc)
    eri = np.empty((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l_ in range(n):
                    eri[i, j, k, l_] = repulsion(basis[i], basis[j], basis[k], basis[l_])
    return AOIntegrals(
        r_bohr=r_bohr, s=s, h_core=t + v, eri=eri, e_nuclear=1.0 / r_bohr
    )
