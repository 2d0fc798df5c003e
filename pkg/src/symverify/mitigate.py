"""Error-mitigation mathematics.

Post-selection on a Pauli symmetry sector can be done three equivalent
ways: projecting the density matrix, combining raw expectation values
through the ratio (⟨P⟩ + s⟨PS⟩)/(1 + s⟨S⟩), or solving the tiny
generalized eigenproblem over the expansion set {1, S}.  This module
implements all three plus the energy-ordering diagnostic and the
subspace expansion with an operator that anticommutes with the
Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .densim import DensityMatrix, expectation
from .errors import (
    DegenerateOverlapError,
    DimensionError,
    DomainError,
    RejectionError,
)
from .pauli import PauliString, PauliSum, SymmetrySpec, commutes, multiply

__all__ = [
    "VerifiedExpectation",
    "QseSolution",
    "OrderingDiagnostic",
    "AnticommutingQse",
    "project_symmetry",
    "postselected_expectation",
    "postselected_energy",
    "sqse_energy",
    "energy_ordering_check",
    "anticommuting_qse",
    "coherent_chi",
]

DEGENERACY_TOL = 1e-12
_EXPECTATION_SLACK = 1e-9


@dataclass(frozen=True)
class VerifiedExpectation:
    """An expectation value together with the post-selection survival rate."""

    value: float
    acceptance_probability: float

    def __post_init__(self) -> None:
        if not 0.0 < self.acceptance_probability <= 1.0 + 1e-6:
            raise DomainError(
                f"acceptance probability must lie in (0, 1], got {self.acceptance_probability}"
            )


@dataclass(frozen=True)
class QseSolution:
    """Both sector energies of the {1, S} expansion.

    ``eigenvalues`` is ordered (sector +1, sector -1); ``chosen`` is the
    smaller of the two and ``b_condition`` the overlap-matrix determinant
    1 - ⟨S⟩², which approaching zero signals a near-singular expansion.
    """

    eigenvalues: tuple
    chosen: float
    b_condition: float

    def sector_energy(self, sector: int) -> float:
        if sector == 1:
            return self.eigenvalues[0]
        if sector == -1:
            return self.eigenvalues[1]
        raise DomainError(f"sector must be +1 or -1, got {sector}")


@dataclass(frozen=True)
class OrderingDiagnostic:
    """Sector energy split E = w_s E_s + w_r E_r and the trust flag.

    An energy is None when its sector carries no weight; the flag is None
    when the kept sector itself is empty (no diagnosis possible).
    """

    e_total: float
    e_selected: float | None
    e_rejected: float | None
    weight_selected: float
    weight_rejected: float
    verification_trustworthy: bool | None


@dataclass(frozen=True)
class AnticommutingQse:
    """Expansion over {1, A} with {A, H} = 0: energies come in ± pairs."""

    e_squared: float
    roots: tuple
    h_exp: float
    a_exp: float
    ha_exp: complex
    b_condition: float


def project_symmetry(rho: DensityMatrix, s: SymmetrySpec) -> tuple:
    """Renormalized projection onto the target sector, with its probability."""
    if s.n != rho.n:
        raise DimensionError("symmetry and state qubit counts differ")
    proj = s.projector()
    chunk = proj @ rho.matrix @ proj
    p = float(np.real(np.trace(chunk)))
    if p <= DEGENERACY_TOL:
        raise RejectionError(
            f"sector {s.sector:+d} of {s.operator} carries weight {p:.3e}; nothing to keep"
        )
    return DensityMatrix(rho.n, chunk / p), p


def postselected_expectation(exp_p: float, exp_ps: float, exp_s: float, sector: int) -> float:
    """Post-selected ⟨P⟩ from three raw traces: (⟨P⟩ + s⟨PS⟩)/(1 + s⟨S⟩)."""
    if sector not in (1, -1):
        raise DomainError(f"sector must be +1 or -1, got {sector}")
    for name, val in (("exp_p", exp_p), ("exp_ps", exp_ps), ("exp_s", exp_s)):
        if not -1.0 - _EXPECTATION_SLACK <= val <= 1.0 + _EXPECTATION_SLACK:
            raise DomainError(f"{name} = {val} is outside [-1, 1]")
    denom = 1.0 + sector * exp_s
    if abs(denom) <= DEGENERACY_TOL:
        raise RejectionError("post-selection denominator vanishes; sector is unpopulated")
    return (exp_p + sector * exp_ps) / denom


def _joint_symmetry_terms(symmetries) -> list:
    """All subset products (sign, operator) of a commuting symmetry set."""
    specs = list(symmetries)
    if not specs:
        raise DomainError("need at least one symmetry")
    n = specs[0].n
    for a in specs:
        if a.n != n:
            raise DimensionError("symmetries act on different register sizes")
    for i, a in enumerate(specs):
        for b in specs[i + 1 :]:
            if not commutes(a.operator, b.operator):
                raise DomainError(f"symmetries {a.operator} and {b.operator} do not commute")
    terms = []
    for mask in range(2 ** len(specs)):
        op = PauliString.identity(n)
        sign = 1
        for k, spec in enumerate(specs):
            if mask >> k & 1:
                op = multiply(op, spec.operator)
                sign *= spec.sector
        if not op.is_hermitian:
            raise DomainError("symmetry subset product came out non-Hermitian")
        terms.append((sign, op))
    return terms


def postselected_energy(rho: DensityMatrix, h: PauliSum, symmetries) -> VerifiedExpectation:
    """Energy after projecting onto every listed sector, via traces only.

    Expands the joint projector ∏(1 + s_k S_k)/2 into Pauli products, so
    the result uses nothing but expectation values of Pauli operators on
    the unprojected state (what an experiment can actually estimate).
    """
    terms = _joint_symmetry_terms(symmetries)
    for _, op in terms:
        if not h.commutes_with(op.unsigned()):
            raise DomainError(f"Hamiltonian does not commute with symmetry product {op}")
    num = 0.0
    den = 0.0
    for sign, op in terms:
        den += sign * expectation(rho, op)
        num += sign * expectation(rho, h * op)
    p = den / len(terms)
    if p <= DEGENERACY_TOL:
        raise RejectionError("joint sector carries no weight; nothing to keep")
    return VerifiedExpectation(num / den, p)


def sqse_energy(h_exp: float, hs_exp: float, s_exp: float) -> QseSolution:
    """Solve the 2x2 expansion over {1, S} from three raw traces.

    The eigenproblem H_qse v = lambda B v with H_qse = [[h, hs], [hs, h]]
    and B = [[1, s], [s, 1]] has eigenvalues (h ± hs)/(1 ± s), exactly the
    two post-selected sector energies.  Solved numerically through the
    closed-form 2x2 inverse, then checked against that closed form.
    """
    if abs(s_exp) >= 1.0 - DEGENERACY_TOL:
        raise DegenerateOverlapError(
            f"|<S>| = {abs(s_exp)} leaves the overlap matrix singular"
        )
    det = 1.0 - s_exp * s_exp
    b_inv = np.array([[1.0, -s_exp], [-s_exp, 1.0]]) / det
    h_qse = np.array([[h_exp, hs_exp], [hs_exp, h_exp]])
    numeric = sorted(float(v.real) for v in np.linalg.eigvals(b_inv @ h_qse))
    lam_plus = (h_exp + hs_exp) / (1.0 + s_exp)
    lam_minus = (h_exp - hs_exp) / (1.0 - s_exp)
    if not np.allclose(numeric, sorted((lam_plus, lam_minus)), atol=1e-10):
        raise DomainError("numerical eigenproblem disagrees with the closed form")
    return QseSolution(
        eigenvalues=(lam_plus, lam_minus),
        chosen=min(lam_plus, lam_minus),
        b_condition=det,
    )


def energy_ordering_check(rho: DensityMatrix, h: PauliSum, s: SymmetrySpec) -> OrderingDiagnostic:
    """Split the raw energy into kept and discarded sector contributions.

    The decomposition E = w_s E_s + w_r E_r needs [H, S] = 0.  Post-selection
    is only trustworthy when the discarded sector is not below the kept one
    in energy, which the flag reports as E_r >= E_s.
    """
    if s.n != rho.n:
        raise DimensionError("symmetry and state qubit counts differ")
    if not h.commutes_with(s.operator.unsigned()):
        raise DomainError("Hamiltonian must commute with the verified symmetry")
    h_dense = h.dense()
    e_total = expectation(rho, h)
    energies: dict = {}
    weights: dict = {}
    for sector in (1, -1):
        proj = SymmetrySpec(s.operator, sector).projector()
        chunk = proj @ rho.matrix @ proj
        w = max(float(np.real(np.trace(chunk))), 0.0)
        weights[sector] = w
        energies[sector] = (
            float(np.real(np.trace(h_dense @ chunk))) / w if w > DEGENERACY_TOL else None
        )
    e_sel = energies[s.sector]
    e_rej = energies[-s.sector]
    if e_sel is None:
        trustworthy = None
    elif e_rej is None:
        trustworthy = True
    else:
        trustworthy = e_rej >= e_sel
    return OrderingDiagnostic(
        e_total=e_total,
        e_selected=e_sel,
        e_rejected=e_rej,
        weight_selected=weights[s.sector],
        weight_rejected=weights[-s.sector],
        verification_trustworthy=trustworthy,
    )


def anticommuting_qse(rho: DensityMatrix, h: PauliSum, a: PauliString) -> AnticommutingQse:
    """Expansion over {1, A} for unitary Hermitian A with {A, H} = 0.

    The closed form E² = (⟨H⟩² + |⟨HA⟩|²)/(1 - ⟨A⟩²) is checked against
    the numerically solved 2x2 generalized eigenproblem; the two roots
    ±E reflect the chirality pairing of the spectrum.
    """
    if a.n != rho.n or h.n != rho.n:
        raise DimensionError("operator and state qubit counts differ")
    if not a.is_hermitian:
        raise DomainError("the expansion operator must be Hermitian")
    for term, _ in h.terms():
        if commutes(term, a):
            raise DomainError(f"Hamiltonian term {term} commutes with {a}; expected anticommuting")
    h_exp = expectation(rho, h)
    a_exp = expectation(rho, a)
    # H*A is anti-Hermitian term by term, so -i H A is a Hermitian sum
    # whose expectation y gives Trace[H A rho] = i y.
    k_terms = []
    for term, coeff in h.terms():
        q = multiply(term, a)
        # phase is +/- i; folding -i against it leaves a real sign
        sign = {1: 1.0, 3: -1.0}[q.phase_exp]
        k_terms.append((q.unsigned(), coeff * sign))
    y = expectation(rho, PauliSum.from_terms(rho.n, k_terms))
    ha_exp = 1j * y
    b_condition = 1.0 - a_exp * a_exp
    if b_condition <= DEGENERACY_TOL:
        raise DegenerateOverlapError(f"|<A>| = {abs(a_exp)} leaves the overlap matrix singular")
    e_squared = (h_exp * h_exp + y * y) / b_condition
    h_qse = np.array([[h_exp, ha_exp], [-ha_exp, -h_exp]], dtype=complex)
    b = np.array([[1.0, a_exp], [a_exp, 1.0]], dtype=complex)
    numeric = np.linalg.eigvals(np.linalg.inv(b) @ h_qse)
    root = math.sqrt(e_squared)
    if not np.allclose(sorted(numeric.real), [-root, root], atol=1e-8) or np.abs(
        numeric.imag
    ).max() > 1e-8:
        raise DomainError("numerical eigenproblem disagrees with the closed form")
    return AnticommutingQse(
        e_squared=e_squared,
        roots=(-root, root),
        h_exp=h_exp,
        a_exp=a_exp,
        ha_exp=ha_exp,
        b_condition=b_condition,
    )


def coherent_chi(theta: float, phi: float, a_sq: float) -> tuple:
    """The pair chi± = (1 ± A e^{i phi})(1 ± A e^{-i phi}) = 1 ± 2A cos phi + A².

    The rotation angle theta does not enter; it is accepted so callers can
    pass the full coherent-error parametrization in one go.
    """
    del theta
    if abs(a_sq) > 1.0:
        raise DomainError(f"|A| must not exceed 1, got {a_sq}")
    base = 1.0 + a_sq * a_sq
    cross = 2.0 * a_sq * math.cos(phi)
    return base + cross, base - cross
