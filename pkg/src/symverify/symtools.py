"""Symmetry engineering: adding symmetries to Hamiltonians, rotating them.

Two tricks make verification cheaper or stronger:

  * Extension: block-double a Hamiltonian with a pivot P so the doubled
    operator commutes with X⊗P on one extra qubit.  The spectrum is
    preserved (each level twice), and the new symmetry can be verified.
  * Rotation: conjugate operators by R = exp(i pi/4 Q).  Strings
    commuting with Q are fixed; anticommuting ones map to the Hermitian
    string iPQ.  A well-chosen sequence turns a low-weight symmetry set
    into one that anticommutes with every likely error.

reduce_observables turns "we know these symmetry sectors" into fewer
measured operators: each Hamiltonian term is rewritten as a signed
multiple of a canonical representative of its coset under the fixed
symmetry group.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError, DomainError
from .pauli import PauliString, PauliSum, SymmetrySpec, commutes, multiply

__all__ = [
    "ExtensionMap",
    "ReconstructionRule",
    "ReductionPlan",
    "extend_pauli",
    "extend_hamiltonian",
    "extension_map",
    "rotate_pauli",
    "rotate_sequence",
    "reduce_observables",
]


@dataclass(frozen=True)
class ExtensionMap:
    """The pivot and the symmetry X⊗pivot it induces on the extended register."""

    pivot: PauliString
    new_symmetry: PauliString


def _prefixed(q: PauliString, letter: str) -> PauliString:
    return PauliString.from_letters(letter + q.letters, q.phase)


def extension_map(pivot: PauliString) -> ExtensionMap:
    if not pivot.is_hermitian:
        raise DomainError("pivot must be Hermitian")
    return ExtensionMap(pivot=pivot, new_symmetry=_prefixed(pivot.unsigned(), "X"))


def extend_pauli(q: PauliString, pivot: PauliString) -> PauliString:
    """Lift q to the extended register: I⊗q if [q,P]=0, Z⊗q if {q,P}=0.

    The new qubit is index 0 of the extended register.  The Z prefix is
    forced by the block form diag(Q, PQP) of the lift: PQP = -Q for an
    anticommuting term, and diag(Q, -Q) = Z⊗Q.  Only this choice keeps
    every lifted term commuting with the new symmetry X⊗P.
    """
    if q.n != pivot.n:
        raise DimensionError("operator and pivot qubit counts differ")
    return _prefixed(q, "I" if commutes(q, pivot) else "Z")


def extend_hamiltonian(h: PauliSum, pivot: PauliString) -> PauliSum:
    """Term-wise extension to the block form diag(H, PHP).

    The result commutes with X⊗pivot and its spectrum is the input
    spectrum with every multiplicity doubled (both blocks are unitarily
    equivalent to H).
    """
    if h.n != pivot.n:
        raise DimensionError("Hamiltonian and pivot qubit counts differ")
    return PauliSum.from_terms(
        h.n + 1, [(extend_pauli(p, pivot), c) for p, c in h.terms()]
    )


def rotate_pauli(p: PauliString, q: PauliString) -> PauliString:
    """Conjugate p by the Clifford rotation generated by q.

    Returns p unchanged when [p,q] = 0, else the Hermitian string iPQ
    (the image of p under exp(-i pi/4 Q) · p · exp(i pi/4 Q)).
    """
    if p.n != q.n:
        raise DimensionError("operator qubit counts differ")
    if not p.is_hermitian or not q.is_hermitian:
        raise DomainError("rotation needs Hermitian Pauli strings")
    if commutes(p, q):
        return p
    return multiply(p, q).with_phase_exp(1)


def rotate_sequence(p: PauliString, qs) -> PauliString:
    """Apply rotate_pauli successively for each generator in qs."""
    for q in qs:
        p = rotate_pauli(p, q)
    return p


@dataclass(frozen=True)
class ReconstructionRule:
    """⟨target⟩ = coefficient × ⟨measured⟩ inside the fixed sectors.

    ``measured`` is None for terms fully determined by the sectors
    (coefficient gives the value outright) and for terms anticommuting
    with a fixed symmetry (coefficient 0: their expectation vanishes).
    """

    target: str
    measured: str | None
    coefficient: float


@dataclass(frozen=True)
class ReductionPlan:
    """Measurement set plus per-term reconstruction rules for one Hamiltonian."""

    n: int
    measured: tuple
    rules: dict
    weights: dict

    def evaluate(self, values: dict) -> float:
        """Total ⟨H⟩ from measured expectation values keyed by letters."""
        total = 0.0
        for target, rule in self.rules.items():
            factor = 1.0 if rule.measured is None else values[rule.measured]
            total += self.weights[target] * rule.coefficient * factor
        return total


def reduce_observables(h: PauliSum, fixed) -> ReductionPlan:
    """Shrink the measurement set of h given known symmetry sectors.

    Every term is multiplied through the group generated by the fixed
    symmetry operators; the lexicographically smallest unsigned product
    becomes the coset representative to measure, and sector values fold
    into a ±1 coefficient.  Terms equivalent to identity need no
    measurement at all.
    """
    specs = list(fixed)
    n = h.n
    for spec in specs:
        if spec.n != n:
            raise DimensionError("symmetry and Hamiltonian qubit counts differ")
    for i, a in enumerate(specs):
        for b in specs[i + 1 :]:
            if not commutes(a.operator, b.operator):
                raise DomainError(
                    f"fixed symmetries {a.operator} and {b.operator} do not commute"
                )
    group = []
    for mask in range(2 ** len(specs)):
        op = PauliString.identity(n)
        sector = 1.0
        for k, spec in enumerate(specs):
            if mask >> k & 1:
                op = multiply(op, spec.operator)
                sector *= spec.sector
        group.append((op, sector))

    rules: dict = {}
    weights: dict = {}
    measured: set = set()
    for term, coeff in h.terms():
        weights[term.letters] = coeff
        if any(not commutes(term, spec.operator) for spec in specs):
            rules[term.letters] = ReconstructionRule(term.letters, None, 0.0)
            continue
        best = None
        for op, sector in group:
            prod = multiply(term, op)
            sign = {0: 1.0, 2: -1.0}[prod.phase_exp]
            cand = (prod.letters, sign * sector)
            if best is None or cand[0] < best[0]:
                best = cand
        rep, factor = best
        if set(rep) == {"I"}:
            rules[term.letters] = ReconstructionRule(term.letters, None, factor)
        else:
            rules[term.letters] = ReconstructionRule(term.letters, rep, factor)
            measured.add(rep)
    return ReductionPlan(
        n=n, measured=tuple(sorted(measured)), rules=rules, weights=weights
    )
