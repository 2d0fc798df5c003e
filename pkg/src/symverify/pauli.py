"""Pauli-string algebra on a symplectic bit representation.

A Pauli operator on N qubits is stored as two bitmasks plus a phase
exponent: bit k of ``x`` / ``z`` says whether the letter on qubit k
contains an X / Z factor (I=00, X=10, Y=11, Z=01), and the overall phase
is ``i**phase_exp``.  Qubit 0 is the leftmost letter and the most
significant Kronecker factor, so "IZ" acts as kron(I, Z) and the basis
state |01> has index 1.

Products and commutation checks reduce to XORs and popcounts on the
masks.  The phase bookkeeping follows from writing each string in the
normal form i**e * X^x * Z^z with Y = i XZ: commuting an X past a Z on
the same qubit costs a factor -1, everything else is counting Y letters.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DimensionError, DomainError

__all__ = [
    "MAX_DENSE_QUBITS",
    "PauliString",
    "PauliSum",
    "SymmetrySpec",
    "commutes",
    "multiply",
]

# Dense matrices grow as 4**N; past this point the toolkit refuses to build them.
MAX_DENSE_QUBITS = 6

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_TEXT_RE = re.compile(r"^([+-]?i?)([IXYZ]+)$")

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, slots=True)
class PauliString:
    """A signed N-qubit Pauli operator.

    Attributes:
        n: number of qubits.
        x: X-part bitmask (bit k set when qubit k carries X or Y).
        z: Z-part bitmask (bit k set when qubit k carries Z or Y).
        phase_exp: overall phase is i**phase_exp, reduced mod 4.
    """

    n: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError("PauliString needs at least one qubit")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise DimensionError("bitmask exceeds qubit count")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_letters(cls, letters: str, phase: complex = 1) -> "PauliString":
        """Build from a left-to-right letter string such as "XZIY"."""
        x = z = 0
        for k, letter in enumerate(letters):
            try:
                xb, zb = _LETTER_BITS[letter]
            except KeyError:
                raise DomainError(f"unknown Pauli letter {letter!r}") from None
            x |= xb << k
            z |= zb << k
        return cls(len(letters), x, z, _phase_to_exp(phase))

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse the text format ``[phase]LLLL`` with phase in {+, -, +i, -i}."""
        m = _TEXT_RE.match(text.strip())
        if m is None:
            raise DomainError(f"cannot parse Pauli string {text!r}")
        prefix, letters = m.groups()
        p = cls.from_letters(letters)
        return cls(p.n, p.x, p.z, _PREFIX_PHASE[prefix])

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @property
    def letters(self) -> str:
        return "".join(
            _BITS_LETTER[((self.x >> k) & 1, (self.z >> k) & 1)] for k in range(self.n)
        )

    @property
    def phase(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase_exp]

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return (self.x | self.z).bit_count()

    def unsigned(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, 0)

    def with_phase_exp(self, extra: int) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase_exp + extra)

    def commutes_with(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def dense(self, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
        """Dense 2^N x 2^N complex matrix, qubit 0 outermost in the Kronecker product."""
        if self.n > max_qubits:
            raise CapacityError(
                f"dense matrix for {self.n} qubits exceeds the {max_qubits}-qubit limit"
            )
        return self.phase * _dense_unsigned(self.n, self.x, self.z)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return self.with_phase_exp(2)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"


def _phase_to_exp(phase: complex) -> int:
    for exp, value in enumerate((1, 1j, -1, -1j)):
        if abs(phase - value) < 1e-12:
            return exp
    raise DomainError(f"phase must be one of +1, +i, -1, -i, got {phase!r}")


@functools.lru_cache(maxsize=4096)
def _dense_unsigned(n: int, x: int, z: int) -> np.ndarray:
    out = np.array([[1]], dtype=complex)
    for k in range(n):
        letter = _BITS_LETTER[((x >> k) & 1, (z >> k) & 1)]
        out = np.kron(out, _SINGLE[letter])
    out.setflags(write=False)
    return out


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product a * b with exact phase tracking."""
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")
    x = a.x ^ b.x
    z = a.z ^ b.z
    exp = (
        a.phase_exp
        + b.phase_exp
        + (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        - (x & z).bit_count()
        + 2 * (a.z & b.x).bit_count()
    )
    return PauliString(a.n, x, z, exp % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True when the two strings commute (symplectic inner product is even)."""
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


@dataclass(frozen=True)
class PauliSum:
    """Real linear combination of unsigned Pauli strings (a Hermitian observable).

    Coefficients are keyed by the (x, z) masks; terms with magnitude below
    1e-14 are pruned on construction.
    """

    n: int
    coeffs: dict = field(default_factory=dict)

    PRUNE_TOL = 1e-14

    def __post_init__(self) -> None:
        pruned = {
            key: float(c) for key, c in self.coeffs.items() if abs(c) > self.PRUNE_TOL
        }
        object.__setattr__(self, "coeffs", pruned)

    @classmethod
    def from_dict(cls, terms: dict) -> "PauliSum":
        """Build from a mapping of letter strings to real coefficients."""
        if not terms:
            raise DomainError("empty term mapping")
        lengths = {len(s) for s in terms}
        if len(lengths) != 1:
            raise DimensionError("terms act on different qubit counts")
        n = lengths.pop()
        coeffs: dict = {}
        for letters, c in terms.items():
            p = PauliString.from_letters(letters)
            coeffs[(p.x, p.z)] = coeffs.get((p.x, p.z), 0.0) + float(c)
        return cls(n, coeffs)

    @classmethod
    def from_terms(cls, n: int, terms) -> "PauliSum":
        """Build from (PauliString, coefficient) pairs, folding +/-1 phases in."""
        coeffs: dict = {}
        for p, c in terms:
            if p.n != n:
                raise DimensionError("term qubit count mismatch")
            if p.phase_exp == 0:
                sign = 1.0
            elif p.phase_exp == 2:
                sign = -1.0
            else:
                raise DomainError(f"imaginary phase on term {p}; sum would not be Hermitian")
            key = (p.x, p.z)
            coeffs[key] = coeffs.get(key, 0.0) + sign * float(c)
        return cls(n, coeffs)

    @classmethod
    def decompose(cls, matrix: np.ndarray, max_qubits: int = MAX_DENSE_QUBITS) -> "PauliSum":
        """Expand a Hermitian matrix over the Pauli basis, O_P = Tr[P O] / 2^N.

        Raises DomainError for non-Hermitian input and CapacityError past the
        dense-size limit.
        """
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
        dim = matrix.shape[0]
        n = dim.bit_length() - 1
        if 2**n != dim or n < 1:
            raise DimensionError(f"matrix dimension {dim} is not a power of two")
        if n > max_qubits:
            raise CapacityError(f"decompose limited to {max_qubits} qubits, got {n}")
        if np.max(np.abs(matrix - matrix.conj().T)) > 1e-10:
            raise DomainError("decompose expects a Hermitian matrix")
        dim_f = float(dim)
        coeffs: dict = {}
        for bits in itertools.product((0, 1), repeat=2 * n):
            x = sum(b << k for k, b in enumerate(bits[:n]))
            z = sum(b << k for k, b in enumerate(bits[n:]))
            c = np.einsum("ij,ji->", _dense_unsigned(n, x, z), matrix) / dim_f
            coeffs[(x, z)] = c.real
        return cls(n, coeffs)

    def terms(self):
        """Yield (unsigned PauliString, coefficient) pairs in a fixed letter order."""
        keyed = [(PauliString(self.n, x, z), c) for (x, z), c in self.coeffs.items()]
        keyed.sort(key=lambda pc: pc[0].letters)
        return keyed

    def coefficient(self, letters: str) -> float:
        p = PauliString.from_letters(letters)
        if p.n != self.n:
            raise DimensionError("letter string has the wrong length")
        return self.coeffs.get((p.x, p.z), 0.0)

    @property
    def n_terms(self) -> int:
        return len(self.coeffs)

    def dense(self, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
        if self.n > max_qubits:
            raise CapacityError(
                f"dense matrix for {self.n} qubits exceeds the {max_qubits}-qubit limit"
            )
        out = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for (x, z), c in self.coeffs.items():
            out += c * _dense_unsigned(self.n, x, z)
        return out

    def __mul__(self, other: PauliString) -> "PauliSum":
        """Right-multiply every term by a Pauli string.

        Only valid when each product phase stays real, e.g. when every term
        commutes with ``other``; anything else would leave the Pauli-basis
        reals and raises DomainError.
        """
        if other.n != self.n:
            raise DimensionError("qubit count mismatch")
        products = [
            (multiply(PauliString(self.n, x, z), other), c)
            for (x, z), c in self.coeffs.items()
        ]
        return PauliSum.from_terms(self.n, products)

    def commutes_with(self, other: PauliString) -> bool:
        return all(commutes(p, other) for p, _ in self.terms())


@dataclass(frozen=True)
class SymmetrySpec:
    """A Hermitian Pauli symmetry operator together with a target sector."""

    operator: PauliString
    sector: int

    def __post_init__(self) -> None:
        if self.sector not in (1, -1):
            raise DomainError(f"sector must be +1 or -1, got {self.sector}")
        if not self.operator.is_hermitian:
            raise DomainError("symmetry operator must carry a real phase (+1 or -1)")

    @property
    def n(self) -> int:
        return self.operator.n

    def projector(self, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
        """Dense projector (1 + s S) / 2 onto the target sector."""
        dim = 2**self.operator.n
        return 0.5 * (np.eye(dim, dtype=complex) + self.sector * self.operator.dense(max_qubits))
