"""Timed gate circuits: ansatz factories, verification circuits, propagation.

A Circuit is a flat gate list with explicit start times.  Builders emit
layers of simultaneous gates, 20 ns each by default.  The three experiment
ansatz circuits are padded with idle time so their wall-clock durations
come out at 220 / 400 / 440 ns (11 / 20 / 22 slots at 20 ns); the minimal
CNOT-ladder decomposition used here has fewer layers than the hardware
compilation those totals were quoted for, and idle slots stand in for the
difference.  The idle slots are split between the two windows that
separate the basis changes from the CNOT ladder, because in the deeper
compilation that extra time is spent at the edges of the entangling
region where the register is fully basis-rotated, and decoherence
should act on that frame.

Conventions:
  * rx/ry/rz(theta) = exp(-i theta P / 2).
  * "prep" flips a qubit from |0> to |1> (an X gate, scheduled like any
    other single-qubit gate).
  * Basis-change rotations map a Pauli letter onto Z: for X the gate is
    ry(-pi/2), for Y it is rx(pi/2), chosen so that R |S=+1> = |0>.
  * Verification circuits accumulate the sector parity onto one measured
    wire; outcome bit b corresponds to sector (-1)**b.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CapacityError, DimensionError, DomainError
from .pauli import MAX_DENSE_QUBITS, PauliString, SymmetrySpec

__all__ = [
    "GATE_TIME_S",
    "Gate",
    "Circuit",
    "embed_unitary",
    "exp_pauli_layers",
    "ucc_2q",
    "ucc_4q",
    "ancilla_verification",
    "inline_verification",
    "propagate_pauli",
    "concatenate",
    "ROTATION_FACTORS_4Q",
]

GATE_TIME_S = 20e-9

_ROTATION_KINDS = ("rx", "ry", "rz")
_TWO_QUBIT_KINDS = ("cnot", "swap", "cz")
_ALL_KINDS = _ROTATION_KINDS + _TWO_QUBIT_KINDS + ("prep", "verify")

# The fixed Clifford applied before the transformed 4-qubit ansatz,
# exp(i pi/4 Y0X2) * exp(i pi/4 Y1X3), given here by its Pauli generators.
ROTATION_FACTORS_4Q = ("YIXI", "IYIX")

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_AXIS = {"rx": _SX, "ry": _SY, "rz": _SZ}


@dataclass(frozen=True)
class Gate:
    """One scheduled operation; ``verify`` is a zero-duration measurement marker."""

    kind: str
    qubits: tuple
    angle: float | None = None
    duration: float = GATE_TIME_S

    def __post_init__(self) -> None:
        if self.kind not in _ALL_KINDS:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise DomainError(f"repeated qubit in {self.kind} gate: {self.qubits}")
        want = 2 if self.kind in _TWO_QUBIT_KINDS else 1
        if len(self.qubits) != want:
            raise DomainError(f"{self.kind} gate takes {want} qubit(s), got {self.qubits}")
        if self.kind in _ROTATION_KINDS and self.angle is None:
            raise DomainError(f"{self.kind} gate needs an angle")
        if self.kind == "verify":
            object.__setattr__(self, "duration", 0.0)
        elif self.duration <= 0:
            raise DomainError("physical gates need a positive duration")

    @property
    def is_physical(self) -> bool:
        return self.kind != "verify"

    def unitary(self) -> np.ndarray:
        """Dense matrix on this gate's own qubits, first listed qubit outermost."""
        if self.kind in _ROTATION_KINDS:
            half = self.angle / 2.0
            return math.cos(half) * np.eye(2, dtype=complex) - 1j * math.sin(half) * _AXIS[self.kind]
        if self.kind == "prep":
            return _SX.copy()
        if self.kind == "cnot":
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        if self.kind == "swap":
            return np.array(
                [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
            )
        if self.kind == "cz":
            return np.diag([1, 1, 1, -1]).astype(complex)
        raise DomainError("verification markers have no unitary")


def embed_unitary(u: np.ndarray, qubits: tuple, n: int) -> np.ndarray:
    """Embed a k-qubit gate matrix into the full 2^n space.

    ``qubits`` lists the wires the gate acts on, matching the matrix's own
    qubit order; wire 0 is the most significant index bit.
    """
    k = len(qubits)
    if u.shape != (2**k, 2**k):
        raise DimensionError(f"gate on {k} qubit(s) needs shape {(2**k, 2**k)}, got {u.shape}")
    if any(q < 0 or q >= n for q in qubits):
        raise DimensionError(f"qubit index out of range for {n} wires: {qubits}")
    rest = [q for q in range(n) if q not in qubits]
    perm = list(qubits) + rest
    inv = np.argsort(perm)
    big = np.kron(u, np.eye(2 ** (n - k), dtype=complex))
    big = big.reshape((2,) * (2 * n))
    big = big.transpose(list(inv) + [n + i for i in inv])
    return big.reshape(2**n, 2**n)


@dataclass(frozen=True)
class Circuit:
    """A scheduled gate list on ``n_qubits`` wires.

    ``duration`` may exceed the last gate's end time; the remainder is idle
    (decoherence still acts there).  ``measured_wire`` marks the wire whose
    Z outcome encodes a symmetry sector, and ``wire_of[q]`` gives the wire
    holding logical qubit q after any SWAP shuffling (identity by default).
    """

    n_qubits: int
    gates: tuple
    start_times: tuple
    duration: float
    measured_wire: int | None = None
    wire_of: tuple = ()

    def __post_init__(self) -> None:
        if len(self.gates) != len(self.start_times):
            raise DimensionError("one start time per gate required")
        for g, t in zip(self.gates, self.start_times):
            if t < 0 or t + g.duration > self.duration + 1e-15:
                raise DomainError("gate schedule exceeds the circuit duration")
            if any(q >= self.n_qubits for q in g.qubits):
                raise DimensionError("gate qubit index exceeds wire count")
        if not self.wire_of:
            object.__setattr__(self, "wire_of", tuple(range(self.n_qubits)))

    def layers(self) -> list:
        """Physical gates grouped by start time, in schedule order."""
        grouped: dict = {}
        for g, t in zip(self.gates, self.start_times):
            if g.is_physical:
                grouped.setdefault(round(t * 1e12), []).append(g)
        return [grouped[t] for t in sorted(grouped)]

    def physical_gates(self):
        order = sorted(range(len(self.gates)), key=lambda i: (self.start_times[i], i))
        return [self.gates[i] for i in order if self.gates[i].is_physical]

    def unitary(self, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
        if self.n_qubits > max_qubits:
            raise CapacityError(f"dense unitary limited to {max_qubits} qubits")
        out = np.eye(2**self.n_qubits, dtype=complex)
        for g in self.physical_gates():
            out = embed_unitary(g.unitary(), g.qubits, self.n_qubits) @ out
        return out

    def to_json(self) -> str:
        payload = {
            "n_qubits": self.n_qubits,
            "duration_ns": self.duration * 1e9,
            "measured_wire": self.measured_wire,
            "wire_of": list(self.wire_of),
            "gates": [
                {
                    "kind": g.kind,
                    "qubits": list(g.qubits),
                    "angle": g.angle,
                    "start_ns": t * 1e9,
                    "duration_ns": g.duration * 1e9,
                }
                for g, t in zip(self.gates, self.start_times)
            ],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        try:
            payload = json.loads(text)
            gates = tuple(
                Gate(
                    kind=g["kind"],
                    qubits=tuple(g["qubits"]),
                    angle=g["angle"],
                    duration=g["duration_ns"] * 1e-9,
                )
                for g in payload["gates"]
            )
            starts = tuple(g["start_ns"] * 1e-9 for g in payload["gates"])
            return cls(
                n_qubits=payload["n_qubits"],
                gates=gates,
                start_times=starts,
                duration=payload["duration_ns"] * 1e-9,
                measured_wire=payload.get("measured_wire"),
                wire_of=tuple(payload.get("wire_of") or ()),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed circuit JSON: {exc}") from exc

    def widened(self, n_qubits: int) -> "Circuit":
        if n_qubits < self.n_qubits:
            raise DimensionError("cannot shrink a circuit")
        wire_of = self.wire_of + tuple(range(self.n_qubits, n_qubits))
        return replace(self, n_qubits=n_qubits, wire_of=wire_of)


class _LayerBuilder:
    """Accumulates layers of simultaneous gates scheduled back to back."""

    def __init__(self, n_qubits: int, gate_time: float):
        self.n = n_qubits
        self.gate_time = gate_time
        self.rows: list = []

    def add(self, *gates: Gate) -> None:
        gates = tuple(g for g in gates if g is not None)
        if not gates:
            return
        used: set = set()
        for g in gates:
            if used & set(g.qubits):
                raise DomainError("layer gates must act on disjoint wires")
            used |= set(g.qubits)
        self.rows.append(gates)

    def extend(self, rows) -> None:
        for row in rows:
            self.add(*row)

    def merge_parallel(self, *row_lists) -> None:
        """Interleave several independent layer sequences layer-by-layer."""
        for rows in zip(*[r + [()] * (max(map(len, row_lists)) - len(r)) for r in row_lists]):
            self.add(*[g for row in rows for g in row])

    def _ladder_span(self) -> tuple:
        """Row range [lo, hi) of the final CNOT ladder and its Z-rotation."""
        z = None
        for i in reversed(range(len(self.rows))):
            if any(g.kind == "rz" for g in self.rows[i]):
                z = i
                break
        if z is None:
            return None, None
        lo = z
        while lo > 0 and all(g.kind in _TWO_QUBIT_KINDS for g in self.rows[lo - 1]):
            lo -= 1
        hi = z + 1
        while hi < len(self.rows) and all(g.kind in _TWO_QUBIT_KINDS for g in self.rows[hi]):
            hi += 1
        return lo, hi

    def build(
        self,
        min_layers: int | None = None,
        measured_wire: int | None = None,
        wire_of: tuple = (),
        add_verify: bool = False,
    ) -> Circuit:
        if min_layers is not None and len(self.rows) > min_layers:
            raise DomainError(
                f"decomposition needs {len(self.rows)} layers, above the {min_layers}-slot budget"
            )
        slots = min_layers if min_layers is not None else len(self.rows)
        duration = slots * self.gate_time
        # Idle slots that pad the schedule up to min_layers stand in for the
        # deeper native-gate compilation the slot budget was quoted for.
        # That compilation packs its bare entanglers back to back and
        # spends the extra time on single-qubit dressing at the edges of
        # the exponential block, so the deficit is split between the two
        # windows separating the basis changes from the CNOT ladder: the
        # register decoheres there in the basis-rotated frame it would
        # physically occupy.  Circuits without a ladder keep the idle
        # tail at the end.
        deficit = slots - len(self.rows)
        p_lo, p_hi = self._ladder_span() if deficit > 0 else (None, None)
        lead = deficit // 2 if p_lo is not None else 0
        gates: list = []
        starts: list = []
        for i, row in enumerate(self.rows):
            slot = i
            if p_lo is not None and i >= p_lo:
                slot = i + lead if i < p_hi else i + deficit
            for g in row:
                gates.append(g)
                starts.append(slot * self.gate_time)
        if add_verify:
            if measured_wire is None:
                raise DomainError("verify marker needs a measured wire")
            gates.append(Gate("verify", (measured_wire,)))
            starts.append(duration)
        return Circuit(
            n_qubits=self.n,
            gates=tuple(gates),
            start_times=tuple(starts),
            duration=duration,
            measured_wire=measured_wire,
            wire_of=wire_of,
        )


def _basis_change(letter: str, qubit: int, gate_time: float, undo: bool = False):
    """Rotation mapping the letter onto Z (None for I/Z letters)."""
    if letter in ("I", "Z"):
        return None
    if letter == "X":
        angle = -math.pi / 2 if not undo else math.pi / 2
        return Gate("ry", (qubit,), angle, gate_time)
    angle = math.pi / 2 if not undo else -math.pi / 2
    return Gate("rx", (qubit,), angle, gate_time)


def exp_pauli_layers(generator: PauliString, alpha: float, gate_time: float = GATE_TIME_S) -> list:
    """Layers implementing exp(-i alpha/2 * G): basis changes, CNOT ladder, Rz.

    The generator must be Hermitian; a -1 phase is folded into the angle.
    """
    if not generator.is_hermitian:
        raise DomainError("exponential generator must be Hermitian")
    if generator.phase_exp == 2:
        alpha = -alpha
    letters = generator.letters
    active = [q for q, letter in enumerate(letters) if letter != "I"]
    if not active:
        raise DomainError("generator acts trivially on every qubit")
    rows: list = []
    rows.append([_basis_change(letters[q], q, gate_time) for q in active])
    for a, b in zip(active, active[1:]):
        rows.append([Gate("cnot", (a, b), duration=gate_time)])
    rows.append([Gate("rz", (active[-1],), alpha, gate_time)])
    for a, b in reversed(list(zip(active, active[1:]))):
        rows.append([Gate("cnot", (a, b), duration=gate_time)])
    rows.append([_basis_change(letters[q], q, gate_time, undo=True) for q in active])
    return [[g for g in row if g is not None] for row in rows if any(g is not None for g in row)]


def ucc_2q(theta: float, gate_time: float = GATE_TIME_S) -> Circuit:
    """Two-qubit pair ansatz exp(-i theta X0Y1) acting on |01>, 220 ns total."""
    b = _LayerBuilder(2, gate_time)
    b.add(Gate("prep", (1,), duration=gate_time))
    b.extend(exp_pauli_layers(PauliString.from_letters("XY"), 2.0 * theta, gate_time))
    return b.build(min_layers=11)


def ucc_4q(theta: float, rotated: bool = False, gate_time: float = GATE_TIME_S) -> Circuit:
    """Four-qubit double-excitation ansatz on |1100>.

    Plain form: exp(i theta Y0X1X2X3), 400 ns.  Rotated form: the fixed
    Clifford R (ROTATION_FACTORS_4Q, applied as its defining product of
    two Pauli-rotation exponentials, compiled like every other
    exponential here) followed by exp(i theta Y0Z1X2), 440 ns; the
    output equals R applied to the plain variant's output.
    """
    b = _LayerBuilder(4, gate_time)
    b.add(Gate("prep", (0,), duration=gate_time), Gate("prep", (1,), duration=gate_time))
    if not rotated:
        b.extend(exp_pauli_layers(PauliString.from_letters("YXXX"), -2.0 * theta, gate_time))
        return b.build(min_layers=20)
    factor_rows = [
        exp_pauli_layers(PauliString.from_letters(f), -math.pi / 2, gate_time)
        for f in ROTATION_FACTORS_4Q
    ]
    b.merge_parallel(*factor_rows)
    b.extend(exp_pauli_layers(PauliString.from_letters("YZXI"), -2.0 * theta, gate_time))
    return b.build(min_layers=22)


def _active_qubits(s: SymmetrySpec) -> list:
    active = [q for q, letter in enumerate(s.operator.letters) if letter != "I"]
    if not active:
        raise DomainError("symmetry operator acts trivially on every qubit")
    return active


def ancilla_verification(
    s: SymmetrySpec, local_only: bool = False, gate_time: float = GATE_TIME_S
) -> Circuit:
    """Parity measurement of S onto a fresh ancilla wire (index N).

    The default form couples every verified qubit straight to the ancilla.
    With ``local_only`` the ancilla is shuffled along the register with
    SWAP gates so that every interaction is between neighbours; logical
    qubits end up displaced, which ``wire_of`` records.  Either way the
    ancilla Z outcome bit b means sector (-1)**b.
    """
    active = _active_qubits(s)
    n = s.n
    letters = s.operator.letters
    b = _LayerBuilder(n + 1, gate_time)
    wire_of = list(range(n + 1))

    if not local_only or len(active) <= 2:
        b.add(*[_basis_change(letters[q], q, gate_time) for q in active])
        for q in active:
            b.add(Gate("cnot", (q, n), duration=gate_time))
        b.add(*[_basis_change(letters[q], q, gate_time, undo=True) for q in active])
        return b.build(measured_wire=n, add_verify=True)

    # Local variant: the carrier parity wire walks along the register.
    # Each verified qubit sees a 3-layer basis-change/CNOT/undo window; the
    # SWAP afterwards only relocates the finished qubit out of the way.
    carrier = n
    b.add(_basis_change(letters[active[0]], active[0], gate_time))
    b.add(
        Gate("cnot", (active[0], carrier), duration=gate_time),
        _basis_change(letters[active[1]], active[1], gate_time),
    )
    b.add(
        Gate("cnot", (active[1], carrier), duration=gate_time),
        _basis_change(letters[active[0]], active[0], gate_time, undo=True),
    )
    b.add(_basis_change(letters[active[1]], active[1], gate_time, undo=True))
    for k in range(2, len(active)):
        prev, here = active[k - 1], active[k]
        b.add(
            Gate("swap", (carrier, prev), duration=gate_time),
            _basis_change(letters[here], here, gate_time),
        )
        wire_of[carrier], wire_of[prev] = wire_of[prev], wire_of[carrier]
        carrier = prev
        b.add(Gate("cnot", (here, carrier), duration=gate_time))
        b.add(_basis_change(letters[here], here, gate_time, undo=True))
    logical_to_wire = [0] * (n + 1)
    for wire, logical in enumerate(wire_of):
        logical_to_wire[logical] = wire
    return b.build(measured_wire=carrier, wire_of=tuple(logical_to_wire), add_verify=True)


def inline_verification(
    s: SymmetrySpec, topology: str = "tree", gate_time: float = GATE_TIME_S
) -> Circuit:
    """Fan the S parity into the highest-indexed verified qubit, no ancilla.

    The basis changes are not undone: this is a final measurement, and
    observables are meant to be propagated through the circuit instead.
    """
    if topology not in ("tree", "linear"):
        raise DomainError(f"topology must be 'tree' or 'linear', got {topology!r}")
    active = _active_qubits(s)
    letters = s.operator.letters
    b = _LayerBuilder(s.n, gate_time)
    b.add(*[_basis_change(letters[q], q, gate_time) for q in active])
    if topology == "linear" or len(active) < 3:
        for a, t in zip(active, active[1:]):
            b.add(Gate("cnot", (a, t), duration=gate_time))
    else:
        survivors = list(active)
        while len(survivors) > 1:
            row = []
            nxt = []
            for i in range(0, len(survivors) - 1, 2):
                row.append(Gate("cnot", (survivors[i], survivors[i + 1]), duration=gate_time))
                nxt.append(survivors[i + 1])
            if len(survivors) % 2:
                nxt.append(survivors[-1])
            b.add(*row)
            survivors = nxt
    return b.build(measured_wire=active[-1], add_verify=True)


def concatenate(first: Circuit, second: Circuit) -> Circuit:
    """Schedule ``second`` after ``first`` on a shared register."""
    if first.measured_wire is not None:
        raise DomainError("cannot append after a measured circuit")
    if first.wire_of != tuple(range(first.n_qubits)):
        raise DomainError("cannot append after a wire-shuffled circuit")
    n = max(first.n_qubits, second.n_qubits)
    first = first.widened(n)
    second = second.widened(n)
    offset = first.duration
    return Circuit(
        n_qubits=n,
        gates=first.gates + second.gates,
        start_times=first.start_times + tuple(t + offset for t in second.start_times),
        duration=first.duration + second.duration,
        measured_wire=second.measured_wire,
        wire_of=second.wire_of,
    )


_CLIFFORD_PHASES = (1, 1j, -1, -1j)


@functools.lru_cache(maxsize=None)
def _conjugation_rule(kind: str, angle: float | None, local_letters: str):
    """Return (letters, phase) of G P G^dagger for a single gate, or None."""
    gate = Gate(kind, tuple(range(len(local_letters))), angle)
    u = gate.unitary()
    p = PauliString.from_letters(local_letters).dense()
    conj = u @ p @ u.conj().T
    k = len(local_letters)
    for cand in itertools.product("IXYZ", repeat=k):
        cand = "".join(cand)
        base = PauliString.from_letters(cand).dense()
        for phase in _CLIFFORD_PHASES:
            if np.allclose(conj, phase * base, atol=1e-9):
                return cand, phase
    return None


def propagate_pauli(circuit: Circuit, p: PauliString) -> PauliString:
    """Conjugate p through the circuit: returns U p U^dagger.

    Measuring the returned operator after the circuit ran equals measuring
    ``p`` on the input state.  Raises DomainError on non-Clifford gates.
    """
    if p.n != circuit.n_qubits:
        raise DimensionError("operator and circuit qubit counts differ")
    letters = list(p.letters)
    phase_exp = p.phase_exp
    for g in circuit.physical_gates():
        local = "".join(letters[q] for q in g.qubits)
        rule = _conjugation_rule(g.kind, g.angle, local)
        if rule is None:
            raise DomainError(f"gate {g.kind}({g.angle}) is not Clifford")
        new_letters, phase = rule
        for q, letter in zip(g.qubits, new_letters):
            letters[q] = letter
        phase_exp += _CLIFFORD_PHASES.index(phase)
    return PauliString.from_letters("".join(letters), (1, 1j, -1, -1j)[phase_exp % 4])
