"""Time-resolved density-matrix simulation of scheduled circuits.

The noise model follows the hardware picture the experiments assume:

  * Amplitude damping toward |0> with rate 1/T1 and pure dephasing with
    rate 1/Tphi act on every qubit during every time window, including
    the window occupied by a gate and any trailing idle time, so a
    circuit of wall-clock duration D always accumulates D worth of
    decoherence.
  * Each gate additionally dephases every qubit it touches, with
    probability 1e-4 (one-qubit) or 1e-2 (two-qubit) by default.
  * Symmetry measurements can be corrupted by a symmetric readout bit
    flip with probability epsilon.

Within a layer the order is: gate unitaries, then the decay window, then
the per-gate dephasing kicks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuitlib import Circuit, embed_unitary
from .errors import CapacityError, DimensionError, DomainError, RejectionError
from .pauli import MAX_DENSE_QUBITS, PauliString, PauliSum, SymmetrySpec

__all__ = [
    "NoiseModel",
    "DensityMatrix",
    "MeasurementOutcome",
    "initial_state",
    "apply_unitary",
    "apply_amplitude_damping",
    "apply_dephasing",
    "apply_decay",
    "expectation",
    "measure_pauli",
    "run_circuit",
    "trace_out",
    "relabel_wires",
]


@dataclass(frozen=True)
class NoiseModel:
    """Hardware error rates; times in seconds, probabilities dimensionless."""

    t1: float = 20e-6
    tphi: float = 20e-6
    p_deph_1q: float = 1e-4
    p_deph_2q: float = 1e-2
    p_readout: float = 1e-2
    duration_1q: float = 20e-9
    duration_2q: float = 20e-9

    def __post_init__(self) -> None:
        if self.t1 <= 0 or self.tphi <= 0:
            raise DomainError("T1 and Tphi must be positive (math.inf disables them)")
        for name in ("p_deph_1q", "p_deph_2q", "p_readout"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {p}")
        if self.duration_1q <= 0 or self.duration_2q <= 0:
            raise DomainError("gate durations must be positive")


@dataclass(frozen=True)
class DensityMatrix:
    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.matrix.shape != (2**self.n, 2**self.n):
            raise DimensionError(
                f"density matrix for {self.n} qubit(s) needs shape {(2**self.n,) * 2}"
            )

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def validate(self, atol: float = 1e-9) -> None:
        """Raise unless trace-one, Hermitian and positive semidefinite."""
        if abs(self.trace - 1.0) > atol:
            raise DomainError(f"trace is {self.trace}, not 1")
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=atol):
            raise DomainError("matrix is not Hermitian")
        if np.linalg.eigvalsh(self.matrix).min() < -atol:
            raise DomainError("matrix has a negative eigenvalue")


@dataclass(frozen=True)
class MeasurementOutcome:
    """One branch of a symmetry measurement; state is None when impossible."""

    sector: int
    probability: float
    state: DensityMatrix | None


def initial_state(bits: str) -> DensityMatrix:
    """Computational basis state, e.g. "1100"; qubit 0 is the left bit."""
    if not bits or set(bits) - {"0", "1"}:
        raise DomainError(f"bit string must be non-empty 0/1 characters, got {bits!r}")
    n = len(bits)
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense simulation limited to {MAX_DENSE_QUBITS} qubits")
    rho = np.zeros((2**n, 2**n), dtype=complex)
    idx = int(bits, 2)
    rho[idx, idx] = 1.0
    return DensityMatrix(n, rho)


def apply_unitary(dm: DensityMatrix, u: np.ndarray, qubits: tuple) -> DensityMatrix:
    big = embed_unitary(u, qubits, dm.n)
    return DensityMatrix(dm.n, big @ dm.matrix @ big.conj().T)


def _apply_kraus(dm: DensityMatrix, kraus: list, qubit: int) -> DensityMatrix:
    out = np.zeros_like(dm.matrix)
    for k in kraus:
        big = embed_unitary(k, (qubit,), dm.n)
        out += big @ dm.matrix @ big.conj().T
    return DensityMatrix(dm.n, out)


def apply_amplitude_damping(dm: DensityMatrix, gamma: float, qubit: int) -> DensityMatrix:
    """Decay |1> -> |0> with probability gamma on one qubit."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"damping probability must lie in [0, 1], got {gamma}")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return _apply_kraus(dm, [k0, k1], qubit)


def apply_dephasing(dm: DensityMatrix, p: float, qubit: int) -> DensityMatrix:
    """Apply Z with probability p on one qubit: (1-p) rho + p Z rho Z."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"dephasing probability must lie in [0, 1], got {p}")
    if p == 0.0:
        return dm
    z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    zfull = embed_unitary(z, (qubit,), dm.n)
    return DensityMatrix(dm.n, (1.0 - p) * dm.matrix + p * (zfull @ dm.matrix @ zfull))


def apply_decay(dm: DensityMatrix, noise: NoiseModel, duration: float) -> DensityMatrix:
    """T1 relaxation plus Tphi dephasing on every qubit for one time window."""
    if duration < 0:
        raise DomainError("decay window cannot be negative")
    if duration == 0:
        return dm
    gamma = 1.0 - math.exp(-duration / noise.t1) if math.isfinite(noise.t1) else 0.0
    p = 0.5 * (1.0 - math.exp(-duration / noise.tphi)) if math.isfinite(noise.tphi) else 0.0
    for q in range(dm.n):
        if gamma:
            dm = apply_amplitude_damping(dm, gamma, q)
        if p:
            dm = apply_dephasing(dm, p, q)
    return dm


def expectation(dm: DensityMatrix, observable) -> float:
    """Tr[O rho] for a Hermitian PauliString or PauliSum."""
    if isinstance(observable, PauliString):
        if not observable.is_hermitian:
            raise DomainError("expectation needs a Hermitian operator")
        op = observable.dense()
    elif isinstance(observable, PauliSum):
        op = observable.dense()
    else:
        raise DomainError(f"cannot take expectation of {type(observable).__name__}")
    if op.shape != dm.matrix.shape:
        raise DimensionError("observable and state qubit counts differ")
    val = complex(np.einsum("ij,ji->", op, dm.matrix))
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise DomainError(f"expectation came out complex: {val}")
    return float(val.real)


def measure_pauli(
    dm: DensityMatrix, spec: SymmetrySpec, readout_error: float = 0.0
) -> tuple:
    """Measure a +/-1 Pauli symmetry, optionally through a noisy readout.

    Returns (kept, rejected) branches, the kept one being spec.sector.
    With readout error epsilon the observed-s branch mixes in the wrong
    sector: p_s = (1-e) q_s + e q_-s and the post state is the matching
    convex combination of both projections.  Raises RejectionError when
    the kept branch has zero probability.
    """
    if spec.n != dm.n:
        raise DimensionError("symmetry and state qubit counts differ")
    if not 0.0 <= readout_error <= 1.0:
        raise DomainError(f"readout error must lie in [0, 1], got {readout_error}")
    proj = {s: SymmetrySpec(spec.operator, s).projector() for s in (1, -1)}
    chunks = {s: proj[s] @ dm.matrix @ proj[s] for s in (1, -1)}
    weights = {s: max(float(np.real(np.trace(chunks[s]))), 0.0) for s in (1, -1)}
    eps = readout_error

    def branch(s: int) -> MeasurementOutcome:
        p = (1.0 - eps) * weights[s] + eps * weights[-s]
        if p <= 0.0:
            return MeasurementOutcome(s, 0.0, None)
        post = ((1.0 - eps) * chunks[s] + eps * chunks[-s]) / p
        return MeasurementOutcome(s, p, DensityMatrix(dm.n, post))

    kept = branch(spec.sector)
    rejected = branch(-spec.sector)
    if kept.state is None:
        raise RejectionError(
            f"sector {spec.sector:+d} of {spec.operator} has zero weight; nothing to keep"
        )
    return kept, rejected


def run_circuit(
    circuit: Circuit, noise: NoiseModel | None = None, initial: DensityMatrix | None = None
) -> DensityMatrix:
    """Evolve through the schedule: per layer, gates then decoherence."""
    if circuit.n_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense simulation limited to {MAX_DENSE_QUBITS} qubits")
    dm = initial if initial is not None else initial_state("0" * circuit.n_qubits)
    if dm.n != circuit.n_qubits:
        raise DimensionError("initial state and circuit qubit counts differ")
    elapsed = 0.0
    grouped: dict = {}
    for g, t in zip(circuit.gates, circuit.start_times):
        if g.is_physical:
            grouped.setdefault(round(t * 1e12), []).append((t, g))
    for key in sorted(grouped):
        start = grouped[key][0][0]
        layer = [g for _, g in grouped[key]]
        if noise is not None and start > elapsed + 1e-15:
            dm = apply_decay(dm, noise, start - elapsed)
        for g in layer:
            dm = apply_unitary(dm, g.unitary(), g.qubits)
        window = max(g.duration for g in layer)
        if noise is not None:
            dm = apply_decay(dm, noise, window)
            for g in layer:
                p = noise.p_deph_1q if len(g.qubits) == 1 else noise.p_deph_2q
                for q in g.qubits:
                    dm = apply_dephasing(dm, p, q)
        elapsed = start + window
    if noise is not None and circuit.duration > elapsed + 1e-15:
        dm = apply_decay(dm, noise, circuit.duration - elapsed)
    return dm


def trace_out(dm: DensityMatrix, wire: int) -> DensityMatrix:
    """Partial trace over one wire."""
    if not 0 <= wire < dm.n:
        raise DimensionError(f"wire {wire} out of range for {dm.n} qubits")
    n = dm.n
    t = dm.matrix.reshape((2,) * (2 * n))
    t = np.trace(t, axis1=wire, axis2=n + wire)
    return DensityMatrix(n - 1, t.reshape(2 ** (n - 1), 2 ** (n - 1)))


def relabel_wires(dm: DensityMatrix, wire_of: tuple) -> DensityMatrix:
    """Gather logical qubits back into order: wire_of[q] is q's current wire."""
    if sorted(wire_of) != list(range(dm.n)):
        raise DimensionError(f"wire map must permute 0..{dm.n - 1}, got {wire_of}")
    n = dm.n
    axes = list(wire_of) + [n + w for w in wire_of]
    t = dm.matrix.reshape((2,) * (2 * n)).transpose(axes)
    return DensityMatrix(n, t.reshape(2**n, 2**n))
