"""VQE driver: mitigation pipelines, parameter optimization, and studies.

A single experiment evaluates the molecular energy E(theta) of one dataset
point on the noisy simulator, through one of four pipelines:

``none``     expectation value on the raw output state.
``sqse``     post-selection in software: the energy ratio
             (<H> + s<HS>) / (1 + s<S>) built from raw Pauli traces, applied
             jointly over every encoding symmetry.
``ancilla``  a parity-measurement circuit couples the first symmetry onto a
             fresh ancilla wire; the ancilla is read out (with readout
             error), the target sector kept, and the energy reconstructed
             from the reduced observable set.
``inline``   the symmetry parity is fanned into a register qubit instead;
             observables are propagated through the verification circuit
             rather than undoing it.

On top of ``energy_at`` sit a deterministic scalar optimizer and the three
studies: the bond-dissociation sweep, the decoherence scan (T1 versus Tphi
at fixed bond distance), and the six-curve encoding comparison that pits the
two-qubit encoding against the plain and rotated four-qubit encodings.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .chemdata import (
    ENCODINGS,
    MoleculeDataset,
    MoleculePoint,
    assemble,
    encoding_symmetries,
    exact_ground_energy,
    load_dataset,
)
from .circuitlib import (
    ROTATION_FACTORS_4Q,
    Circuit,
    ancilla_verification,
    concatenate,
    inline_verification,
    propagate_pauli,
    ucc_2q,
    ucc_4q,
)
from .densim import (
    NoiseModel,
    expectation,
    measure_pauli,
    relabel_wires,
    run_circuit,
    trace_out,
)
from .errors import DomainError, ExperimentError, OptimizerError, SymverifyError
from .mitigate import postselected_energy
from .pauli import PauliString, PauliSum, SymmetrySpec, commutes, multiply
from .symtools import reduce_observables

__all__ = [
    "MITIGATIONS",
    "COMPARISON_LABELS",
    "DEFAULT_SCAN_TIMES",
    "OptimizerSettings",
    "ExperimentConfig",
    "SweepRecord",
    "SweepResult",
    "DecoherenceRow",
    "rotated_frame",
    "experiment_frame",
    "energy_at",
    "optimize",
    "dissociation_sweep",
    "decoherence_scan",
    "engineering_comparison",
]

MITIGATIONS = ("none", "ancilla", "inline", "sqse")

#: Decoherence times (seconds) scanned when the caller gives none.
DEFAULT_SCAN_TIMES = (2e-6, 5e-6, 1e-5, 2e-5, 5e-5, 1e-4)

#: The fixed partner decoherence time and bond distance of the scan study.
SCAN_REFERENCE_TIME_S = 20e-6
SCAN_DISTANCE_ANGSTROM = 0.75

#: Curve labels emitted by engineering_comparison, in presentation order.
COMPARISON_LABELS = (
    "two_qubit_none",
    "two_qubit_sqse",
    "four_qubit_none",
    "four_qubit_sqse",
    "four_qubit_rotated_none",
    "four_qubit_rotated_sqse",
)

_COARSE_POINTS = 25
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerSettings:
    """Scalar-minimizer knobs: bracketing grid plus golden-section refinement.

    ``bounds`` must contain theta = 0 so the Hartree-Fock point is always
    inside the search window; ``tolerance`` is the final bracket width in
    radians and ``max_evaluations`` caps the number of objective calls.
    """

    method: str = "golden"
    bounds: tuple = (-math.pi, math.pi)
    tolerance: float = 1e-6
    max_evaluations: int = 200

    def __post_init__(self) -> None:
        if self.method != "golden":
            raise DomainError(f"unknown optimizer method {self.method!r}")
        if len(self.bounds) != 2:
            raise DomainError("bounds must be a (low, high) pair")
        lo, hi = self.bounds
        if not lo < hi:
            raise DomainError(f"bounds must satisfy low < high, got {self.bounds}")
        if not lo <= 0.0 <= hi:
            raise DomainError(f"bounds must contain theta = 0, got {self.bounds}")
        if self.tolerance <= 0.0:
            raise DomainError("tolerance must be positive")
        if self.max_evaluations < _COARSE_POINTS + 2:
            raise DomainError(
                f"max_evaluations must allow the coarse scan, need > {_COARSE_POINTS + 1}"
            )


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that pins down one experiment family.

    ``distances`` selects a subset of dataset bond distances (None means
    all of them).  ``optimize_on`` decides whether the optimizer minimizes
    the mitigated energy (default) or the raw unmitigated energy, with the
    configured mitigation applied only to the final reported value.
    """

    encoding: str
    mitigation: str = "none"
    rotated: bool = False
    noise: NoiseModel | None = None
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    distances: tuple | None = None
    optimize_on: str = "mitigated"
    ancilla_local: bool = False
    inline_topology: str = "tree"

    def __post_init__(self) -> None:
        if self.encoding not in ENCODINGS:
            raise DomainError(f"unknown encoding {self.encoding!r}")
        if self.mitigation not in MITIGATIONS:
            raise DomainError(f"unknown mitigation {self.mitigation!r}")
        if self.rotated and self.encoding != "four_qubit_jw":
            raise DomainError("the rotated frame is defined for the four-qubit encoding only")
        if self.optimize_on not in ("raw", "mitigated"):
            raise DomainError(f"optimize_on must be 'raw' or 'mitigated', got {self.optimize_on!r}")
        if self.inline_topology not in ("tree", "linear"):
            raise DomainError(f"inline topology must be 'tree' or 'linear', got {self.inline_topology!r}")
        if self.distances is not None:
            cleaned = tuple(float(r) for r in self.distances)
            if not cleaned:
                raise DomainError("distance selector cannot be empty")
            if any(r <= 0 or not math.isfinite(r) for r in cleaned):
                raise DomainError("distances must be positive finite numbers")
            if len(set(cleaned)) != len(cleaned):
                raise DomainError("distance selector contains duplicates")
            object.__setattr__(self, "distances", tuple(sorted(cleaned)))


@dataclass(frozen=True)
class SweepRecord:
    """One optimized point: where the minimum sat and how wrong it was."""

    distance: float
    theta_star: float
    energy: float
    exact_energy: float
    error: float
    acceptance_probability: float

    def __post_init__(self) -> None:
        for name in ("distance", "theta_star", "energy", "exact_energy", "error"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite, got {getattr(self, name)}")
        if abs(self.error - (self.energy - self.exact_energy)) > 1e-12 * max(1.0, abs(self.energy)):
            raise DomainError("error field must equal energy - exact_energy")
        if not 0.0 < self.acceptance_probability <= 1.0 + 1e-9:
            raise DomainError(
                f"acceptance probability must lie in (0, 1], got {self.acceptance_probability}"
            )


@dataclass(frozen=True)
class SweepResult:
    """Per-distance records of one sweep, ordered by bond distance."""

    records: tuple

    def __post_init__(self) -> None:
        dists = [rec.distance for rec in self.records]
        if dists != sorted(dists):
            raise DomainError("sweep records must be ordered by distance")

    def distances(self) -> tuple:
        return tuple(rec.distance for rec in self.records)

    def record_at(self, distance: float) -> SweepRecord:
        for rec in self.records:
            if rec.distance == distance:
                return rec
        raise DomainError(f"no record at {distance} angstrom")

    def mean_abs_error(self) -> float:
        if not self.records:
            raise DomainError("sweep holds no records")
        return sum(abs(rec.error) for rec in self.records) / len(self.records)


@dataclass(frozen=True)
class DecoherenceRow:
    """Signed energy errors at one decoherence time tau.

    The vary-T1 columns set T1 = tau with Tphi held at the reference time;
    the vary-Tphi columns swap the roles.  Gate dephasing and readout error
    are off throughout, so decoherence is the only error source.
    """

    time_s: float
    vary_t1_unmitigated: float
    vary_t1_sqse: float
    vary_tphi_unmitigated: float
    vary_tphi_sqse: float


def rotated_frame(h: PauliSum, symmetries) -> tuple:
    """Conjugate a Hamiltonian and its symmetries by the fixed Clifford R.

    R is the pair of commuting pi/4 Pauli exponentials prepended by the
    rotated four-qubit ansatz; conjugating an anticommuting Pauli by one
    factor exp(i pi/4 Q) gives -i P Q.  Sectors follow any sign the
    operators pick up, so the returned spec set targets the same physical
    subspace as before.
    """
    factors = [PauliString.from_letters(f) for f in ROTATION_FACTORS_4Q]
    if any(q.n != h.n for q in factors):
        raise DomainError(f"the rotated frame is defined on {factors[0].n} qubits")

    def conjugate(p: PauliString) -> PauliString:
        for q in factors:
            if not commutes(p, q):
                p = multiply(p, q).with_phase_exp(3)
        return p

    new_terms = [(conjugate(term), coeff) for term, coeff in h.terms()]
    new_h = PauliSum.from_terms(h.n, new_terms)
    new_specs = []
    for spec in symmetries:
        op = conjugate(spec.operator)
        sign = {0: 1, 2: -1}[op.phase_exp]
        new_specs.append(SymmetrySpec(op.unsigned(), sign * spec.sector))
    return new_h, tuple(new_specs)


def experiment_frame(config: ExperimentConfig, point: MoleculePoint) -> tuple:
    """Hamiltonian and symmetry specs in the frame the circuit prepares."""
    if point.encoding != config.encoding:
        raise DomainError(
            f"point carries encoding {point.encoding!r} but config expects {config.encoding!r}"
        )
    h = assemble(point)
    specs = encoding_symmetries(config.encoding)
    if config.rotated:
        return rotated_frame(h, specs)
    return h, specs


def _ansatz(config: ExperimentConfig, theta: float) -> Circuit:
    if config.encoding == "two_qubit_bk":
        return ucc_2q(theta)
    return ucc_4q(theta, rotated=config.rotated)


def _wire_z_spec(n_qubits: int, wire: int, sector: int) -> SymmetrySpec:
    letters = "".join("Z" if w == wire else "I" for w in range(n_qubits))
    return SymmetrySpec(PauliString.from_letters(letters), sector)


def _discard_ancilla(dm, circuit: Circuit):
    """Trace out the measured ancilla and restore logical wire order."""
    removed = circuit.measured_wire
    reduced = trace_out(dm, removed)
    mapping = tuple(
        wire - 1 if wire > removed else wire
        for logical, wire in enumerate(circuit.wire_of)
        if logical != circuit.n_qubits - 1
    )
    return relabel_wires(reduced, mapping)


def energy_at(theta: float, config: ExperimentConfig, point: MoleculePoint) -> tuple:
    """Energy and acceptance probability of one pipeline run at fixed theta.

    Unmitigated runs record an acceptance probability of exactly 1; the
    mitigated pipelines return the survival weight of the kept sector.
    Raises RejectionError when the target sector carries no weight.
    """
    h, specs = experiment_frame(config, point)
    circuit = _ansatz(config, theta)

    if config.mitigation == "none":
        rho = run_circuit(circuit, config.noise)
        return expectation(rho, h), 1.0

    if config.mitigation == "sqse":
        rho = run_circuit(circuit, config.noise)
        verified = postselected_energy(rho, h, specs)
        return verified.value, min(verified.acceptance_probability, 1.0)

    # Circuit verification measures the first encoding symmetry; the energy
    # is then rebuilt from the reduced observable set that fixing this
    # symmetry leaves over.
    spec = specs[0]
    if config.mitigation == "ancilla":
        verification = ancilla_verification(spec, local_only=config.ancilla_local)
    else:
        verification = inline_verification(spec, topology=config.inline_topology)
    full = concatenate(circuit, verification)
    rho = run_circuit(full, config.noise)
    readout = config.noise.p_readout if config.noise is not None else 0.0
    marker = _wire_z_spec(full.n_qubits, full.measured_wire, spec.sector)
    kept, _ = measure_pauli(rho, marker, readout_error=readout)

    plan = reduce_observables(h, (spec,))
    if config.mitigation == "ancilla":
        post = _discard_ancilla(kept.state, full)
        values = {
            letters: expectation(post, PauliString.from_letters(letters))
            for letters in plan.measured
        }
    else:
        values = {
            letters: expectation(
                kept.state, propagate_pauli(verification, PauliString.from_letters(letters))
            )
            for letters in plan.measured
        }
    return plan.evaluate(values), min(kept.probability, 1.0)


def optimize(config: ExperimentConfig, point: MoleculePoint) -> tuple:
    """Minimize the energy over theta; returns (theta_star, SweepRecord).

    A coarse scan over the optimizer bounds brackets the minimum, then
    golden-section refinement shrinks the bracket below the tolerance.
    Coarse-scan ties are resolved toward theta = 0: for this ansatz family
    the reference state reappears at theta = +-pi with identical energy,
    and the narrow correlation dip hangs off the theta = 0 copy, so the
    refinement bracket must be centred there.  Fully deterministic.
    Raises OptimizerError when the evaluation budget runs out first; the
    exception carries the evaluation history on its ``evaluations``
    attribute.
    """
    settings = config.optimizer
    if config.optimize_on == "raw" and config.mitigation != "none":
        objective_config = replace(config, mitigation="none")
    else:
        objective_config = config
    trace: list = []

    def objective(theta: float) -> float:
        if len(trace) >= settings.max_evaluations:
            best_theta, best_value = min(trace, key=lambda pair: pair[1])
            err = OptimizerError(
                f"no convergence after {settings.max_evaluations} energy evaluations "
                f"(tolerance {settings.tolerance} rad); best so far "
                f"E({best_theta:.9f}) = {best_value:.9f}"
            )
            err.evaluations = tuple(trace)
            raise err
        value = energy_at(theta, objective_config, point)[0]
        trace.append((theta, value))
        return value

    lo, hi = settings.bounds
    grid = [lo + (hi - lo) * k / (_COARSE_POINTS - 1) for k in range(_COARSE_POINTS)]
    coarse = [objective(x) for x in grid]
    best = min(coarse)
    near_ties = [i for i in range(_COARSE_POINTS) if coarse[i] <= best + 1e-12]
    k = min(near_ties, key=lambda i: abs(grid[i]))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, _COARSE_POINTS - 1)]

    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = objective(x1)
    f2 = objective(x2)
    while b - a > settings.tolerance:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(x2)

    theta_star = min(trace, key=lambda pair: pair[1])[0]
    energy, acceptance = energy_at(theta_star, config, point)
    h, _ = experiment_frame(config, point)
    exact = exact_ground_energy(h)
    record = SweepRecord(
        distance=point.bond_distance,
        theta_star=theta_star,
        energy=energy,
        exact_energy=exact,
        error=energy - exact,
        acceptance_probability=acceptance,
    )
    return theta_star, record


def _optimized_record(config: ExperimentConfig, point: MoleculePoint) -> SweepRecord:
    return optimize(config, point)[1]


def dissociation_sweep(
    config: ExperimentConfig, dataset: MoleculeDataset | None = None, jobs: int = 1
) -> SweepResult:
    """Optimize every selected bond distance and tabulate the errors.

    Distances are independent work items; ``jobs > 1`` runs them in a
    process pool.  Results are always ordered by distance, and any failure
    is re-raised as ExperimentError naming the offending distance.
    """
    if jobs < 1:
        raise DomainError(f"jobs must be at least 1, got {jobs}")
    if dataset is None:
        dataset = load_dataset()
    distances = config.distances if config.distances is not None else dataset.distances()

    points = []
    for r in distances:
        try:
            points.append(dataset.point(r, config.encoding))
        except SymverifyError as exc:
            raise ExperimentError(f"sweep failed at {r} angstrom: {exc}") from exc

    records = []
    if jobs == 1:
        for point in points:
            try:
                records.append(_optimized_record(config, point))
            except SymverifyError as exc:
                raise ExperimentError(
                    f"sweep failed at {point.bond_distance} angstrom: {exc}"
                ) from exc
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_optimized_record, config, point) for point in points]
            for point, future in zip(points, futures):
                try:
                    records.append(future.result())
                except SymverifyError as exc:
                    raise ExperimentError(
                        f"sweep failed at {point.bond_distance} angstrom: {exc}"
                    ) from exc
    records.sort(key=lambda rec: rec.distance)
    return SweepResult(tuple(records))


def decoherence_scan(
    times=DEFAULT_SCAN_TIMES,
    dataset: MoleculeDataset | None = None,
    distance: float = SCAN_DISTANCE_ANGSTROM,
    reference_time: float = SCAN_REFERENCE_TIME_S,
) -> tuple:
    """Errors versus decoherence time on the two-qubit encoding.

    For each tau two noise models are built, one varying T1 and one varying
    Tphi (the partner held at ``reference_time``), with all gate and
    readout errors switched off.  Each model is optimized unmitigated and
    with post-selection, giving four signed errors per row.  At
    tau = reference_time both models coincide, so those two column pairs
    are identical by construction.
    """
    cleaned = tuple(float(t) for t in times)
    if not cleaned:
        raise DomainError("need at least one decoherence time")
    if any(t <= 0 or not math.isfinite(t) for t in cleaned):
        raise DomainError("decoherence times must be positive finite seconds")
    if dataset is None:
        dataset = load_dataset()
    point = dataset.point(distance, "two_qubit_bk")

    rows = []
    for tau in sorted(cleaned):
        errors = {}
        for family in ("t1", "tphi"):
            noise = NoiseModel(
                t1=tau if family == "t1" else reference_time,
                tphi=tau if family == "tphi" else reference_time,
                p_deph_1q=0.0,
                p_deph_2q=0.0,
                p_readout=0.0,
            )
            for mitigation in ("none", "sqse"):
                config = ExperimentConfig(
                    encoding="two_qubit_bk", mitigation=mitigation, noise=noise
                )
                try:
                    errors[family, mitigation] = _optimized_record(config, point).error
                except SymverifyError as exc:
                    raise ExperimentError(
                        f"decoherence scan failed at tau = {tau} s ({family}, {mitigation}): {exc}"
                    ) from exc
        rows.append(
            DecoherenceRow(
                time_s=tau,
                vary_t1_unmitigated=errors["t1", "none"],
                vary_t1_sqse=errors["t1", "sqse"],
                vary_tphi_unmitigated=errors["tphi", "none"],
                vary_tphi_sqse=errors["tphi", "sqse"],
            )
        )
    return tuple(rows)


def engineering_comparison(
    noise: NoiseModel | None = None,
    dataset: MoleculeDataset | None = None,
    distances: tuple | None = None,
    jobs: int = 1,
) -> dict:
    """Six dissociation curves comparing encodings and the rotated frame.

    Returns a dict keyed by COMPARISON_LABELS: the two-qubit encoding and
    the plain and rotated four-qubit encodings, each unmitigated and with
    full post-selection over every encoding symmetry.
    """
    if noise is None:
        noise = NoiseModel()
    if dataset is None:
        dataset = load_dataset()
    settings = (
        ("two_qubit_none", "two_qubit_bk", False, "none"),
        ("two_qubit_sqse", "two_qubit_bk", False, "sqse"),
        ("four_qubit_none", "four_qubit_jw", False, "none"),
        ("four_qubit_sqse", "four_qubit_jw", False, "sqse"),
        ("four_qubit_rotated_none", "four_qubit_jw", True, "none"),
        ("four_qubit_rotated_sqse", "four_qubit_jw", True, "sqse"),
    )
    curves = {}
    for label, encoding, rotated, mitigation in settings:
        config = ExperimentConfig(
            encoding=encoding,
            mitigation=mitigation,
            rotated=rotated,
            noise=noise,
            distances=distances,
        )
        try:
            curves[label] = dissociation_sweep(config, dataset=dataset, jobs=jobs)
        except SymverifyError as exc:
            raise ExperimentError(f"comparison curve {label!r} failed: {exc}") from exc
    return curves
