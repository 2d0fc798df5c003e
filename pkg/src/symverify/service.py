"""HTTP facade over the dataset and the experiment drivers.

The FastAPI application exposes the molecular dataset and the three
studies (dissociation sweep, decoherence scan, encoding comparison) as
JSON endpoints, so the command-line client or a plotting notebook can
drive them without importing the package.  Requests carry the complete
run configuration; responses embed a manifest recording that
configuration together with the dataset provenance and tool version,
which is enough to reproduce the run from the same dataset file.

Package errors map onto HTTP statuses by kind: configuration problems
give 400, unusable dataset files give 404, and failures inside a run
give 500.  The response detail carries a machine-readable ``kind`` field
("usage", "data", "run") that the command-line client translates into
its exit code.
"""

from __future__ import annotations

import math
import time

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field, field_validator

from . import __version__
from .chemdata import (
    ENCODINGS,
    MoleculeDataset,
    assemble,
    default_dataset_path,
    exact_ground_energy,
    load_dataset,
)
from .densim import NoiseModel
from .errors import DatasetError, DomainError, SymverifyError
from .experiments import (
    MITIGATIONS,
    SCAN_DISTANCE_ANGSTROM,
    SCAN_REFERENCE_TIME_S,
    ExperimentConfig,
    decoherence_scan,
    dissociation_sweep,
    engineering_comparison,
)

__all__ = [
    "ENCODING_ALIASES",
    "NoiseProfile",
    "SweepRequest",
    "NoiseScanRequest",
    "CompareRequest",
    "ValidateRequest",
    "SweepRow",
    "NoiseScanRow",
    "Manifest",
    "SweepResponse",
    "NoiseScanResponse",
    "ValidateResponse",
    "DatasetInfo",
    "create_app",
]

#: Short spellings accepted wherever an encoding name is expected.
ENCODING_ALIASES = {"2q": "two_qubit_bk", "4q": "four_qubit_jw"}

#: Agreement demanded between the two encodings' exact ground energies.
CROSS_ENCODING_TOL_HARTREE = 1e-8

#: Noise model with every channel switched off, for noiseless comparison
#: runs (the comparison driver treats a missing model as the default).
_NOISE_OFF = NoiseModel(
    t1=math.inf, tphi=math.inf, p_deph_1q=0.0, p_deph_2q=0.0, p_readout=0.0
)


class NoiseProfile(BaseModel):
    """JSON shape of the noise model; defaults are the reference values."""

    model_config = ConfigDict(extra="forbid")

    t1: float = 20e-6
    tphi: float = 20e-6
    p_deph_1q: float = 1e-4
    p_deph_2q: float = 1e-2
    p_readout: float = 1e-2
    duration_1q: float = 20e-9
    duration_2q: float = 20e-9

    def to_model(self) -> NoiseModel:
        return NoiseModel(**self.model_dump())


class SweepRequest(BaseModel):
    """One dissociation sweep, possibly over several mitigation methods.

    ``noise`` set to JSON null requests a noiseless run; leaving it out
    runs under the default profile.  ``distances`` of null sweeps every
    dataset distance.
    """

    model_config = ConfigDict(extra="forbid")

    encoding: str = "two_qubit_bk"
    mitigations: list[str] = Field(default=["none"], min_length=1)
    rotated: bool = False
    distances: list[float] | None = None
    noise: NoiseProfile | None = Field(default_factory=NoiseProfile)
    optimize_on: str = "mitigated"
    jobs: int = Field(default=1, ge=1)
    dataset: str | None = None

    @field_validator("encoding", mode="before")
    @classmethod
    def _expand_encoding(cls, value):
        if isinstance(value, str):
            value = ENCODING_ALIASES.get(value, value)
        if value not in ENCODINGS:
            raise ValueError(f"unknown encoding {value!r}")
        return value

    @field_validator("mitigations")
    @classmethod
    def _check_mitigations(cls, value):
        for name in value:
            if name not in MITIGATIONS:
                raise ValueError(f"unknown mitigation {name!r}")
        if len(set(value)) != len(value):
            raise ValueError("mitigation list contains duplicates")
        return value


class NoiseScanRequest(BaseModel):
    """Decoherence scan times in microseconds, plus the fixed context."""

    model_config = ConfigDict(extra="forbid")

    times_us: list[float] = Field(min_length=1)
    distance: float = SCAN_DISTANCE_ANGSTROM
    reference_time_us: float = SCAN_REFERENCE_TIME_S * 1e6
    dataset: str | None = None


class CompareRequest(BaseModel):
    """Six-curve encoding comparison under one shared noise profile."""

    model_config = ConfigDict(extra="forbid")

    distances: list[float] | None = None
    noise: NoiseProfile | None = Field(default_factory=NoiseProfile)
    jobs: int = Field(default=1, ge=1)
    dataset: str | None = None


class ValidateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dataset: str | None = None


class SweepRow(BaseModel):
    distance_angstrom: float
    method: str
    theta_star: float
    energy_hartree: float
    exact_hartree: float
    abs_error_hartree: float
    acceptance_probability: float


class NoiseScanRow(BaseModel):
    time_us: float
    swept_channel: str
    mitigation: str
    abs_error_hartree: float


class Manifest(BaseModel):
    """Reproduction record embedded in every study response."""

    command: str
    config: dict
    dataset_provenance: str
    tool_version: str
    duration_seconds: float


class SweepResponse(BaseModel):
    rows: list[SweepRow]
    manifest: Manifest


class NoiseScanResponse(BaseModel):
    rows: list[NoiseScanRow]
    manifest: Manifest


class ValidateResponse(BaseModel):
    ok: bool
    dataset_path: str
    distances_checked: int
    problems: list[str]


class DatasetInfo(BaseModel):
    path: str
    provenance: str
    encodings: list[str]
    distances: list[float]


def _resolve_dataset(path: str | None) -> tuple[str, MoleculeDataset]:
    resolved = path if path is not None else default_dataset_path()
    return resolved, load_dataset(resolved)


def _record_rows(result, method: str) -> list[SweepRow]:
    return [
        SweepRow(
            distance_angstrom=rec.distance,
            method=method,
            theta_star=rec.theta_star,
            energy_hartree=rec.energy,
            exact_hartree=rec.exact_energy,
            abs_error_hartree=abs(rec.error),
            acceptance_probability=rec.acceptance_probability,
        )
        for rec in result.records
    ]


def _manifest(command: str, request: BaseModel, provenance: str, started: float) -> Manifest:
    return Manifest(
        command=command,
        config=request.model_dump(mode="json"),
        dataset_provenance=provenance,
        tool_version=__version__,
        duration_seconds=time.perf_counter() - started,
    )


def _error_status(exc: SymverifyError) -> tuple[int, str]:
    if isinstance(exc, DatasetError):
        return 404, "data"
    if isinstance(exc, DomainError):
        return 400, "usage"
    return 500, "run"


def create_app() -> FastAPI:
    app = FastAPI(title="symverify", version=__version__)

    @app.exception_handler(SymverifyError)
    async def package_error(_request, exc: SymverifyError):
        status, kind = _error_status(exc)
        return JSONResponse(
            status_code=status,
            content={"detail": {"kind": kind, "message": str(exc)}},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/dataset", response_model=DatasetInfo)
    def dataset_info(path: str | None = None) -> DatasetInfo:
        resolved, dataset = _resolve_dataset(path)
        return DatasetInfo(
            path=resolved,
            provenance=dataset.provenance,
            encodings=list(ENCODINGS),
            distances=list(dataset.distances()),
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(request: SweepRequest) -> SweepResponse:
        started = time.perf_counter()
        _, dataset = _resolve_dataset(request.dataset)
        noise = request.noise.to_model() if request.noise is not None else None
        rows = []
        for mitigation in request.mitigations:
            config = ExperimentConfig(
                encoding=request.encoding,
                mitigation=mitigation,
                rotated=request.rotated,
                noise=noise,
                distances=tuple(request.distances) if request.distances else None,
                optimize_on=request.optimize_on,
            )
            result = dissociation_sweep(config, dataset=dataset, jobs=request.jobs)
            rows.extend(_record_rows(result, mitigation))
        return SweepResponse(
            rows=rows,
            manifest=_manifest("sweep", request, dataset.provenance, started),
        )

    @app.post("/noise-scan", response_model=NoiseScanResponse)
    def noise_scan(request: NoiseScanRequest) -> NoiseScanResponse:
        started = time.perf_counter()
        _, dataset = _resolve_dataset(request.dataset)
        scan = decoherence_scan(
            times=tuple(t * 1e-6 for t in request.times_us),
            dataset=dataset,
            distance=request.distance,
            reference_time=request.reference_time_us * 1e-6,
        )
        rows = []
        for row in scan:
            for channel, none_error, sqse_error in (
                ("t1", row.vary_t1_unmitigated, row.vary_t1_sqse),
                ("tphi", row.vary_tphi_unmitigated, row.vary_tphi_sqse),
            ):
                for mitigation, error in (("none", none_error), ("sqse", sqse_error)):
                    rows.append(
                        NoiseScanRow(
                            time_us=row.time_s * 1e6,
                            swept_channel=channel,
                            mitigation=mitigation,
                            abs_error_hartree=abs(error),
                        )
                    )
        return NoiseScanResponse(
            rows=rows,
            manifest=_manifest("noise-scan", request, dataset.provenance, started),
        )

    @app.post("/compare", response_model=SweepResponse)
    def compare(request: CompareRequest) -> SweepResponse:
        started = time.perf_counter()
        _, dataset = _resolve_dataset(request.dataset)
        noise = request.noise.to_model() if request.noise is not None else _NOISE_OFF
        curves = engineering_comparison(
            noise=noise,
            dataset=dataset,
            distances=tuple(request.distances) if request.distances else None,
            jobs=request.jobs,
        )
        rows = []
        for label, result in curves.items():
            rows.extend(_record_rows(result, label))
        return SweepResponse(
            rows=rows,
            manifest=_manifest("compare", request, dataset.provenance, started),
        )

    @app.post("/validate", response_model=ValidateResponse)
    def validate(request: ValidateRequest) -> ValidateResponse:
        resolved = request.dataset if request.dataset is not None else default_dataset_path()
        try:
            dataset = load_dataset(resolved)
        except DatasetError as exc:
            if isinstance(exc.__cause__, OSError):
                raise
            return ValidateResponse(
                ok=False, dataset_path=resolved, distances_checked=0, problems=[str(exc)]
            )
        problems = []
        for r in dataset.distances():
            energies = {
                encoding: exact_ground_energy(assemble(dataset.point(r, encoding)))
                for encoding in ENCODINGS
            }
            gap = abs(energies["two_qubit_bk"] - energies["four_qubit_jw"])
            if gap > CROSS_ENCODING_TOL_HARTREE:
                problems.append(
                    f"r = {r} angstrom: encoding ground energies disagree by "
                    f"{gap:.3e} hartree (tolerance {CROSS_ENCODING_TOL_HARTREE:.0e})"
                )
        return ValidateResponse(
            ok=not problems,
            dataset_path=resolved,
            distances_checked=len(dataset.distances()),
            problems=problems,
        )

    return app
