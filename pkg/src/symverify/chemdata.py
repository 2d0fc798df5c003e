"""Loading and validation of molecular-Hamiltonian coefficient datasets.

A dataset file carries, per bond distance, the Pauli coefficients of two
qubit encodings of the same molecule: a 2-qubit form

    H = h0 II + h1 IZ + h2 ZI + h3 XX + h4 YY + h5 ZZ

and a 4-qubit form

    H = hI I + sum_i h_i Z_i + sum_{i<j} h_ij Z_i Z_j
        + hs (XYYX + YXXY - XXYY - YYXX)

(the weight-4 strings listed left to right over qubits 0..3).  Both must
commute with their encoding's symmetry set; that is checked at load time
so downstream code can rely on it.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import CapacityError, DatasetError
from .pauli import PauliString, PauliSum, SymmetrySpec, commutes

__all__ = [
    "ENCODINGS",
    "MoleculePoint",
    "MoleculeDataset",
    "assemble",
    "default_dataset_path",
    "encoding_symmetries",
    "exact_ground_energy",
    "load_dataset",
]

ENCODINGS = ("two_qubit_bk", "four_qubit_jw")

DATASET_ENV_VAR = "SYMVERIFY_DATASET"

_TWO_QUBIT_WORDS = ("II", "IZ", "ZI", "XX", "YY", "ZZ")
_FOUR_QUBIT_WEIGHT4 = (
    ("XYYX", 1.0),
    ("YXXY", 1.0),
    ("XXYY", -1.0),
    ("YYXX", -1.0),
)
_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# Symmetries each encoding's Hamiltonian must commute with, and the
# sector holding the Hartree-Fock state (|01> and |1100> respectively).
_SYMMETRY_TABLE = {
    "two_qubit_bk": (("ZZ", -1),),
    "four_qubit_jw": (("ZZII", 1), ("ZIZI", -1), ("ZZZZ", 1)),
}


def encoding_symmetries(encoding: str) -> tuple:
    """SymmetrySpec tuple (operator, Hartree-Fock sector) for an encoding."""
    try:
        table = _SYMMETRY_TABLE[encoding]
    except KeyError:
        raise DatasetError(f"unknown encoding {encoding!r}") from None
    return tuple(
        SymmetrySpec(PauliString.from_letters(word), sector) for word, sector in table
    )


@dataclass(frozen=True)
class MoleculePoint:
    """Coefficients of one encoding at one bond distance (angstrom)."""

    bond_distance: float
    encoding: str
    coefficients: dict

    def __post_init__(self):
        if self.encoding not in ENCODINGS:
            raise DatasetError(f"unknown encoding {self.encoding!r}")
        if not (isinstance(self.bond_distance, float) and self.bond_distance > 0):
            raise DatasetError(
                f"bond distance must be positive, got {self.bond_distance!r}"
            )
        for name, value in self.coefficients.items():
            if not (isinstance(value, float) and math.isfinite(value)):
                raise DatasetError(
                    f"coefficient {name} at {self.bond_distance} angstrom "
                    f"is not a finite number: {value!r}"
                )


@dataclass(frozen=True)
class MoleculeDataset:
    """All points of a dissociation curve, both encodings per distance."""

    provenance: str
    points: tuple

    def distances(self) -> tuple:
        seen = []
        for p in self.points:
            if p.bond_distance not in seen:
                seen.append(p.bond_distance)
        return tuple(seen)

    def point(self, bond_distance: float, encoding: str) -> MoleculePoint:
        for p in self.points:
            if p.bond_distance == bond_distance and p.encoding == encoding:
                return p
        raise DatasetError(
            f"no {encoding} point at {bond_distance} angstrom in dataset"
        )

    def to_payload(self) -> dict:
        points = []
        for r in self.distances():
            two = self.point(r, "two_qubit_bk").coefficients
            four = self.point(r, "four_qubit_jw").coefficients
            points.append(
                {
                    "r_angstrom": r,
                    "two_qubit_bk": {f"h{k}": two[f"h{k}"] for k in range(6)},
                    "four_qubit_jw": {
                        "hI": four["hI"],
                        "h": [four[f"h{k}"] for k in range(4)],
                        "hij": [[i, j, four[f"h{i}{j}"]] for i, j in _PAIRS],
                        "hs": four["hs"],
                    },
                }
            )
        return {"provenance": self.provenance, "points": points}


def assemble(point: MoleculePoint) -> PauliSum:
    """The PauliSum for one point, with the documented term layout."""
    c = point.coefficients
    if point.encoding == "two_qubit_bk":
        return PauliSum.from_dict(
            {word: c[f"h{k}"] for k, word in enumerate(_TWO_QUBIT_WORDS)}
        )
    terms = {"IIII": c["hI"]}
    for i in range(4):
        terms["".join("Z" if k == i else "I" for k in range(4))] = c[f"h{i}"]
    for i, j in _PAIRS:
        terms["".join("Z" if k in (i, j) else "I" for k in range(4))] = c[f"h{i}{j}"]
    for word, sign in _FOUR_QUBIT_WEIGHT4:
        terms[word] = sign * c["hs"]
    return PauliSum.from_dict(terms)


def exact_ground_energy(h: PauliSum, max_qubits: int = 6) -> float:
    """Minimum eigenvalue by dense diagonalization (small registers only)."""
    if h.n > max_qubits:
        raise CapacityError(
            f"exact diagonalization limited to {max_qubits} qubits, got {h.n}"
        )
    return float(np.linalg.eigvalsh(h.dense())[0])


def _coerce_float(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DatasetError(f"{context}: expected a number, got {value!r}")
    return float(value)


def _parse_two_qubit(entry, context: str) -> dict:
    if not isinstance(entry, dict) or set(entry) != {f"h{k}" for k in range(6)}:
        raise DatasetError(f"{context}: two_qubit_bk must carry exactly h0..h5")
    return {k: _coerce_float(v, f"{context}.{k}") for k, v in entry.items()}


def _parse_four_qubit(entry, context: str) -> dict:
    if not isinstance(entry, dict) or set(entry) != {"hI", "h", "hij", "hs"}:
        raise DatasetError(f"{context}: four_qubit_jw must carry hI, h, hij, hs")
    out = {"hI": _coerce_float(entry["hI"], f"{context}.hI")}
    if not isinstance(entry["h"], list) or len(entry["h"]) != 4:
        raise DatasetError(f"{context}: h must list four single-qubit coefficients")
    for k, v in enumerate(entry["h"]):
        out[f"h{k}"] = _coerce_float(v, f"{context}.h[{k}]")
    if not isinstance(entry["hij"], list):
        raise DatasetError(f"{context}: hij must be a list of [i, j, value] triples")
    seen = set()
    for item in entry["hij"]:
        if not (isinstance(item, list) and len(item) == 3):
            raise DatasetError(f"{context}: malformed hij entry {item!r}")
        i, j, v = item
        if (i, j) not in _PAIRS:
            raise DatasetError(f"{context}: hij pair ({i}, {j}) is not an i<j pair")
        if (i, j) in seen:
            raise DatasetError(f"{context}: duplicate hij pair ({i}, {j})")
        seen.add((i, j))
        out[f"h{i}{j}"] = _coerce_float(v, f"{context}.hij[{i}{j}]")
    if seen != set(_PAIRS):
        raise DatasetError(f"{context}: hij must cover all six i<j pairs")
    out["hs"] = _coerce_float(entry["hs"], f"{context}.hs")
    return out


def _check_symmetries(point: MoleculePoint, context: str) -> None:
    h = assemble(point)
    hd = h.dense()
    for spec in encoding_symmetries(point.encoding):
        if not all(commutes(term, spec.operator) for term, _ in h.terms()):
            raise DatasetError(
                f"{context}: assembled {point.encoding} Hamiltonian does not "
                f"commute with symmetry {spec.operator.letters}"
            )
        # belt and braces at the dense level, since load time is cheap
        sd = spec.operator.dense()
        if np.max(np.abs(hd @ sd - sd @ hd)) > 1e-10:
            raise DatasetError(
                f"{context}: dense commutator with {spec.operator.letters} "
                "exceeds 1e-10"
            )


def default_dataset_path() -> str:
    """Bundled dataset, unless SYMVERIFY_DATASET points elsewhere."""
    override = os.environ.get(DATASET_ENV_VAR)
    if override:
        return override
    return str(resources.files("symverify").joinpath("data/h2_sto3g.json"))


def load_dataset(path: str | None = None) -> MoleculeDataset:
    """Parse and fully validate a dataset file.

    Any schema or physics violation raises DatasetError naming the
    offending point.
    """
    if path is None:
        path = default_dataset_path()
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"dataset {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise DatasetError("dataset root must be a JSON object")
    provenance = payload.get("provenance")
    if not isinstance(provenance, str) or not provenance:
        raise DatasetError("dataset must carry a provenance string")
    raw_points = payload.get("points")
    if not isinstance(raw_points, list) or not raw_points:
        raise DatasetError("dataset must carry a non-empty point list")

    points = []
    previous = 0.0
    for idx, raw in enumerate(raw_points):
        context = f"point {idx}"
        if not isinstance(raw, dict):
            raise DatasetError(f"{context}: expected an object")
        missing = {"r_angstrom", "two_qubit_bk", "four_qubit_jw"} - set(raw)
        if missing:
            raise DatasetError(f"{context}: missing fields {sorted(missing)}")
        r = _coerce_float(raw["r_angstrom"], f"{context}.r_angstrom")
        context = f"point {idx} (r = {r} angstrom)"
        if r <= previous:
            raise DatasetError(f"{context}: bond distances must strictly increase")
        previous = r
        for encoding, parse in (
            ("two_qubit_bk", _parse_two_qubit),
            ("four_qubit_jw", _parse_four_qubit),
        ):
            point = MoleculePoint(
                bond_distance=r,
                encoding=encoding,
                coefficients=parse(raw[encoding], context),
            )
            _check_symmetries(point, context)
            points.append(point)
    return MoleculeDataset(provenance=provenance, points=tuple(points))
