"""Dataset loading, assembly, and ground-energy oracle tests.

The frozen equilibrium energy comes from the generator toolchain's
full-CI value, which itself reproduces the standard published STO-3G
result for this molecule.
"""

import json

import numpy as np
import pytest

from symverify.chemdata import (
    ENCODINGS,
    MoleculePoint,
    assemble,
    default_dataset_path,
    encoding_symmetries,
    exact_ground_energy,
    load_dataset,
)
from symverify.errors import CapacityError, DatasetError
from symverify.pauli import PauliSum

EQUILIBRIUM = 0.7414
E_FCI_EQUILIBRIUM = -1.1372701672351342


@pytest.fixture(scope="module")
def dataset():
    return load_dataset()


def write_payload(tmp_path, payload):
    path = tmp_path / "dataset.json"
    path.write_text(json.dumps(payload))
    return str(path)


class TestLoading:
    def test_bundled_dataset_shape(self, dataset):
        distances = dataset.distances()
        assert len(distances) >= 20
        assert distances[0] == 0.25
        assert distances[-1] == 2.5
        assert EQUILIBRIUM in distances
        assert all(b > a for a, b in zip(distances, distances[1:]))
        assert dataset.provenance

    def test_both_encodings_at_every_distance(self, dataset):
        for r in dataset.distances():
            for encoding in ENCODINGS:
                point = dataset.point(r, encoding)
                assert point.bond_distance == r

    def test_missing_point_lookup_raises(self, dataset):
        with pytest.raises(DatasetError):
            dataset.point(0.123456, "two_qubit_bk")

    def test_round_trip_is_identity(self, dataset, tmp_path):
        path = write_payload(tmp_path, dataset.to_payload())
        again = load_dataset(path)
        assert again == dataset

    def test_env_var_override(self, dataset, tmp_path, monkeypatch):
        path = write_payload(tmp_path, dataset.to_payload())
        monkeypatch.setenv("SYMVERIFY_DATASET", path)
        assert default_dataset_path() == path
        assert load_dataset() == dataset

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError, match="cannot read"):
            load_dataset(str(tmp_path / "absent.json"))

    def test_empty_point_list(self, tmp_path):
        path = write_payload(tmp_path, {"provenance": "x", "points": []})
        with pytest.raises(DatasetError, match="non-empty"):
            load_dataset(path)

    def test_non_increasing_distances(self, dataset, tmp_path):
        payload = dataset.to_payload()
        payload["points"] = [payload["points"][1], payload["points"][0]]
        path = write_payload(tmp_path, payload)
        with pytest.raises(DatasetError, match="strictly increase"):
            load_dataset(path)

    def test_corrupt_hij_pair_names_point(self, dataset, tmp_path):
        payload = dataset.to_payload()
        entry = payload["points"][3]["four_qubit_jw"]
        entry["hij"][0] = [1, 0, entry["hij"][0][2]]
        path = write_payload(tmp_path, payload)
        with pytest.raises(DatasetError, match=r"point 3 .*\(1, 0\)"):
            load_dataset(path)

    def test_nonfinite_coefficient_rejected(self, dataset, tmp_path):
        payload = dataset.to_payload()
        payload["points"][0]["two_qubit_bk"]["h3"] = float("nan")
        path = write_payload(tmp_path, payload)
        with pytest.raises(DatasetError):
            load_dataset(path)

    def test_missing_provenance(self, dataset, tmp_path):
        payload = dataset.to_payload()
        del payload["provenance"]
        path = write_payload(tmp_path, payload)
        with pytest.raises(DatasetError, match="provenance"):
            load_dataset(path)


class TestAssemble:
    def test_two_qubit_identity_only(self):
        point = MoleculePoint(
            bond_distance=1.0,
            encoding="two_qubit_bk",
            coefficients={f"h{k}": (1.0 if k == 0 else 0.0) for k in range(6)},
        )
        h = assemble(point)
        assert h.coefficient("II") == 1.0
        assert all(c == 0.0 for p, c in h.terms() if p.letters != "II")

    def test_four_qubit_quartic_signs(self):
        coeffs = {"hI": 0.0, "hs": 1.0}
        coeffs.update({f"h{i}": 0.0 for i in range(4)})
        coeffs.update({f"h{i}{j}": 0.0 for i in range(4) for j in range(i + 1, 4)})
        h = assemble(
            MoleculePoint(
                bond_distance=1.0, encoding="four_qubit_jw", coefficients=coeffs
            )
        )
        assert h.coefficient("XYYX") == 1.0
        assert h.coefficient("YXXY") == 1.0
        assert h.coefficient("XXYY") == -1.0
        assert h.coefficient("YYXX") == -1.0

    def test_assembled_hamiltonians_commute_with_symmetries(self, dataset):
        for encoding in ENCODINGS:
            h = assemble(dataset.point(EQUILIBRIUM, encoding))
            for spec in encoding_symmetries(encoding):
                assert h.commutes_with(spec.operator)

    def test_hartree_fock_matrix_element_matches_across_encodings(self, dataset):
        h2 = assemble(dataset.point(EQUILIBRIUM, "two_qubit_bk")).dense()
        h4 = assemble(dataset.point(EQUILIBRIUM, "four_qubit_jw")).dense()
        assert h2[1, 1].real == pytest.approx(h4[12, 12].real, abs=1e-10)


class TestGroundEnergy:
    def test_single_z(self):
        assert exact_ground_energy(PauliSum.from_dict({"Z": 1.0})) == pytest.approx(
            -1.0, abs=1e-12
        )

    def test_xx_plus_zz(self):
        # eigenvalues of XX + ZZ are {2, 0, 0, -2}
        h = PauliSum.from_dict({"XX": 1.0, "ZZ": 1.0})
        assert exact_ground_energy(h) == pytest.approx(-2.0, abs=1e-12)

    def test_capacity_limit(self):
        h = PauliSum.from_dict({"Z" * 7: 1.0})
        with pytest.raises(CapacityError):
            exact_ground_energy(h)

    def test_equilibrium_matches_generator_fci(self, dataset):
        h = assemble(dataset.point(EQUILIBRIUM, "two_qubit_bk"))
        assert exact_ground_energy(h) == pytest.approx(E_FCI_EQUILIBRIUM, abs=1e-8)

    def test_cross_encoding_agreement_everywhere(self, dataset):
        for r in dataset.distances():
            e2 = exact_ground_energy(assemble(dataset.point(r, "two_qubit_bk")))
            e4 = exact_ground_energy(assemble(dataset.point(r, "four_qubit_jw")))
            assert abs(e2 - e4) <= 1e-8, f"encodings disagree at {r} angstrom"

    def test_curve_shape(self, dataset):
        """Energy drops to a minimum near equilibrium and rises toward
        dissociation, staying below zero past 0.4 angstrom."""
        energies = {
            r: exact_ground_energy(assemble(dataset.point(r, "two_qubit_bk")))
            for r in dataset.distances()
        }
        rs = sorted(energies)
        e_min = min(energies.values())
        r_min = min(energies, key=energies.get)
        assert abs(r_min - EQUILIBRIUM) < 0.05
        assert e_min == pytest.approx(E_FCI_EQUILIBRIUM, abs=1e-4)
        assert energies[rs[0]] > energies[r_min]
        assert energies[rs[-1]] > energies[r_min]
        assert energies[rs[-1]] < -0.9
