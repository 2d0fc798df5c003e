"""Command-layer tests: exit codes, messages, and file round trips."""

import json

import pytest

from coeffgen.cli import main
from coeffgen.dataset import GeneratorConfig, build_payload


def test_generate_single_point(tmp_path, capsys):
    out = tmp_path / "one.json"
    assert main(["generate", "--distances", "0.7414", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert [p["r_angstrom"] for p in payload["points"]] == [0.7414]
    assert "wrote 1 point to" in capsys.readouterr().out


def test_generated_file_passes_primary_validation(tmp_path):
    symverify_cli = pytest.importorskip("symverify.cli")
    out = tmp_path / "one.json"
    assert main(["generate", "--distances", "0.7414", "--out", str(out)]) == 0
    assert symverify_cli.main(["validate", "--dataset", str(out)]) == 0


def test_generate_small_grid(tmp_path, capsys):
    out = tmp_path / "two.json"
    assert main(["generate", "--distances", "0.5,0.75", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert [p["r_angstrom"] for p in payload["points"]] == [0.5, 0.75]
    assert "wrote 2 points to" in capsys.readouterr().out


def test_generate_rejects_bad_grids(tmp_path, capsys):
    out = str(tmp_path / "bad.json")
    assert main(["generate", "--distances", "0.75,0.5", "--out", out]) == 2
    assert "strictly increasing" in capsys.readouterr().err
    assert main(["generate", "--distances", ",", "--out", out]) == 2
    assert "empty distance grid" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["generate", "--distances", "abc", "--out", out])
    assert info.value.code == 2


def test_generate_rejects_unknown_basis(tmp_path, capsys):
    out = str(tmp_path / "bad.json")
    assert main(["generate", "--distances", "0.75", "--basis", "6-31G", "--out", out]) == 2
    assert "STO-3G" in capsys.readouterr().err


def test_verify_fresh_dataset(tmp_path, capsys):
    out = tmp_path / "one.json"
    assert main(["generate", "--distances", "0.7414", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["verify", str(out)]) == 0
    assert "all 1 point match FCI" in capsys.readouterr().out


def test_verify_flags_perturbed_point(tmp_path, capsys):
    payload = build_payload(GeneratorConfig(distances_angstrom=[0.7414]))
    payload["points"][0]["two_qubit_bk"]["h3"] += 1e-3
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    assert main(["verify", str(path)]) == 1
    captured = capsys.readouterr()
    assert "FAIL 0.7414 angstrom" in captured.out
    assert "1 point of 1 disagree" in captured.out


def test_verify_empty_dataset(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"provenance": "test", "points": []}))
    assert main(["verify", str(path)]) == 1
    assert "no points" in capsys.readouterr().err


def test_verify_missing_file(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "absent.json")]) == 1
    assert "cannot read dataset" in capsys.readouterr().err
