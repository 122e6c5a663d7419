"""Command line interface: reports, exit codes, config overrides."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from affpoints.bodyjson import schema_text
from affpoints.cli import main

TRIANGLE = {"type": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]}
SQUARE = {"type": "vpolytope",
          "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]}
CUBE = {"type": "ball", "p": "inf", "radius": 1.0, "center": [0, 0, 0]}


@pytest.fixture
def body_file(tmp_path):
    def write(doc, name="body.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_schema_flag(capsys):
    code, out, err = _run(capsys, ["--schema"])
    assert code == 0
    assert out == schema_text()


def test_missing_subcommand_is_usage_error(capsys):
    code, out, err = _run(capsys, [])
    assert code == 2
    assert "subcommand" in err


def test_ellipsoid_john_square(capsys, body_file):
    path = body_file(SQUARE)
    code, out, err = _run(capsys, ["ellipsoid", "john", "--body", path])
    assert code == 0
    report = json.loads(out)
    np.testing.assert_allclose(report["center"], 0.0, atol=1e-8)
    np.testing.assert_allclose(report["shape"], np.eye(2), atol=1e-7)
    assert report["residual"] <= report["tol"]


def test_ellipsoid_loewner_cube_contacts(capsys, body_file):
    path = body_file(CUBE)
    code, out, err = _run(capsys, ["ellipsoid", "loewner", "--body", path])
    assert code == 0
    report = json.loads(out)
    np.testing.assert_allclose(report["center"], 0.0, atol=1e-6)
    np.testing.assert_allclose(report["shape"],
                               np.eye(3) / 3.0, atol=1e-5)
    assert len(report["contacts"]) == 8
    weights = [c["weight"] for c in report["contacts"]]
    assert sum(weights) == pytest.approx(1.0, abs=1e-6)


def test_points_square_all_maps(capsys, body_file):
    path = body_file(SQUARE)
    code, out, err = _run(capsys, ["points", "--body", path])
    assert code == 0
    report = json.loads(out)
    assert sorted(report) == ["g", "j", "l", "s"]
    for name, entry in report.items():
        np.testing.assert_allclose(entry["value"], 0.0, atol=1e-6)
        assert entry["error"] >= 0.0
        assert entry["method"]
    assert report["g"]["method"] == "closed-form"
    assert report["g"]["error"] == 0.0


def test_points_subset_selection(capsys, body_file):
    path = body_file(TRIANGLE)
    code, out, err = _run(capsys, ["points", "--body", path, "--which", "g,j"])
    assert code == 0
    report = json.loads(out)
    assert sorted(report) == ["g", "j"]
    np.testing.assert_allclose(report["g"]["value"], [1 / 3, 1 / 3], atol=1e-9)


def test_points_rejects_unknown_map(capsys, body_file):
    path = body_file(TRIANGLE)
    code, out, err = _run(capsys, ["points", "--body", path, "--which", "g,x"])
    assert code == 1
    assert "x" in err


def test_symmetry_square(capsys, body_file):
    path = body_file(SQUARE)
    code, out, err = _run(capsys, ["symmetry", "--body", path])
    assert code == 0
    report = json.loads(out)
    assert report["order"] == 8
    assert report["fixed_space"]["dim"] == 0
    np.testing.assert_allclose(report["fixed_space"]["base"], 0.0, atol=1e-9)
    assert 2 <= len(report["generators"]) <= 3
    assert report["closure_residual"] <= 1e-9


def test_phi_square_coincidence(capsys, body_file):
    path = body_file(SQUARE)
    code, out, err = _run(capsys, ["phi", "--body", path,
                                   "--p1", "g", "--p2", "s"])
    assert code == 0
    report = json.loads(out)
    assert report["phi"] == 1.0
    assert report["delta"] == 0.0


def test_phi_default_pair_is_jl(capsys, body_file):
    path = body_file(TRIANGLE)
    code, out, err = _run(capsys, ["phi", "--body", path])
    assert code == 0
    report = json.loads(out)
    assert report["p1"]["name"] == "j" and report["p2"]["name"] == "l"
    assert 2.0 / 3.0 - 1e-6 <= report["phi"] <= 1.0


def test_dualzeros_triangle(capsys, body_file):
    path = body_file(TRIANGLE)
    code, out, err = _run(capsys, ["dualzeros", "--body", path,
                                   "--point", "g"])
    assert code == 0
    report = json.loads(out)
    assert len(report["zeros"]) == 1
    np.testing.assert_allclose(report["zeros"][0], [1 / 3, 1 / 3], atol=1e-5)


def test_dist_identical_maps(capsys):
    code, out, err = _run(capsys, ["dist", "--p1", "g", "--p2", "g",
                                   "--bodies", "3", "--seed", "0"])
    assert code == 0
    report = json.loads(out)
    assert report["distance_lower_bound"] == 0.0


def test_family_verify(capsys):
    code, out, err = _run(capsys, ["family", "verify", "--dmin", "2",
                                   "--dmax", "5"])
    assert code == 0
    report = json.loads(out)
    assert [row["d"] for row in report["rows"]] == [2, 3, 4, 5]
    assert report["ok"]
    for row in report["rows"]:
        assert row["ok"]
        assert max(row["outer_residual"], row["barycenter_residual"]) <= 1e-10
        assert row["t1"] > 0.0 and row["t2"] > 0.0


def test_family_phi_table_csv(capsys):
    code, out, err = _run(capsys, ["family", "phi-table", "--dmin", "3",
                                   "--dmax", "6"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "d,phi,bound,ratio"
    assert len(lines) == 5
    ratios = [float(line.split(",")[3]) for line in lines[1:]]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))


def test_family_phi_table_json(capsys):
    code, out, err = _run(capsys, ["family", "phi-table", "--dmin", "3",
                                   "--dmax", "4", "--format", "json"])
    assert code == 0
    report = json.loads(out)
    assert report["columns"] == ["d", "phi", "bound", "ratio"]
    assert [row[0] for row in report["rows"]] == [3, 4]


def test_family_bad_range(capsys):
    code, out, err = _run(capsys, ["family", "verify", "--dmin", "6",
                                   "--dmax", "3"])
    assert code == 2


def test_config_override_roundtrip(capsys, body_file):
    path = body_file(SQUARE)
    code, out, err = _run(capsys, ["--set", "samples.sphere=512",
                                   "points", "--body", path,
                                   "--which", "g"])
    assert code == 0
    from affpoints import CONFIG
    assert CONFIG.sphere_samples == 512


def test_config_override_bad_key(capsys):
    code, out, err = _run(capsys, ["--set", "tol.bogus=1", "dist",
                                   "--p1", "g", "--p2", "g"])
    assert code == 2
    assert "tol.bogus" in err


def test_bad_json_is_exit_two(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"type": "griffin"}')
    code, out, err = _run(capsys, ["points", "--body", str(path)])
    assert code == 2
    assert "$.type" in err


def test_missing_body_file_is_exit_two(capsys, tmp_path):
    code, out, err = _run(capsys, ["points", "--body",
                                   str(tmp_path / "none.json")])
    assert code == 2


def test_flat_body_rejected_at_parse(capsys, body_file):
    flat3 = {"type": "vpolytope",
             "vertices": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]}
    path = body_file(flat3)
    code, out, err = _run(capsys, ["ellipsoid", "loewner", "--body", path])
    assert code == 2
    assert "$.vertices" in err


def test_symmetry_without_vertices_is_exit_one(capsys, body_file):
    hull_doc = {"type": "polar", "body": {
        "type": "hull", "sections": [
            {"at": -0.5, "body": {"type": "ball", "dim": 2}},
            {"at": 0.5, "body": {"type": "ball", "radius": 0.5, "dim": 2}}]}}
    path = body_file(hull_doc)
    code, out, err = _run(capsys, ["symmetry", "--body", path])
    assert code == 1


def test_reports_are_deterministic(capsys, body_file):
    path = body_file(TRIANGLE)
    code1, out1, _ = _run(capsys, ["points", "--body", path])
    code2, out2, _ = _run(capsys, ["points", "--body", path])
    assert code1 == code2 == 0
    assert out1 == out2


def test_report_keys_are_sorted(capsys, body_file):
    path = body_file(SQUARE)
    code, out, err = _run(capsys, ["phi", "--body", path])
    assert code == 0
    report = json.loads(out)
    assert out == json.dumps(report, indent=2, sort_keys=True) + "\n"
