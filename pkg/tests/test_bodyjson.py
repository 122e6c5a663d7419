"""JSON body documents: parsing, serialization, schema, error paths."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from affpoints import (
    AffineImage,
    Ball,
    BodyJSONError,
    CrossSectionHull,
    EllipsoidBody,
    PolarBody,
    VPolytope,
    body_to_json,
    parse_body,
)
from affpoints.bodyjson import BODY_TYPES, schema, schema_text

NET = np.array([[np.cos(t), np.sin(t)]
                for t in np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)])


def test_body_types_registry():
    assert BODY_TYPES == ("vpolytope", "ball", "ellipsoid", "hull", "affine",
                          "polar")


def test_parse_accepts_dict_string_and_path(tmp_path):
    doc = {"type": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]}
    from_dict = parse_body(doc)
    from_string = parse_body(json.dumps(doc))
    path = tmp_path / "tri.json"
    path.write_text(json.dumps(doc))
    from_path = parse_body(path)
    from_path_str = parse_body(str(path))
    for body in (from_dict, from_string, from_path, from_path_str):
        assert isinstance(body, VPolytope)
        np.testing.assert_array_equal(body.vertices, from_dict.vertices)


def test_ball_defaults():
    ball = parse_body({"type": "ball"})
    assert isinstance(ball, Ball)
    assert ball.dim == 2
    assert ball.p == 2.0
    assert ball.radius == 1.0
    np.testing.assert_array_equal(ball.center, 0.0)
    shifted = parse_body({"type": "ball", "center": [1, 2, 3], "p": 1, "radius": 0.5})
    assert shifted.dim == 3 and shifted.p == 1.0


def test_sup_norm_ball_round_trip():
    cube = parse_body({"type": "ball", "p": "inf", "center": [0, 0, 0]})
    assert np.isinf(cube.p)
    doc = body_to_json(cube)
    assert doc["p"] == "inf"
    again = parse_body(json.dumps(doc))
    assert np.isinf(again.p)


def test_round_trips_preserve_support_exactly():
    docs = [
        {"type": "vpolytope", "vertices": [[0.25, -1.5], [1.125, 0.375],
                                           [-0.75, 1.0]]},
        {"type": "ball", "p": 3.0, "radius": 1.25, "center": [0.5, -0.25]},
        {"type": "ellipsoid", "center": [0.1, 0.2],
         "shape": [[2.0, 0.5], [0.5, 1.0]]},
        {"type": "hull", "sections": [
            {"at": -0.5, "body": {"type": "ball", "dim": 2}},
            {"at": 0.75, "body": {"type": "ball", "radius": 0.25, "dim": 2}}]},
        {"type": "polar", "body": {"type": "ball", "p": 3.0, "dim": 2}},
    ]
    for doc in docs:
        first = parse_body(doc)
        second = parse_body(body_to_json(first))
        assert type(second) is type(first)
        if first.dim == 2:
            probe = NET
        else:
            rng = np.random.default_rng(0)
            probe = rng.standard_normal((64, first.dim))
        np.testing.assert_array_equal(first.support_batch(probe),
                                      second.support_batch(probe))


def test_affine_round_trip():
    doc = {"type": "affine", "matrix": [[2.0, 0.5], [0.0, 1.0]],
           "offset": [0.25, -1.0],
           "body": {"type": "hull", "sections": [
               {"at": -0.5, "body": {"type": "ball", "dim": 1}},
               {"at": 0.5, "body": {"type": "ball", "radius": 0.25, "dim": 1}}]}}
    body = parse_body(doc)
    assert isinstance(body, AffineImage)
    again = parse_body(body_to_json(body))
    np.testing.assert_array_equal(body.support_batch(NET),
                                  again.support_batch(NET))


def test_eager_polar_of_polytope_realizes_polytope():
    doc = {"type": "polar", "body": {"type": "vpolytope",
                                     "vertices": [[1, 1], [-1, 1], [1, -1],
                                                  [-1, -1]]}}
    dual = parse_body(doc)
    assert isinstance(dual, VPolytope)
    assert dual.support(np.array([1.0, 0.0])) == pytest.approx(1.0, abs=1e-12)


def test_polar_of_ball_realizes_dual_ball():
    dual = parse_body({"type": "polar", "body": {"type": "ball", "p": 3.0,
                                                 "dim": 2}})
    assert isinstance(dual, Ball)
    assert dual.p == pytest.approx(1.5)


def test_polar_of_hull_stays_lazy():
    dual = parse_body({"type": "polar", "body": {
        "type": "hull", "sections": [
            {"at": -0.5, "body": {"type": "ball", "dim": 2}},
            {"at": 0.5, "body": {"type": "ball", "radius": 0.5, "dim": 2}}]}})
    assert isinstance(dual, PolarBody)


def test_ellipsoid_parse():
    body = parse_body({"type": "ellipsoid", "center": [1.0, 0.0],
                       "shape": [[4.0, 0.0], [0.0, 1.0]]})
    assert isinstance(body, EllipsoidBody)
    assert body.support(np.array([1.0, 0.0])) == pytest.approx(1.5, abs=1e-12)


def test_hull_parse_realizes_cross_section_hull():
    body = parse_body({"type": "hull", "sections": [
        {"at": -1.0, "body": {"type": "ball", "dim": 2}},
        {"at": 1.0, "body": {"type": "ball", "radius": 0.5, "dim": 2}}]})
    assert isinstance(body, CrossSectionHull)
    assert body.dim == 3


@pytest.mark.parametrize("doc,path", [
    ({"type": "griffin"}, "$.type"),
    ({"type": "vpolytope"}, "$"),
    ({"type": "vpolytope", "vertices": [[0, 0], [1, 1]]}, "$.vertices"),
    ({"type": "ellipsoid", "center": [0, 0],
      "shape": [[1, 0], [0, -1]]}, "$.shape"),
    ({"type": "ellipsoid", "center": [0, 0],
      "shape": [[1, 2], [0, 1]]}, "$.shape"),
    ({"type": "ellipsoid", "center": [0, 0],
      "shape": [[1, 0, 0], [0, 1, 0]]}, "$.shape"),
    ({"type": "affine", "matrix": [[1, 0], [0, 1], [1, 1]],
      "body": {"type": "ball", "dim": 2}}, "$.matrix"),
    ({"type": "affine", "matrix": [[1, 0], [0, 1]], "offset": [1, 2, 3],
      "body": {"type": "ball", "dim": 2}}, "$.offset"),
    ({"type": "affine", "matrix": [[1, 0], [0, 0]],
      "body": {"type": "ball", "dim": 2}}, "$"),
    ({"type": "hull", "sections": [
        {"at": 0, "body": {"type": "ball", "dim": 2}}]}, "$.sections"),
    ({"type": "hull", "sections": [
        {"at": 0}, {"at": 1, "body": {"type": "ball", "dim": 2}}]},
     "$.sections[0]"),
    ({"type": "hull", "sections": [
        {"at": 0, "body": {"type": "ball", "dim": 2}},
        {"at": 1, "body": {"type": "vpolytope",
                           "vertices": [[0, 0], [1, 1]]}}]},
     "$.sections[1].body.vertices"),
    ({"type": "polar", "body": {"type": "vpolytope",
                                "vertices": [[1, 1], [2, 1], [1, 2]]}}, "$"),
    ({"type": "ball", "radius": "big"}, "$.radius"),
    ({"type": "ball", "p": 0.5, "dim": 2}, "$.p"),
    ({"type": "ball", "p": "sup", "dim": 2}, "$.p"),
    ([1, 2, 3], "$"),
])
def test_error_paths(doc, path):
    with pytest.raises(BodyJSONError) as excinfo:
        parse_body(doc)
    assert excinfo.value.path == path
    assert str(excinfo.value).startswith(path + ":")


def test_missing_file_reports_root_path(tmp_path):
    with pytest.raises(BodyJSONError) as excinfo:
        parse_body(str(tmp_path / "nope.json"))
    assert excinfo.value.path == "$"


def test_schema_document_matches_module():
    here = Path(__file__).resolve().parent.parent
    stored = (here / "schemas" / "body.schema.json").read_text()
    assert stored == schema_text()
    doc = schema()
    assert doc["$schema"].endswith("draft-07/schema#")
    body_def = doc["$defs"]["body"]
    assert tuple(body_def["properties"]["type"]["enum"]) == BODY_TYPES
    variants = {v["properties"]["type"]["const"] for v in body_def["oneOf"]}
    assert variants == set(BODY_TYPES)
