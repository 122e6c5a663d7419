"""JSON descriptions of convex bodies.

A body document is a nested object tagged by "type", one of vpolytope,
ball, ellipsoid, hull, affine, polar.  Vectors are arrays of numbers,
matrices arrays of arrays.  parse_body validates as it walks the tree and
reports failures with the JSON path to the offending node; body_to_json
inverts the parse for every constructible variant.  The machine-readable
schema lives in schemas/body.schema.json and is reproduced by schema().
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, List, Union

import numpy as np

from .bodies import (AffineImage, AffineMap, Ball, BodyError, ConvexBody,
                     CrossSectionHull, Ellipsoid, EllipsoidBody, PolarBody,
                     VPolytope, affine_image, polar)

__all__ = ["BodyJSONError", "parse_body", "body_to_json", "schema",
           "schema_text"]

BODY_TYPES = ("vpolytope", "ball", "ellipsoid", "hull", "affine", "polar")


class BodyJSONError(ValueError):
    """Body document rejected; the message carries the JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _want(node: dict, key: str, path: str) -> Any:
    if key not in node:
        raise BodyJSONError(path, f"missing required field '{key}'")
    return node[key]


def _vector(value: Any, path: str) -> np.ndarray:
    arr = np.asarray(value, dtype=object)
    if arr.ndim != 1 or arr.size == 0:
        raise BodyJSONError(path, "expected a nonempty array of numbers")
    try:
        vec = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise BodyJSONError(path, "expected a nonempty array of numbers")
    if vec.ndim != 1 or not np.all(np.isfinite(vec)):
        raise BodyJSONError(path, "entries must be finite numbers")
    return vec


def _matrix(value: Any, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise BodyJSONError(path, "expected a nonempty array of rows")
    try:
        mat = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise BodyJSONError(path, "rows must be equal-length arrays of numbers")
    if mat.ndim != 2 or not np.all(np.isfinite(mat)):
        raise BodyJSONError(path, "rows must be equal-length arrays of finite numbers")
    return mat


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BodyJSONError(path, "expected a number")
    val = float(value)
    if not np.isfinite(val):
        raise BodyJSONError(path, "expected a finite number")
    return val


def _exponent(value: Any, path: str) -> float:
    """A norm exponent: a number >= 1, or the string 'inf' for the sup norm."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return float(np.inf)
        raise BodyJSONError(path, "expected a number or the string 'inf'")
    val = _number(value, path)
    if val < 1.0:
        raise BodyJSONError(path, "p must be at least 1 for convexity")
    return val


def _parse_node(node: Any, path: str) -> ConvexBody:
    if not isinstance(node, dict):
        raise BodyJSONError(path, "expected an object with a 'type' field")
    kind = _want(node, "type", path)
    if kind not in BODY_TYPES:
        raise BodyJSONError(f"{path}.type",
                            f"unknown type {kind!r}; expected one of {', '.join(BODY_TYPES)}")
    try:
        if kind == "vpolytope":
            verts = _matrix(_want(node, "vertices", path), f"{path}.vertices")
            span = np.linalg.matrix_rank(verts - verts[0],
                                         tol=1e-12 * max(1.0, np.abs(verts).max()))
            if span < verts.shape[1]:
                raise BodyJSONError(f"{path}.vertices",
                                    "vertices must affinely span the ambient space")
            return VPolytope(verts)
        if kind == "ball":
            p = _exponent(node.get("p", 2.0), f"{path}.p")
            radius = _number(node.get("radius", 1.0), f"{path}.radius")
            center = node.get("center")
            if center is not None:
                center = _vector(center, f"{path}.center")
            dim = node.get("dim")
            if dim is not None:
                if not isinstance(dim, int) or dim < 1:
                    raise BodyJSONError(f"{path}.dim", "dim must be a positive integer")
            elif center is None:
                dim = 2
            return Ball(p=p, radius=radius, center=center, dim=dim)
        if kind == "ellipsoid":
            center = _vector(_want(node, "center", path), f"{path}.center")
            shape = _matrix(_want(node, "shape", path), f"{path}.shape")
            if shape.shape[0] != shape.shape[1]:
                raise BodyJSONError(f"{path}.shape", "shape matrix must be square")
            if shape.shape[0] != center.shape[0]:
                raise BodyJSONError(f"{path}.shape",
                                    "shape matrix must match center dimension")
            if not np.allclose(shape, shape.T, atol=1e-12 * max(1.0, np.abs(shape).max())):
                raise BodyJSONError(f"{path}.shape", "shape matrix must be symmetric")
            eigmin = float(np.linalg.eigvalsh(0.5 * (shape + shape.T))[0])
            if eigmin <= 0.0:
                raise BodyJSONError(f"{path}.shape",
                                    "shape matrix must be positive definite")
            return EllipsoidBody(Ellipsoid(center, shape))
        if kind == "hull":
            sections = _want(node, "sections", path)
            if not isinstance(sections, list) or len(sections) < 2:
                raise BodyJSONError(f"{path}.sections",
                                    "expected an array of at least two sections")
            parsed = []
            for i, sec in enumerate(sections):
                spath = f"{path}.sections[{i}]"
                if not isinstance(sec, dict):
                    raise BodyJSONError(spath, "expected an object {at, body}")
                at = _number(_want(sec, "at", spath), f"{spath}.at")
                inner = _parse_node(_want(sec, "body", spath), f"{spath}.body")
                parsed.append((at, inner))
            return CrossSectionHull(parsed)
        if kind == "affine":
            matrix = _matrix(_want(node, "matrix", path), f"{path}.matrix")
            inner = _parse_node(_want(node, "body", path), f"{path}.body")
            offset = node.get("offset")
            if offset is not None:
                offset = _vector(offset, f"{path}.offset")
            else:
                offset = np.zeros(matrix.shape[0])
            if matrix.shape[0] != matrix.shape[1]:
                raise BodyJSONError(f"{path}.matrix", "matrix must be square")
            if matrix.shape[1] != inner.dim:
                raise BodyJSONError(f"{path}.matrix",
                                    "matrix columns must match the inner body dimension")
            if offset.shape[0] != matrix.shape[0]:
                raise BodyJSONError(f"{path}.offset",
                                    "offset length must match matrix rows")
            return affine_image(AffineMap(matrix, offset), inner)
        # polar
        inner = _parse_node(_want(node, "body", path), f"{path}.body")
        margin = node.get("margin")
        if margin is not None:
            margin = _number(margin, f"{path}.margin")
        return polar(inner, margin=margin)
    except BodyJSONError:
        raise
    except BodyError as exc:
        # constructor invariant failed; keep its message, add the location
        raise BodyJSONError(path, str(exc)) from exc


def parse_body(source: Union[str, Path, dict]) -> ConvexBody:
    """Build a ConvexBody from a JSON document, file path, or parsed dict.

    Raises BodyJSONError carrying the JSON path on schema violations and on
    constructor invariant failures (the message names the invariant).
    """
    if isinstance(source, dict):
        return _parse_node(source, "$")
    if isinstance(source, Path) or (isinstance(source, str)
                                    and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise BodyJSONError("$", f"cannot read body file: {exc}") from exc
    else:
        text = str(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BodyJSONError("$", f"invalid JSON: {exc}") from exc
    return _parse_node(doc, "$")


def body_to_json(body: ConvexBody) -> dict:
    """Inverse of parse_body for every constructible variant."""
    if isinstance(body, VPolytope):
        return {"type": "vpolytope", "vertices": body.vertices.tolist()}
    if isinstance(body, Ball):
        p = "inf" if np.isinf(body.p) else float(body.p)
        return {"type": "ball", "p": p, "radius": float(body.radius),
                "center": body.center.tolist()}
    if isinstance(body, EllipsoidBody):
        ell = body.ellipsoid
        return {"type": "ellipsoid", "center": ell.center.tolist(),
                "shape": ell.shape.tolist()}
    if isinstance(body, CrossSectionHull):
        return {"type": "hull", "sections": [
            {"at": float(t), "body": body_to_json(sec)}
            for t, sec in body.sections]}
    if isinstance(body, AffineImage):
        return {"type": "affine", "matrix": body.map.matrix.tolist(),
                "offset": body.map.offset.tolist(),
                "body": body_to_json(body.inner)}
    if isinstance(body, PolarBody):
        return {"type": "polar", "body": body_to_json(body.inner)}
    raise BodyError(f"no JSON form for body of type {type(body).__name__}")


def schema() -> dict:
    """The body document schema as a JSON Schema dict."""
    vector = {"type": "array", "items": {"type": "number"}, "minItems": 1}
    matrix = {"type": "array", "items": vector, "minItems": 1}
    node = {"$ref": "#/$defs/body"}
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "title": "Convex body description",
        "$ref": "#/$defs/body",
        "$defs": {
            "vector": vector,
            "matrix": matrix,
            "body": {
                "type": "object",
                "required": ["type"],
                "properties": {"type": {"enum": list(BODY_TYPES)}},
                "oneOf": [
                    {"properties": {"type": {"const": "vpolytope"},
                                    "vertices": matrix},
                     "required": ["type", "vertices"]},
                    {"properties": {"type": {"const": "ball"},
                                    "p": {"oneOf": [
                                        {"type": "number", "minimum": 1},
                                        {"const": "inf"}]},
                                    "radius": {"type": "number", "minimum": 0},
                                    "center": vector,
                                    "dim": {"type": "integer", "minimum": 1}},
                     "required": ["type"],
                     "description": "p defaults to 2, radius to 1; dim "
                                    "defaults to 2 when center is absent; "
                                    "the string 'inf' selects the sup norm"},
                    {"properties": {"type": {"const": "ellipsoid"},
                                    "center": vector, "shape": matrix},
                     "required": ["type", "center", "shape"],
                     "description": "shape is the symmetric positive definite "
                                    "matrix A of {x : (x-c)^T A (x-c) <= 1}"},
                    {"properties": {"type": {"const": "hull"},
                                    "sections": {
                                        "type": "array", "minItems": 2,
                                        "items": {
                                            "type": "object",
                                            "required": ["at", "body"],
                                            "properties": {
                                                "at": {"type": "number"},
                                                "body": node}}}},
                     "required": ["type", "sections"],
                     "description": "convex hull of cross-sections placed at "
                                    "first-coordinate value 'at'; section "
                                    "bodies live one dimension down"},
                    {"properties": {"type": {"const": "affine"},
                                    "matrix": matrix, "offset": vector,
                                    "body": node},
                     "required": ["type", "matrix", "body"],
                     "description": "image under x -> matrix @ x + offset; "
                                    "offset defaults to zero"},
                    {"properties": {"type": {"const": "polar"},
                                    "body": node,
                                    "margin": {"type": "number",
                                               "exclusiveMinimum": 0}},
                     "required": ["type", "body"],
                     "description": "polar dual; the inner body must contain "
                                    "the origin strictly"},
                ],
            },
        },
    }


def schema_text() -> str:
    return json.dumps(schema(), indent=2, sort_keys=False) + "\n"
