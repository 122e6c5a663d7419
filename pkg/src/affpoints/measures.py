"""Symmetry measures, duality zeros, and the empirical point distance.

The measure phi compares two affine invariant points through the chord they
span: phi = 1 - ||p1 - p2|| / vol_1(chord).  Coincident points sit on the
degenerate branch phi = 1.  The duality search scans an interior grid for
translations z making a point of the polar body vanish, and the distance
estimate maximizes point disagreement over random bodies squeezed between
the unit ball and its d-fold dilate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .bodies import BodyError, ConvexBody, VPolytope, chord_through, polar
from .config import CONFIG
from .points import JOHN, LOEWNER, PointMap
from .sampling import random_directions, sphere_directions


class MeasureError(RuntimeError):
    """A symmetry measure or duality search failed its contract."""


@dataclass(frozen=True)
class SymmetryMeasureResult:
    phi: float
    delta: float
    chord_length: Optional[float]
    p1_val: np.ndarray
    p2_val: np.ndarray


def phi_measure(p1: PointMap, p2: PointMap, body: ConvexBody) -> SymmetryMeasureResult:
    """The chord-ratio symmetry measure for the pair (p1, p2) on a body.

    Evaluates both points, takes the chord of the body through them, and
    returns 1 - distance / chord length.  Affine maps preserve ratios along
    a line, so the value is an affine invariant of the body.
    """
    v1 = p1(body)
    v2 = p2(body)
    diam = 2.0 * body.circumradius_bound()
    dist = float(np.linalg.norm(v1 - v2))
    if dist <= 1e-9 * max(diam, 1.0):
        return SymmetryMeasureResult(1.0, 0.0, None, v1, v2)
    chord = chord_through(body, v1, v2)
    delta = dist / chord.length
    if delta > 1.0 + 1e-9:
        raise MeasureError(
            "separation %.3e exceeds the chord length %.3e; point values "
            "are not inside the body" % (dist, chord.length))
    return SymmetryMeasureResult(max(0.0, 1.0 - delta), min(delta, 1.0),
                                 chord.length, v1, v2)


def check_lower_bound_jl(body: ConvexBody,
                         slack: Optional[float] = None) -> Tuple[float, float, bool]:
    """phi for the John and Loewner centers against the bound 2/(d+1).

    Every chord through the John point splits with ratio at least 1:d, and
    likewise for the Loewner point, so the uncovered end segments make up at
    least 2/(d+1) of the chord through both centers.
    """
    slack = 1e-6 + CONFIG.solver_tol if slack is None else float(slack)
    result = phi_measure(JOHN, LOEWNER, body)
    bound = 2.0 / (body.dim + 1.0)
    return result.phi, bound, bool(result.phi >= bound - slack)


# ---------------------------------------------------------------------------
# duality zeros


@dataclass(frozen=True)
class DualZeroReport:
    zeros: np.ndarray
    values: np.ndarray
    grid_n: int
    tol: float
    cluster_radius: float


def _interior_filter(body: ConvexBody, Z: np.ndarray, margin: float) -> np.ndarray:
    U = sphere_directions(1024, body.dim, seed=CONFIG.seed)
    h0 = body.support_batch(U)
    slack = h0[None, :] - Z @ U.T
    return slack.min(axis=1) >= margin


def dual_zero_search(p: PointMap, body: ConvexBody, grid_n: int = 33,
                     tol: Optional[float] = None,
                     cluster_radius: Optional[float] = None) -> DualZeroReport:
    """Interior translations z with p((C - z) polar) = 0, up to tol.

    Grid scan of the norm of the dual point followed by simplex descent from
    the most promising cells, with nearby minima merged by the clustering
    radius.  At least one zero must exist for the maps carrying a duality
    partner; finding none signals the resolution is too coarse.
    """
    d = body.dim
    diam = 2.0 * body.circumradius_bound()
    tol = 1e-6 * max(1.0, diam) if tol is None else float(tol)
    cluster_radius = 1e-3 * diam if cluster_radius is None else float(cluster_radius)
    margin = max(CONFIG.polar_margin, 1e-6 * diam)

    def objective(z: np.ndarray) -> float:
        try:
            dual = polar(body.translate(-z), margin=0.5 * margin)
            return float(np.linalg.norm(p(dual)))
        except (BodyError, RuntimeError):
            return np.inf

    if d <= 3:
        n = int(grid_n)
        while n > 3 and n ** d > 40_000:
            n -= 2
        axes = []
        for i in range(d):
            e = np.zeros(d)
            e[i] = 1.0
            axes.append(np.linspace(-body.support(-e), body.support(e), n))
        Z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    else:
        n = int(grid_n)
        cube = sphere_directions(max(256, n * n), d, seed=CONFIG.seed + 1)
        Z = np.vstack([np.zeros(d)] + [0.4 * body.circumradius_bound() * cube])
    Z = Z[_interior_filter(body, Z, margin)]
    if len(Z) == 0:
        raise MeasureError("no strictly interior grid points; body too thin "
                           "for the requested margin")
    vals = np.array([objective(z) for z in Z])

    order = np.argsort(vals)
    starts: List[np.ndarray] = []
    for idx in order:
        if not np.isfinite(vals[idx]):
            break
        z = Z[idx]
        if all(np.linalg.norm(z - s) > 2.0 * cluster_radius for s in starts):
            starts.append(z)
        if len(starts) >= 12:
            break

    found: List[Tuple[np.ndarray, float]] = []
    for z0 in starts:
        res = minimize(objective, z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12,
                                "maxiter": 400 * d, "maxfev": 600 * d})
        if np.isfinite(res.fun) and res.fun <= tol:
            found.append((np.asarray(res.x, dtype=float), float(res.fun)))
    found.sort(key=lambda zf: zf[1])
    zeros: List[np.ndarray] = []
    values: List[float] = []
    for z, f in found:
        if all(np.linalg.norm(z - zz) > cluster_radius for zz in zeros):
            zeros.append(z)
            values.append(f)
    if not zeros:
        raise MeasureError(
            "no dual zero located at tol %.1e (best value %.3e); refine the "
            "grid or loosen tol" % (tol, float(vals.min(initial=np.inf))))
    return DualZeroReport(np.array(zeros), np.array(values), grid_n, tol,
                          cluster_radius)


# ---------------------------------------------------------------------------
# the empirical distance between point maps


def random_sandwich_body(dim: int, rng: np.random.Generator,
                         n_facets: Optional[int] = None) -> VPolytope:
    """A random polytope with B_2 inside and the d-fold ball outside.

    Intersection of half-spaces with unit normals and offsets in [1, 1.3]:
    every offset at least 1 keeps the unit ball inside, and enough random
    directions pin the circumradius well below dim.  The construction
    retries with denser facets in the rare event a vertex escapes.
    """
    if n_facets is None:
        n_facets = 16 * dim * dim
    for _ in range(6):
        U = random_directions(n_facets, dim, rng)
        h = rng.uniform(1.0, 1.3, size=n_facets)
        halfspaces = np.column_stack([U, -h])
        try:
            hs = HalfspaceIntersection(halfspaces, np.zeros(dim))
        except Exception:
            n_facets *= 2
            continue
        verts = hs.intersections
        if np.linalg.norm(verts, axis=1).max() <= dim:
            hull = ConvexHull(verts)
            return VPolytope(verts[hull.vertices])
        n_facets *= 2
    raise MeasureError("failed to build a sandwich body inside dim * B_2")


def point_distance_estimate(p: PointMap, q: PointMap, n_bodies: int = 50,
                            dim: int = 2, seed: Optional[int] = None) -> float:
    """Lower bound for sup ||p(C) - q(C)|| over B_2 <= C <= dim * B_2.

    Maximizes the disagreement over randomly generated sandwich bodies; the
    estimate grows monotonically with n_bodies for a fixed seed because the
    body stream is nested.
    """
    seed = CONFIG.seed if seed is None else int(seed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(int(n_bodies)):
        body = random_sandwich_body(dim, rng)
        worst = max(worst, float(np.linalg.norm(p(body) - q(body))))
    return worst
