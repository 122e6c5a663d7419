"""Affine invariant points: centroid, Santalo point, John and Loewner centers.

Every map here commutes with invertible affine transformations up to solver
tolerance, takes values inside the body, and is deterministic for a fixed
configuration.  The module also provides the generic machinery around such
maps: affine combinations, equivariance testing, and the gauge construction
that pushes a proper point to the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial import ConvexHull, QhullError

from .bodies import (
    AffineImage,
    AffineMap,
    Ball,
    BodyError,
    ConvexBody,
    CrossSectionHull,
    EllipsoidBody,
    VPolytope,
)
from .config import CONFIG
from .ellipsoids import john, loewner
from .sampling import sphere_directions, unit_ball_volume


class PointError(RuntimeError):
    """An affine point evaluation failed or did not meet its tolerance."""


# ---------------------------------------------------------------------------
# centroid


def _hull_axial_centroid(body: CrossSectionHull) -> Optional[np.ndarray]:
    """Exact centroid for hulls of two parallel balls of the same p-norm.

    The cross-section at interpolation parameter lam is again a ball with
    linearly interpolated center and radius, so the mass density along the
    axis is a polynomial in lam and every moment integral is exact.
    """
    two = body._two_section_data()
    if two is None:
        return None
    t1, b1, t2, b2 = two
    if not (isinstance(b1, Ball) and isinstance(b2, Ball)):
        return None
    if not (b1.p == b2.p or b1.radius == 0.0 or b2.radius == 0.0):
        return None
    m = body.dim - 1
    r = np.array([b1.radius, b2.radius - b1.radius])
    mass = npoly.polypow(r, m)
    total = npoly.polyint(mass)
    denom = npoly.polyval(1.0, total) - npoly.polyval(0.0, total)
    if denom <= 0.0:
        return None
    out = np.empty(body.dim)
    t_poly = np.array([t1, t2 - t1])
    num = npoly.polyint(npoly.polymul(t_poly, mass))
    out[0] = (npoly.polyval(1.0, num) - npoly.polyval(0.0, num)) / denom
    for k in range(m):
        c_poly = np.array([b1.center[k], b2.center[k] - b1.center[k]])
        num = npoly.polyint(npoly.polymul(c_poly, mass))
        out[1 + k] = (npoly.polyval(1.0, num) - npoly.polyval(0.0, num)) / denom
    return out


def _centroid_monte_carlo(body: ConvexBody, n_samples: int, seed: int) -> np.ndarray:
    d = body.dim
    lo = np.empty(d)
    hi = np.empty(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        hi[i] = body.support(e)
        lo[i] = -body.support(-e)
    rng = np.random.default_rng(seed)
    accepted = []
    n_acc = 0
    chunk = 20_000
    drawn = 0
    while drawn < n_samples:
        take = min(chunk, n_samples - drawn)
        pts = rng.uniform(lo, hi, size=(take, d))
        mask = body.contains_batch(pts, CONFIG.boundary_tol)
        drawn += take
        if np.any(mask):
            accepted.append(pts[mask])
            n_acc += int(mask.sum())
    if n_acc < 100:
        raise PointError(
            "Monte Carlo centroid accepted only %d of %d box samples; "
            "increase n_samples" % (n_acc, n_samples))
    pts = np.vstack(accepted)
    mean = pts.mean(axis=0)
    stderr = pts.std(axis=0, ddof=1) / np.sqrt(n_acc)
    scale = max(1.0, body.circumradius_bound())
    if float(stderr.max()) > CONFIG.mc_max_stderr * scale:
        raise PointError(
            "Monte Carlo centroid standard error %.2e exceeds %.2e; "
            "increase n_samples" % (stderr.max(), CONFIG.mc_max_stderr * scale))
    return mean


def _exact_centroid(body: ConvexBody) -> Optional[np.ndarray]:
    if isinstance(body, VPolytope):
        return body.centroid()
    if isinstance(body, Ball):
        return body.center.copy()
    if isinstance(body, EllipsoidBody):
        return body.ellipsoid.center.copy()
    if isinstance(body, AffineImage):
        sub = _exact_centroid(body.inner)
        return body.map(sub) if sub is not None else None
    if isinstance(body, CrossSectionHull):
        vp = body.as_vpolytope()
        if vp is not None:
            return vp.centroid()
        return _hull_axial_centroid(body)
    return None


def centroid_is_exact(body: ConvexBody) -> bool:
    """True when centroid(body) takes a closed-form path, no sampling."""
    return _exact_centroid(body) is not None


def centroid(body: ConvexBody, n_samples: Optional[int] = None,
             seed: Optional[int] = None) -> np.ndarray:
    """Center of gravity of the body.

    Exact for polytopes (simplex fan), balls, ellipsoids, affine images of
    those, and hulls of two parallel balls sharing a p-norm.  Anything else
    falls back to Monte Carlo rejection sampling over the bounding box with
    a reported standard-error guard.
    """
    exact = _exact_centroid(body)
    if exact is not None:
        return exact
    if isinstance(body, AffineImage):
        return body.map(centroid(body.inner, n_samples=n_samples, seed=seed))
    n_samples = CONFIG.mc_samples if n_samples is None else int(n_samples)
    seed = CONFIG.seed if seed is None else int(seed)
    return _centroid_monte_carlo(body, n_samples, seed)


# ---------------------------------------------------------------------------
# polar volume and the Santalo point


def _polar_surrogate(body: ConvexBody, n_dirs: int, seed: int):
    """Fixed direction net and support values for the polar volume integrand.

    Translating the body by z only shifts the support values by U @ z, so a
    single support sweep yields the whole map z -> vol((C - z) polar) as an
    explicit smooth convex function on the interior.
    """
    U = sphere_directions(n_dirs, body.dim, seed=seed)
    h0 = body.support_batch(U)
    return U, h0


def _exact_polar_objective(vp: VPolytope):
    """Exact map z -> vol((C - z)^o) from the facet presentation.

    Facets a_i . x <= b_i dualize to vertices a_i / (b_i - a_i . z), so each
    evaluation is a single hull volume.  Exactness matters beyond accuracy:
    translating or mapping the body rescales this objective by a constant,
    so its minimizer is genuinely affine equivariant, with no direction-net
    bias.
    """
    a, b = vp._facets()

    def gap(z):
        return float((b - a @ z).min())

    def objective(z):
        h = b - a @ z
        if float(h.min()) <= CONFIG.polar_margin:
            return np.inf
        try:
            return float(ConvexHull(a / h[:, None]).volume)
        except QhullError:
            return np.inf

    return objective, gap


def _surrogate_polar_objective(body: ConvexBody, n_dirs: int, seed: int):
    """Spherical support integral kappa_d * mean h(u)^(-d) on a fixed net."""
    d = body.dim
    U, h0 = _polar_surrogate(body, n_dirs, seed)
    kappa = unit_ball_volume(d)

    def gap(z):
        return float((h0 - U @ z).min())

    def objective(z):
        h = h0 - U @ z
        if float(h.min()) <= CONFIG.polar_margin:
            return np.inf
        return float(kappa * np.mean(h ** (-d)))

    return objective, gap


def _polar_volume_objective(body: ConvexBody, n_dirs: Optional[int],
                            seed: Optional[int]):
    """Pick the exact facet dual when the body has one, the net otherwise."""
    vp = body.as_vpolytope()
    if vp is not None and vp.dim >= 2:
        return _exact_polar_objective(vp)
    n_dirs = CONFIG.sphere_samples if n_dirs is None else int(n_dirs)
    seed = CONFIG.seed if seed is None else int(seed)
    return _surrogate_polar_objective(body, n_dirs, seed)


def polar_volume(body: ConvexBody, z=None, n_dirs: Optional[int] = None,
                 seed: Optional[int] = None) -> float:
    """Volume of the polar body (C - z)^o.

    Exact through the facet presentation for polytopes; otherwise the
    spherical support integral kappa_d * mean h(u)^(-d) on a deterministic
    quasi-uniform net, where n_dirs and seed control the net.
    """
    d = body.dim
    z = np.zeros(d) if z is None else np.asarray(z, dtype=float)
    objective, gap = _polar_volume_objective(body, n_dirs, seed)
    if gap(z) <= CONFIG.polar_margin:
        raise BodyError("z must be strictly interior to the body")
    return objective(z)


def santalo(body: ConvexBody, tol: Optional[float] = None,
            n_dirs: Optional[int] = None, seed: Optional[int] = None,
            max_rounds: int = 400) -> np.ndarray:
    """The interior point minimizing the volume of the polar (C - z)^o.

    Compass search started at the centroid, with halving steps down to the
    stopping threshold tol.  The objective comes from the same dispatch as
    polar_volume: exact for polytope presentations, a smooth strictly convex
    support-net surrogate otherwise, so in both cases the descent converges
    to the unique minimizer.
    """
    objective, gap = _polar_volume_objective(body, n_dirs, seed)
    scale = max(1.0, body.circumradius_bound())
    tol = 1e-9 * scale if tol is None else float(tol)

    z = centroid(body)
    f = objective(z)
    if not np.isfinite(f):
        raise PointError("centroid is not strictly interior to the body")
    step = 0.25 * gap(z)
    pokes = np.vstack([np.eye(body.dim), -np.eye(body.dim)])
    for _ in range(max_rounds):
        if step < tol:
            return z
        improved = True
        while improved:
            improved = False
            cands = z + step * pokes
            vals = [objective(c) for c in cands]
            k = int(np.argmin(vals))
            if vals[k] < f - 1e-17:
                z, f = cands[k], vals[k]
                improved = True
        step *= 0.5
    raise PointError(
        "Santalo search did not reach step %.1e after %d rounds; last iterate %s"
        % (tol, max_rounds, np.array2string(z, precision=8)))


def john_point(body: ConvexBody, **kwargs) -> np.ndarray:
    """Center of the maximal-volume inscribed ellipsoid."""
    return john(body, **kwargs).ellipsoid.center.copy()


def loewner_point(body: ConvexBody, **kwargs) -> np.ndarray:
    """Center of the minimal-volume enclosing ellipsoid."""
    return loewner(body, **kwargs).ellipsoid.center.copy()


# ---------------------------------------------------------------------------
# point maps as first-class objects


@dataclass(frozen=True)
class PointMap:
    """A named affine invariant point evaluator.

    The proper flag records the claim that the value lies in the interior of
    every body; it is validated by the property tests rather than assumed.
    """

    name: str
    evaluator: Callable[[ConvexBody], np.ndarray]
    proper: bool = True

    def __call__(self, body: ConvexBody) -> np.ndarray:
        return np.asarray(self.evaluator(body), dtype=float)


CENTROID = PointMap("g", centroid)
SANTALO = PointMap("s", santalo)
JOHN = PointMap("j", john_point)
LOEWNER = PointMap("l", loewner_point)

POINT_MAPS = {m.name: m for m in (CENTROID, SANTALO, JOHN, LOEWNER)}


def point_map(name: str) -> PointMap:
    try:
        return POINT_MAPS[name]
    except KeyError:
        raise PointError("unknown point map %r; available: %s"
                         % (name, ", ".join(sorted(POINT_MAPS)))) from None


def affine_combination(maps: Sequence[PointMap], weights: Sequence[float]) -> PointMap:
    """Weighted combination of point maps; weights must sum to one.

    Affine combinations of affine invariant points are again affine
    invariant, because the affine action commutes with the combination.
    """
    maps = list(maps)
    weights = [float(w) for w in weights]
    if len(maps) != len(weights):
        raise PointError("need one weight per map")
    if abs(sum(weights) - 1.0) > 1e-12:
        raise PointError("weights must sum to 1 (got %.17g)" % sum(weights))

    def evaluator(body: ConvexBody) -> np.ndarray:
        vals = [m(body) for m in maps]
        return np.sum([w * v for w, v in zip(weights, vals)], axis=0)

    name = "+".join("%g*%s" % (w, m.name) for w, m in zip(weights, maps))
    proper = all(m.proper for m in maps) and all(w >= 0.0 for w in weights)
    return PointMap(name, evaluator, proper=proper)


def equivariance_check(point: PointMap, body: ConvexBody, T: AffineMap,
                       tol: Optional[float] = None) -> float:
    """Norm of p(T(C)) - T(p(C)); raises only when a threshold is supplied."""
    from .bodies import affine_image

    err = float(np.linalg.norm(point(affine_image(T, body)) - T(point(body))))
    if tol is not None and err > tol:
        raise PointError("equivariance error %.3e exceeds %.1e for %s"
                         % (err, tol, point.name))
    return err


# ---------------------------------------------------------------------------
# gauge ratio and the boundary push


def psi(s: float) -> float:
    """The fold [0,1] -> [1/2,1]: 1 - s below one half, s above."""
    return 1.0 - s if s <= 0.5 else s


@dataclass(frozen=True)
class GaugeValue:
    gamma: float
    Gamma: float


def gauge_ratio(body: ConvexBody, q_val, g_val) -> GaugeValue:
    """Inverse of the largest stretch of q - g from g that stays in the body.

    gamma = (sup { lam > 0 : g + lam (q - g) in C })^(-1), with gamma = 0 on
    the coincidence branch q = g, and Gamma = psi(gamma).  Both quantities
    are affine invariant since they are ratios along a fixed line.
    """
    q_val = np.asarray(q_val, dtype=float)
    g_val = np.asarray(g_val, dtype=float)
    scale = max(1.0, body.circumradius_bound())
    if not body.contains(g_val, CONFIG.boundary_tol * scale):
        raise PointError("anchor point must lie in the body")
    delta = q_val - g_val
    n = float(np.linalg.norm(delta))
    if n <= 1e-12 * scale:
        return GaugeValue(0.0, 1.0)
    hi = (body.circumradius_bound() + float(np.linalg.norm(g_val))) / n + 1.0
    lo = 0.0
    tol = CONFIG.boundary_tol * scale
    for _ in range(200):
        if hi - lo <= 1e-15 * hi:
            break
        mid = 0.5 * (lo + hi)
        if body.contains(g_val + mid * delta, tol):
            lo = mid
        else:
            hi = mid
    lam_sup = 0.5 * (lo + hi)
    gamma = 1.0 / lam_sup
    if gamma > 1.0 + 1e-9:
        raise PointError("q lies outside the body (gamma = %.6f > 1)" % gamma)
    gamma = min(gamma, 1.0)
    return GaugeValue(gamma, psi(gamma))


def boundary_push(map_q: PointMap, body: ConvexBody,
                  anchor: Optional[PointMap] = None) -> np.ndarray:
    """The point g + (q - g) / Gamma, guaranteed to stay in the body.

    Division by Gamma = psi(gamma) instead of gamma keeps the construction
    continuous across the coincidence branch; the pushed point reaches the
    boundary exactly when gamma >= 1/2.  The anchor defaults to the centroid
    but any proper point map works.
    """
    anchor = CENTROID if anchor is None else anchor
    g_val = anchor(body)
    q_val = map_q(body)
    gv = gauge_ratio(body, q_val, g_val)
    return g_val + (q_val - g_val) / gv.Gamma
