"""Convex bodies and the metric operations on them.

A body is presented through its support function, a membership test and a
certified interior point.  Exact formulas are used wherever the presentation
allows (vertex polytopes, p-balls, ellipsoids, two-section hulls, polars of
polytopes); everything else falls back to bisection against membership or to
sampled separation, with the tolerance semantics documented per variant.

Conventions: column vectors, affine maps x -> matrix @ x + offset, ellipsoids
{x : (x - center)^T shape (x - center) <= 1}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.spatial import ConvexHull
from scipy.spatial import QhullError

from .config import CONFIG
from .sampling import sphere_directions, unit_ball_volume

Vector = np.ndarray


class BodyError(ValueError):
    """Raised for degenerate geometry or violated preconditions."""


def _as_vector(x, dim: Optional[int] = None) -> Vector:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise BodyError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise BodyError(f"expected dimension {dim}, got {v.shape[0]}")
    return v


@dataclass(eq=False)
class AffineMap:
    """x -> matrix @ x + offset."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        self.offset = _as_vector(self.offset)
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise BodyError("matrix must be square")
        if self.matrix.shape[0] != self.offset.shape[0]:
            raise BodyError("matrix and offset dimensions disagree")

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls(np.eye(dim), np.zeros(dim))

    @classmethod
    def translation(cls, v) -> "AffineMap":
        v = _as_vector(v)
        return cls(np.eye(v.shape[0]), v)

    @classmethod
    def linear(cls, m) -> "AffineMap":
        m = np.atleast_2d(np.asarray(m, dtype=float))
        return cls(m, np.zeros(m.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def invertible(self) -> bool:
        sv = np.linalg.svd(self.matrix, compute_uv=False)
        return sv[-1] > 1e-13 * max(sv[0], 1.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.matrix @ x + self.offset
        return x @ self.matrix.T + self.offset

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: x -> self(other(x))."""
        return AffineMap(self.matrix @ other.matrix,
                         self.matrix @ other.offset + self.offset)

    @cached_property
    def _inverse(self) -> "AffineMap":
        if not self.invertible:
            raise BodyError("map is singular, cannot invert")
        minv = np.linalg.inv(self.matrix)
        return AffineMap(minv, -minv @ self.offset)

    def inverse(self) -> "AffineMap":
        return self._inverse

    def isclose(self, other: "AffineMap", tol: float = 1e-9) -> bool:
        return (np.max(np.abs(self.matrix - other.matrix)) <= tol
                and np.max(np.abs(self.offset - other.offset)) <= tol)

    def map_ellipsoid(self, e: "Ellipsoid") -> "Ellipsoid":
        minv = self.inverse().matrix
        return Ellipsoid(self(e.center), minv.T @ e.shape @ minv)


@dataclass(eq=False)
class Ellipsoid:
    """{x : (x - center)^T shape (x - center) <= 1} with shape symmetric PD."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        self.center = _as_vector(self.center)
        self.shape = np.atleast_2d(np.asarray(self.shape, dtype=float))
        a = self.shape
        if a.shape != (self.dim, self.dim):
            raise BodyError("shape matrix does not match center dimension")
        if np.max(np.abs(a - a.T)) > 1e-10 * max(1.0, np.max(np.abs(a))):
            raise BodyError("shape matrix must be symmetric")
        self.shape = 0.5 * (a + a.T)
        if self.eigvals[0] <= 0.0:
            raise BodyError("shape matrix must be positive definite")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @cached_property
    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.shape)

    @cached_property
    def inverse_shape(self) -> np.ndarray:
        return np.linalg.inv(self.shape)

    @cached_property
    def half_map(self) -> np.ndarray:
        """Symmetric B with B @ B = inverse_shape; the ellipsoid is center + B(unit ball)."""
        lam, q = np.linalg.eigh(self.shape)
        return (q / np.sqrt(lam)) @ q.T

    @cached_property
    def sqrt_shape(self) -> np.ndarray:
        lam, q = np.linalg.eigh(self.shape)
        return (q * np.sqrt(lam)) @ q.T

    @property
    def volume(self) -> float:
        sign, logdet = np.linalg.slogdet(self.shape)
        return unit_ball_volume(self.dim) * float(np.exp(-0.5 * logdet))

    def support(self, u) -> float:
        u = _as_vector(u, self.dim)
        return float(self.center @ u + np.sqrt(u @ self.inverse_shape @ u))

    def support_batch(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        quad = np.einsum("ij,jk,ik->i", U, self.inverse_shape, U)
        return U @ self.center + np.sqrt(np.maximum(quad, 0.0))

    def gauge(self, x) -> float:
        d = _as_vector(x, self.dim) - self.center
        return float(np.sqrt(max(d @ self.shape @ d, 0.0)))

    def contains(self, x, tol: float = 1e-10) -> bool:
        return self.gauge(x) <= 1.0 + tol * np.sqrt(self.eigvals[-1])

    def isclose(self, other: "Ellipsoid", tol: float = 1e-8) -> bool:
        return (np.max(np.abs(self.center - other.center)) <= tol
                and np.max(np.abs(self.shape - other.shape)) <= tol)


class ConvexBody:
    """Abstract compact convex body with nonempty interior."""

    dim: int

    # -- required surface -------------------------------------------------
    def support(self, u) -> float:
        raise NotImplementedError

    def contains(self, x, tol: Optional[float] = None) -> bool:
        raise NotImplementedError

    def interior_point(self) -> Vector:
        raise NotImplementedError

    # -- generic machinery with per-variant overrides ---------------------
    def support_batch(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return np.array([self.support(u) for u in U])

    def contains_batch(self, X, tol: Optional[float] = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.contains(x, tol) for x in X], dtype=bool)

    def support_point(self, u) -> Vector:
        """A point of the body nearly attaining the support value in direction u.

        Default route: the gradient of the support function is the support
        point wherever it exists, so central differences recover it.  The
        result is validated and replaced by a boundary ray point when the
        face is not a singleton.
        """
        u = _as_vector(u, self.dim)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            raise BodyError("direction must be nonzero")
        u = u / nu
        h = self.support(u)
        step = 1e-6
        x = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = step
            x[i] = (self.support(u + e) - self.support(u - e)) / (2.0 * step)
        scale = max(1.0, self.circumradius_bound())
        if abs(float(x @ u) - h) <= 1e-5 * scale and self.contains(x, 1e-5 * scale):
            return x
        return self.boundary_point(u)

    def boundary_point(self, u) -> Vector:
        """Exit point of the ray from the interior anchor along u (bisection)."""
        u = _as_vector(u, self.dim)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            raise BodyError("direction must be nonzero")
        u = u / nu
        x0 = self.interior_point()
        hi = max(self.circumradius_bound() + np.linalg.norm(x0), 1e-9)
        lo = 0.0
        tol = CONFIG.boundary_tol
        for _ in range(200):
            if hi - lo <= 1e-14 * max(hi, 1.0):
                break
            mid = 0.5 * (lo + hi)
            if self.contains(x0 + mid * u, tol):
                lo = mid
            else:
                hi = mid
        return x0 + lo * u

    def circumradius_bound(self) -> float:
        """Radius of a ball around the origin certified to contain the body."""
        cached = getattr(self, "_circumradius", None)
        if cached is None:
            box = np.empty(self.dim)
            for i in range(self.dim):
                e = np.zeros(self.dim)
                e[i] = 1.0
                box[i] = max(abs(self.support(e)), abs(self.support(-e)))
            cached = float(np.linalg.norm(box))
            self._circumradius = cached
        return cached

    def translate(self, v) -> "ConvexBody":
        return AffineImage(AffineMap.translation(v), self)

    def as_vpolytope(self) -> Optional["VPolytope"]:
        """Exact vertex presentation when one exists, else None."""
        return None


def _facets_from_vertices(vertices: np.ndarray) -> Tuple[np.ndarray, np.ndarray, ConvexHull]:
    n, d = vertices.shape
    if d == 1:
        a = np.array([[1.0], [-1.0]])
        b = np.array([float(vertices.max()), -float(vertices.min())])
        if b[0] + b[1] <= 0.0:
            raise BodyError("vertices span no interior")
        return a, b, None
    try:
        hull = ConvexHull(vertices)
    except QhullError as exc:
        raise BodyError("vertices are not full-dimensional") from exc
    eq = hull.equations  # rows [normal | offset], normal . x + offset <= 0
    a = eq[:, :-1].copy()
    b = -eq[:, -1].copy()
    norms = np.linalg.norm(a, axis=1)
    a /= norms[:, None]
    b /= norms
    return a, b, hull


class VPolytope(ConvexBody):
    """Convex hull of finitely many points, stored by its vertices."""

    def __init__(self, vertices):
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        if v.ndim != 2 or v.shape[0] < 2:
            raise BodyError("need at least two points")
        self.vertices = v
        self.dim = v.shape[1]
        self._facet_cache = None
        self._hull = None

    def _facets(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._facet_cache is None:
            a, b, hull = _facets_from_vertices(self.vertices)
            self._facet_cache = (a, b)
            self._hull = hull
        return self._facet_cache

    @property
    def facet_normals(self) -> np.ndarray:
        return self._facets()[0]

    @property
    def facet_offsets(self) -> np.ndarray:
        return self._facets()[1]

    def is_minimal(self) -> bool:
        if self.dim == 1:
            lo, hi = self.vertices.min(), self.vertices.max()
            return (self.vertices.shape[0] == 2
                    and {float(lo), float(hi)} == set(map(float, self.vertices[:, 0])))
        self._facets()
        return len(self._hull.vertices) == self.vertices.shape[0]

    def reduced(self) -> "VPolytope":
        """Drop non-extreme points."""
        if self.dim == 1:
            return VPolytope([[float(self.vertices.min())], [float(self.vertices.max())]])
        self._facets()
        return VPolytope(self.vertices[self._hull.vertices])

    def support(self, u) -> float:
        u = _as_vector(u, self.dim)
        return float(np.max(self.vertices @ u))

    def support_batch(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return np.max(U @ self.vertices.T, axis=1)

    def support_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        return self.vertices[int(np.argmax(self.vertices @ u))].copy()

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = CONFIG.boundary_tol if tol is None else tol
        x = _as_vector(x, self.dim)
        a, b = self._facets()
        return bool(np.all(a @ x - b <= tol))

    def contains_batch(self, X, tol: Optional[float] = None) -> np.ndarray:
        tol = CONFIG.boundary_tol if tol is None else tol
        X = np.atleast_2d(np.asarray(X, dtype=float))
        a, b = self._facets()
        return np.all(X @ a.T - b <= tol, axis=1)

    def interior_point(self) -> Vector:
        return self.vertices.mean(axis=0)

    def boundary_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            raise BodyError("direction must be nonzero")
        u = u / nu
        x0 = self.interior_point()
        a, b = self._facets()
        au = a @ u
        slack = b - a @ x0
        pos = au > 1e-14
        if not np.any(pos):
            raise BodyError("unbounded direction, polytope degenerate")
        t = np.min(slack[pos] / au[pos])
        return x0 + t * u

    def volume(self) -> float:
        if self.dim == 1:
            return float(self.vertices.max() - self.vertices.min())
        self._facets()
        return float(self._hull.volume)

    def centroid(self) -> Vector:
        """Exact centroid through a fan over triangulated hull facets."""
        if self.dim == 1:
            return np.array([0.5 * float(self.vertices.min() + self.vertices.max())])
        opts = "Qt Qx" if self.dim > 4 else "Qt"
        hull = ConvexHull(self.vertices, qhull_options=opts)
        x0 = self.vertices[hull.vertices].mean(axis=0)
        total = 0.0
        acc = np.zeros(self.dim)
        d = self.dim
        for simplex in hull.simplices:
            f = self.vertices[simplex]
            vol = abs(np.linalg.det(f - x0))
            total += vol
            acc += vol * (x0 + f.sum(axis=0)) / (d + 1.0)
        if total <= 0.0:
            raise BodyError("degenerate polytope")
        return acc / total

    def translate(self, v) -> "VPolytope":
        return VPolytope(self.vertices + _as_vector(v, self.dim))

    def as_vpolytope(self) -> "VPolytope":
        return self


def _conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _pnorm(x: np.ndarray, p: float, axis=None):
    if np.isinf(p):
        return np.max(np.abs(x), axis=axis)
    if p == 1.0:
        return np.sum(np.abs(x), axis=axis)
    if p == 2.0:
        return np.sqrt(np.sum(x * x, axis=axis))
    return np.sum(np.abs(x) ** p, axis=axis) ** (1.0 / p)


class Ball(ConvexBody):
    """p-norm ball {x : |x - center|_p <= radius}, p in [1, inf].

    radius 0 is tolerated so a point can serve as a degenerate section of a
    CrossSectionHull; a zero-radius ball is not a valid standalone body.
    """

    def __init__(self, p: float = 2.0, radius: float = 1.0, center=None, dim: Optional[int] = None):
        p = float(p)
        if p < 1.0:
            raise BodyError("p must be >= 1 for convexity")
        if center is None:
            if dim is None:
                raise BodyError("need center or dim")
            center = np.zeros(dim)
        self.center = _as_vector(center)
        if dim is not None and self.center.shape[0] != dim:
            raise BodyError("center does not match dim")
        if radius < 0.0:
            raise BodyError("radius must be nonnegative")
        self.p = p
        self.q = _conjugate_exponent(p)
        self.radius = float(radius)
        self.dim = self.center.shape[0]

    def support(self, u) -> float:
        u = _as_vector(u, self.dim)
        return float(self.center @ u + self.radius * _pnorm(u, self.q))

    def support_batch(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return U @ self.center + self.radius * _pnorm(U, self.q, axis=1)

    def support_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            raise BodyError("direction must be nonzero")
        if self.radius == 0.0:
            return self.center.copy()
        if self.p == 1.0:
            k = int(np.argmax(np.abs(u)))
            e = np.zeros(self.dim)
            e[k] = np.sign(u[k]) if u[k] != 0.0 else 1.0
            return self.center + self.radius * e
        if np.isinf(self.p):
            return self.center + self.radius * np.sign(u)
        nq = _pnorm(u, self.q)
        x = np.sign(u) * np.abs(u / nq) ** (self.q - 1.0)
        return self.center + self.radius * x

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = CONFIG.boundary_tol if tol is None else tol
        x = _as_vector(x, self.dim)
        return float(_pnorm(x - self.center, self.p)) <= self.radius + tol

    def contains_batch(self, X, tol: Optional[float] = None) -> np.ndarray:
        tol = CONFIG.boundary_tol if tol is None else tol
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return _pnorm(X - self.center, self.p, axis=1) <= self.radius + tol

    def interior_point(self) -> Vector:
        if self.radius == 0.0:
            raise BodyError("zero-radius ball has no interior")
        return self.center.copy()

    def boundary_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        nu = _pnorm(u, self.p)
        if nu == 0.0:
            raise BodyError("direction must be nonzero")
        return self.center + self.radius * u / nu

    def translate(self, v) -> "Ball":
        return Ball(self.p, self.radius, self.center + _as_vector(v, self.dim))

    def as_vpolytope(self) -> Optional[VPolytope]:
        if self.radius == 0.0:
            return None
        if self.p == 1.0:
            pts = np.vstack([np.eye(self.dim), -np.eye(self.dim)]) * self.radius
            return VPolytope(pts + self.center)
        if np.isinf(self.p) and self.dim <= 12:
            corners = np.array(list(itertools.product([-1.0, 1.0], repeat=self.dim)))
            return VPolytope(corners * self.radius + self.center)
        return None


class EllipsoidBody(ConvexBody):
    """A solid ellipsoid as a convex body."""

    def __init__(self, ellipsoid: Ellipsoid):
        self.ellipsoid = ellipsoid
        self.dim = ellipsoid.dim

    def support(self, u) -> float:
        return self.ellipsoid.support(u)

    def support_batch(self, U) -> np.ndarray:
        return self.ellipsoid.support_batch(U)

    def support_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        ainv_u = self.ellipsoid.inverse_shape @ u
        denom = np.sqrt(u @ ainv_u)
        if denom == 0.0:
            raise BodyError("direction must be nonzero")
        return self.ellipsoid.center + ainv_u / denom

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = CONFIG.boundary_tol if tol is None else tol
        return self.ellipsoid.contains(x, tol)

    def contains_batch(self, X, tol: Optional[float] = None) -> np.ndarray:
        tol = CONFIG.boundary_tol if tol is None else tol
        X = np.atleast_2d(np.asarray(X, dtype=float))
        diff = X - self.ellipsoid.center
        quad = np.einsum("ij,jk,ik->i", diff, self.ellipsoid.shape, diff)
        bound = (1.0 + tol * np.sqrt(self.ellipsoid.eigvals[-1])) ** 2
        return quad <= bound

    def interior_point(self) -> Vector:
        return self.ellipsoid.center.copy()

    def boundary_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        g = np.sqrt(u @ self.ellipsoid.shape @ u)
        if g == 0.0:
            raise BodyError("direction must be nonzero")
        return self.ellipsoid.center + u / g

    def translate(self, v) -> "EllipsoidBody":
        return EllipsoidBody(Ellipsoid(self.ellipsoid.center + _as_vector(v, self.dim),
                                       self.ellipsoid.shape))


class CrossSectionHull(ConvexBody):
    """Convex hull of bodies placed at offsets along the first coordinate.

    Sections are pairs (t, base) with base living in the remaining d - 1
    coordinates, so the ambient body is conv over i of {t_i} x base_i.
    Membership is exact for the lifted-polytope case, for two sections of
    same-p balls (a zero-radius ball matches any p) and for a polytope paired
    with a Euclidean ball; other shapes fall back to sampled separation,
    which makes the test one-sided within the sampling resolution.
    """

    def __init__(self, sections: Sequence[Tuple[float, ConvexBody]]):
        if len(sections) < 2:
            raise BodyError("need at least two sections")
        base_dim = sections[0][1].dim
        secs = []
        for t, base in sections:
            if base.dim != base_dim:
                raise BodyError("all sections must share the base dimension")
            secs.append((float(t), base))
        offsets = np.array([t for t, _ in secs])
        if np.ptp(offsets) <= 0.0:
            raise BodyError("sections must occupy at least two distinct offsets")
        if not any(self._base_has_interior(b) for _, b in secs):
            raise BodyError("at least one section must be full-dimensional in the base")
        self.sections = tuple(secs)
        self.dim = base_dim + 1
        self._vpoly = None
        self._vpoly_tried = False
        self._sep_net = None

    @staticmethod
    def _base_has_interior(base: ConvexBody) -> bool:
        return not (isinstance(base, Ball) and base.radius == 0.0)

    @staticmethod
    def _anchor(base: ConvexBody) -> Vector:
        if isinstance(base, Ball):
            return base.center.copy()
        if isinstance(base, VPolytope):
            return base.vertices.mean(axis=0)
        if isinstance(base, EllipsoidBody):
            return base.ellipsoid.center.copy()
        return base.interior_point()

    def lift(self, t: float, x_rest) -> Vector:
        return np.concatenate([[t], np.asarray(x_rest, dtype=float)])

    def support(self, u) -> float:
        u = _as_vector(u, self.dim)
        ur = u[1:]
        return max(t * u[0] + base.support(ur) for t, base in self.sections)

    def support_batch(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        vals = [t * U[:, 0] + base.support_batch(U[:, 1:]) for t, base in self.sections]
        return np.max(vals, axis=0)

    def support_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        ur = u[1:]
        vals = [t * u[0] + base.support(ur) for t, base in self.sections]
        i = int(np.argmax(vals))
        t, base = self.sections[i]
        if np.linalg.norm(ur) <= 1e-15 * max(np.linalg.norm(u), 1.0):
            return self.lift(t, self._anchor(base))
        return self.lift(t, base.support_point(ur))

    def interior_point(self) -> Vector:
        pts = [self.lift(t, self._anchor(base)) for t, base in self.sections]
        return np.mean(pts, axis=0)

    def as_vpolytope(self) -> Optional[VPolytope]:
        if not self._vpoly_tried:
            self._vpoly_tried = True
            chunks = []
            ok = True
            for t, base in self.sections:
                if isinstance(base, Ball) and base.radius == 0.0:
                    chunks.append(np.concatenate([[t], base.center])[None, :])
                    continue
                vp = base.as_vpolytope()
                if vp is None:
                    ok = False
                    break
                lifted = np.column_stack([np.full(vp.vertices.shape[0], t), vp.vertices])
                chunks.append(lifted)
            if ok:
                self._vpoly = VPolytope(np.vstack(chunks)).reduced()
        return self._vpoly

    def _two_section_data(self):
        if len(self.sections) != 2:
            return None
        (t1, b1), (t2, b2) = self.sections
        if t1 > t2:
            t1, b1, t2, b2 = t2, b2, t1, b1
        return t1, b1, t2, b2

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = 1e-9 if tol is None else tol
        x = _as_vector(x, self.dim)
        vp = self.as_vpolytope()
        if vp is not None:
            return vp.contains(x, tol)
        offsets = [t for t, _ in self.sections]
        if x[0] < min(offsets) - tol or x[0] > max(offsets) + tol:
            return False
        two = self._two_section_data()
        if two is not None:
            t1, b1, t2, b2 = two
            lam = np.clip((x[0] - t1) / (t2 - t1), 0.0, 1.0)
            rest = x[1:]
            if isinstance(b1, Ball) and isinstance(b2, Ball) and (
                    b1.p == b2.p or b1.radius == 0.0 or b2.radius == 0.0):
                p = b1.p if b1.radius > 0.0 else b2.p
                c = (1.0 - lam) * b1.center + lam * b2.center
                r = (1.0 - lam) * b1.radius + lam * b2.radius
                return float(_pnorm(rest - c, p)) <= r + tol
            pair = self._polytope_ball_pair(b1, b2)
            if pair is not None:
                poly, ball, poly_first = pair
                w_poly = (1.0 - lam) if poly_first else lam
                w_ball = lam if poly_first else (1.0 - lam)
                target = rest - w_ball * ball.center
                if w_poly <= 1e-14:
                    return float(np.linalg.norm(target)) <= w_ball * ball.radius + tol
                dist = _distance_to_hull(w_poly * poly.vertices, target)
                return dist <= w_ball * ball.radius + tol
        return self._separation_contains(x, tol)

    @staticmethod
    def _polytope_ball_pair(b1, b2):
        if isinstance(b1, VPolytope) and isinstance(b2, Ball) and b2.p == 2.0:
            return b1, b2, True
        if isinstance(b2, VPolytope) and isinstance(b1, Ball) and b1.p == 2.0:
            return b2, b1, False
        return None

    def _separation_contains(self, x: Vector, tol: float) -> bool:
        if self._sep_net is None:
            net = sphere_directions(4096, self.dim, seed=CONFIG.seed)
            axes = np.vstack([np.eye(self.dim), -np.eye(self.dim)])
            self._sep_net = (np.vstack([net, axes]), None)
        net, h = self._sep_net
        if h is None:
            h = self.support_batch(net)
            self._sep_net = (net, h)
        return bool(np.max(net @ x - h) <= tol)

    def contains_batch(self, X, tol: Optional[float] = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        vp = self.as_vpolytope()
        if vp is not None:
            return vp.contains_batch(X, tol)
        return np.array([self.contains(x, tol) for x in X], dtype=bool)

    def translate(self, v) -> "CrossSectionHull":
        v = _as_vector(v, self.dim)
        return CrossSectionHull([(t + v[0], base.translate(v[1:]))
                                 for t, base in self.sections])


def _distance_to_hull(points: np.ndarray, x: np.ndarray) -> float:
    """Euclidean distance from x to conv(points), exact to solver precision.

    Solves min |P^T b - x| over the simplex through an augmented NNLS for the
    active set, then refines with the equality-constrained KKT system on that
    set and verifies the variational inequality <v_j - proj, proj - x> >= 0.
    """
    pts = np.atleast_2d(points) - x
    n, d = pts.shape
    if n == 1:
        return float(np.linalg.norm(pts[0]))
    scale = max(1.0, float(np.max(np.abs(pts))))
    aug = np.vstack([pts.T / scale, np.full(n, 1.0)])
    rhs = np.concatenate([np.zeros(d), [1.0]])
    beta, _ = optimize.nnls(aug, rhs)
    if beta.sum() <= 0.0:
        beta = np.full(n, 1.0 / n)
    active = np.where(beta > 1e-12)[0]
    for _ in range(n + 1):
        sub = pts[active]
        k = active.shape[0]
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = sub @ sub.T
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs_k = np.zeros(k + 1)
        rhs_k[k] = 1.0
        try:
            sol = np.linalg.solve(kkt, rhs_k)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(kkt, rhs_k, rcond=None)
        b_act = sol[:k]
        if np.min(b_act) < -1e-12:
            drop = active[int(np.argmin(b_act))]
            active = active[active != drop]
            if active.size == 0:
                active = np.array([int(np.argmin(np.linalg.norm(pts, axis=1)))])
            continue
        proj = b_act @ sub
        gap = pts @ proj - proj @ proj
        worst = int(np.argmin(gap))
        if gap[worst] >= -1e-10 * scale * scale:
            return float(np.linalg.norm(proj))
        if worst in active:
            return float(np.linalg.norm(proj))
        active = np.append(active, worst)
    return float(np.linalg.norm(proj))


class AffineImage(ConvexBody):
    """Lazy image T(C) of a body under an invertible affine map."""

    def __init__(self, map_: AffineMap, inner: ConvexBody):
        if map_.dim != inner.dim:
            raise BodyError("map and body dimensions disagree")
        if not map_.invertible:
            raise BodyError("affine image requires an invertible map")
        self.map = map_
        self.inner = inner
        self.dim = inner.dim
        self._opnorm = float(np.linalg.norm(map_.matrix, 2))

    def support(self, u) -> float:
        u = _as_vector(u, self.dim)
        return self.inner.support(self.map.matrix.T @ u) + float(self.map.offset @ u)

    def support_batch(self, U) -> np.ndarray:
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return self.inner.support_batch(U @ self.map.matrix) + U @ self.map.offset

    def support_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        return self.map(self.inner.support_point(self.map.matrix.T @ u))

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = CONFIG.boundary_tol if tol is None else tol
        # pulled-back tolerance is conservative under the map's expansion
        return self.inner.contains(self.map.inverse()(_as_vector(x, self.dim)),
                                   tol / self._opnorm)

    def contains_batch(self, X, tol: Optional[float] = None) -> np.ndarray:
        tol = CONFIG.boundary_tol if tol is None else tol
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.inner.contains_batch(self.map.inverse()(X), tol / self._opnorm)

    def interior_point(self) -> Vector:
        return self.map(self.inner.interior_point())

    def translate(self, v) -> "AffineImage":
        shifted = AffineMap(self.map.matrix, self.map.offset + _as_vector(v, self.dim))
        return AffineImage(shifted, self.inner)


class PolarBody(ConvexBody):
    """Polar {y : <x, y> <= 1 for all x in C} of a body with 0 interior.

    Exact dual presentations are produced by the polar() factory; this class
    is the lazy route whose support values come from bisecting the gauge of
    the inner body.  Membership slack is measured in gauge units.
    """

    def __init__(self, inner: ConvexBody, margin: Optional[float] = None):
        margin = CONFIG.polar_margin if margin is None else margin
        self.inner = inner
        self.dim = inner.dim
        origin = np.zeros(self.dim)
        if not inner.contains(origin, 0.0):
            raise BodyError("polar requires the origin inside the body")
        net = np.vstack([np.eye(self.dim), -np.eye(self.dim),
                         sphere_directions(256, self.dim, seed=3)])
        h = inner.support_batch(net)
        if np.min(h) < margin:
            raise BodyError("origin is not strictly interior to the body")
        self._origin_margin = float(np.min(h))

    def support(self, u) -> float:
        return float(self.support_batch(np.asarray(u, dtype=float)[None, :])[0])

    def support_batch(self, U) -> np.ndarray:
        """Gauge of the inner body along each direction, by vector bisection."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        norms = np.linalg.norm(U, axis=1)
        if np.any(norms == 0.0):
            raise BodyError("direction must be nonzero")
        Un = U / norms[:, None]
        r_hi = self.inner.circumradius_bound() * 1.0000001
        lo = np.full(U.shape[0], 0.0)
        hi = np.full(U.shape[0], r_hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            inside = self.inner.contains_batch(mid[:, None] * Un, 0.0)
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
            if np.max((hi - lo) / np.maximum(hi, 1e-300)) < 1e-13:
                break
        s = 0.5 * (lo + hi)
        return norms / s

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = CONFIG.boundary_tol if tol is None else tol
        return float(self.inner.support(_as_vector(x, self.dim))) <= 1.0 + tol

    def contains_batch(self, X, tol: Optional[float] = None) -> np.ndarray:
        tol = CONFIG.boundary_tol if tol is None else tol
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.inner.support_batch(X) <= 1.0 + tol

    def interior_point(self) -> Vector:
        return np.zeros(self.dim)

    def boundary_point(self, u) -> Vector:
        u = _as_vector(u, self.dim)
        h = self.inner.support(u)
        if h <= 0.0:
            raise BodyError("inner support must be positive")
        return u / h

    def circumradius_bound(self) -> float:
        cached = getattr(self, "_circumradius", None)
        if cached is None:
            cached = 1.0 / self._origin_margin
            self._circumradius = cached
        return cached


# ---------------------------------------------------------------------------
# module-level operations


def support_function(body: ConvexBody, u) -> float:
    return body.support(u)


def membership(body: ConvexBody, x, tol: Optional[float] = None) -> bool:
    return body.contains(x, tol)


def _strict_origin_margin(body: ConvexBody) -> float:
    net = np.vstack([np.eye(body.dim), -np.eye(body.dim),
                     sphere_directions(256, body.dim, seed=3)])
    return float(np.min(body.support_batch(net)))


def polar(body: ConvexBody, margin: Optional[float] = None) -> ConvexBody:
    """Polar body, with exact duals where the presentation allows.

    Polytope -> polytope (facets become vertices), origin-centered balls and
    ellipsoids dualize in closed form, everything else returns the lazy
    PolarBody wrapper.
    """
    margin = CONFIG.polar_margin if margin is None else margin
    if isinstance(body, Ball) and np.all(body.center == 0.0) and body.radius > 0.0:
        if body.radius < margin:
            raise BodyError("origin is not strictly interior to the body")
        return Ball(body.q, 1.0 / body.radius, np.zeros(body.dim))
    if isinstance(body, EllipsoidBody) and np.all(body.ellipsoid.center == 0.0):
        e = body.ellipsoid
        if 1.0 / np.sqrt(e.eigvals[-1]) < margin:
            raise BodyError("origin is not strictly interior to the body")
        return EllipsoidBody(Ellipsoid(np.zeros(body.dim), e.inverse_shape))
    vp = body.as_vpolytope()
    if vp is not None:
        a, b = vp._facets()
        if np.min(b) < margin:
            raise BodyError("origin is not strictly interior to the body")
        return VPolytope(a / b[:, None])
    return PolarBody(body, margin=margin)


def affine_image(map_: AffineMap, body: ConvexBody) -> ConvexBody:
    """Image of a body, eager for presentations closed under affine maps."""
    if not map_.invertible:
        raise BodyError("affine image requires an invertible map")
    if isinstance(body, VPolytope):
        return VPolytope(map_(body.vertices))
    if isinstance(body, Ball):
        if np.allclose(map_.matrix, np.eye(body.dim), atol=0.0):
            return body.translate(map_.offset)
        if body.p == 2.0 and body.radius > 0.0:
            e = Ellipsoid(body.center, np.eye(body.dim) / body.radius ** 2)
            return EllipsoidBody(map_.map_ellipsoid(e))
        diag = np.diag(map_.matrix)
        if body.p != 2.0 and np.allclose(map_.matrix, diag[0] * np.eye(body.dim)) and diag[0] > 0.0:
            return Ball(body.p, body.radius * diag[0], map_(body.center))
    if isinstance(body, EllipsoidBody):
        return EllipsoidBody(map_.map_ellipsoid(body.ellipsoid))
    if isinstance(body, CrossSectionHull):
        if np.allclose(map_.matrix, np.eye(body.dim), atol=0.0):
            return body.translate(map_.offset)
        vp = body.as_vpolytope()
        if vp is not None:
            return VPolytope(map_(vp.vertices))
    if isinstance(body, AffineImage):
        return affine_image(map_.compose(body.map), body.inner)
    return AffineImage(map_, body)


@dataclass(eq=False)
class Chord:
    """Closed segment cut by a body out of a line, oriented along the query."""

    a: np.ndarray
    b: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    @property
    def direction(self) -> np.ndarray:
        d = self.b - self.a
        n = np.linalg.norm(d)
        return d / n if n > 0.0 else d


def _chord_interval_from_facets(a, b, p, u, tol):
    au = a @ u
    rhs = b - a @ p
    lo, hi = -np.inf, np.inf
    for c, r in zip(au, rhs):
        if c > 1e-14:
            hi = min(hi, r / c)
        elif c < -1e-14:
            lo = max(lo, r / c)
        elif r < -tol:
            return None
    if not np.isfinite(lo) or not np.isfinite(hi) or hi < lo - tol:
        return None
    return lo, hi


def chord_through(body: ConvexBody, p, q, tol: Optional[float] = None) -> Chord:
    """The chord of the body along the line through p and q.

    Exact interval arithmetic on facet presentations and quadrics; otherwise
    a scan along the line locates an inside point and both ends are bisected.
    """
    tol = CONFIG.boundary_tol if tol is None else tol
    p = _as_vector(p, body.dim)
    q = _as_vector(q, body.dim)
    u = q - p
    nu = np.linalg.norm(u)
    scale = max(1.0, body.circumradius_bound())
    if nu <= 1e-14 * scale:
        raise BodyError("chord needs two distinct points")
    u = u / nu

    facets = None
    if isinstance(body, VPolytope):
        facets = body._facets()
    else:
        vp = body.as_vpolytope()
        if vp is not None:
            facets = vp._facets()
    if facets is not None:
        interval = _chord_interval_from_facets(facets[0], facets[1], p, u, tol * scale)
        if interval is None:
            raise BodyError("line misses the body")
        return Chord(p + interval[0] * u, p + interval[1] * u)

    quad = None
    if isinstance(body, Ball) and body.p == 2.0:
        quad = (np.eye(body.dim) / body.radius ** 2, body.center)
    elif isinstance(body, EllipsoidBody):
        quad = (body.ellipsoid.shape, body.ellipsoid.center)
    if quad is not None:
        A, c = quad
        w = p - c
        aa = u @ A @ u
        bb = 2.0 * (w @ A @ u)
        cc = w @ A @ w - 1.0
        disc = bb * bb - 4.0 * aa * cc
        if disc <= 0.0:
            raise BodyError("line misses the body")
        root = np.sqrt(disc)
        return Chord(p + ((-bb - root) / (2 * aa)) * u, p + ((-bb + root) / (2 * aa)) * u)

    # generic route: find an interior parameter then bisect outward
    x0 = body.interior_point()
    t_center = float((x0 - p) @ u)
    span = body.circumradius_bound() + float(np.linalg.norm(x0)) + nu
    t_in = None
    for n_scan in (129, 2049, 32769):
        ts = t_center + span * np.linspace(-1.0, 1.0, n_scan)
        hits = body.contains_batch(p + ts[:, None] * u[None, :], 0.0)
        idx = np.flatnonzero(hits)
        if idx.size:
            t_in = float(ts[idx[idx.size // 2]])
            break
    if t_in is None:
        raise BodyError("line misses the body (or grazes below scan resolution)")

    def _bisect(t_inside, t_outside):
        for _ in range(120):
            mid = 0.5 * (t_inside + t_outside)
            if body.contains(p + mid * u, tol):
                t_inside = mid
            else:
                t_outside = mid
            if abs(t_outside - t_inside) <= 1e-13 * max(1.0, abs(t_inside)):
                break
        return t_inside

    t_hi = _bisect(t_in, t_center + span * 1.01)
    t_lo = _bisect(t_in, t_center - span * 1.01)
    return Chord(p + t_lo * u, p + t_hi * u)


def _polygon_support_arcs(poly: VPolytope):
    """Edge normal angles and the support vertex on each arc between them."""
    a, _ = poly._facets()
    angles = np.sort(np.mod(np.arctan2(a[:, 1], a[:, 0]), 2.0 * np.pi))
    angles = np.unique(angles)
    return angles


def _hausdorff_polygons(p1: VPolytope, p2: VPolytope) -> float:
    ang = np.unique(np.concatenate([_polygon_support_arcs(p1),
                                    _polygon_support_arcs(p2)]))
    best = 0.0
    n = ang.shape[0]
    for i in range(n):
        th_a = ang[i]
        th_b = ang[(i + 1) % n] + (2.0 * np.pi if i + 1 == n else 0.0)
        mid = 0.5 * (th_a + th_b)
        u_mid = np.array([np.cos(mid), np.sin(mid)])
        v1 = p1.support_point(u_mid)
        v2 = p2.support_point(u_mid)
        w = v1 - v2
        cands = [th_a, th_b]
        phi = np.arctan2(w[1], w[0])
        for extremum in (phi, phi + np.pi):
            t = np.mod(extremum - th_a, 2.0 * np.pi) + th_a
            if th_a - 1e-15 <= t <= th_b + 1e-15:
                cands.append(t)
        for t in cands:
            u = np.array([np.cos(t), np.sin(t)])
            best = max(best, abs(float(w @ u)))
    return best


def hausdorff_distance(c1: ConvexBody, c2: ConvexBody,
                       n_dirs: Optional[int] = None) -> float:
    """sup over unit directions of |h_1 - h_2|.

    Exact for pairs of polygons; otherwise a quasi-uniform net refined by
    local maximization, which yields a certified lower bound that is tight
    for smooth support differences.
    """
    if c1.dim != c2.dim:
        raise BodyError("bodies must share a dimension")
    d = c1.dim
    if d == 1:
        vals = [abs(c1.support(np.array([s])) - c2.support(np.array([s]))) for s in (1.0, -1.0)]
        return max(vals)
    vp1, vp2 = c1.as_vpolytope(), c2.as_vpolytope()
    if d == 2 and vp1 is not None and vp2 is not None:
        return _hausdorff_polygons(vp1, vp2)

    n = n_dirs if n_dirs is not None else (4096 if d <= 3 else 8192)
    U = sphere_directions(n, d, seed=CONFIG.seed)
    diffs = np.abs(c1.support_batch(U) - c2.support_batch(U))
    order = np.argsort(diffs)[::-1]
    best = float(diffs[order[0]])

    def f(u):
        return abs(c1.support(u) - c2.support(u))

    for k in order[:8]:
        u0 = U[k]
        if d == 2:
            th0 = np.arctan2(u0[1], u0[0])
            width = 2.0 * np.pi / n * 4.0
            res = optimize.minimize_scalar(
                lambda t: -f(np.array([np.cos(t), np.sin(t)])),
                bounds=(th0 - width, th0 + width), method="bounded",
                options={"xatol": 1e-14})
            best = max(best, -float(res.fun))
        else:
            basis = np.linalg.svd(u0[None, :])[2][1:]

            def chart(xi):
                u = u0 + xi @ basis
                return -f(u / np.linalg.norm(u))

            res = optimize.minimize(chart, np.zeros(d - 1), method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-14,
                                             "maxiter": 400})
            best = max(best, -float(res.fun))
    return best
