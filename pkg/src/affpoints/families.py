"""Explicit body families with known extremal behaviour.

The central family stacks two parallel cross sections along the first
coordinate axis: a slightly tilted-back ball (or simplex) of radius close
to one against a small ball sitting near the opposite pole.  For the right
tilt parameter the enclosing ellipsoid of the hull is the unit ball, with a
fully explicit contact system, while the inscribed ellipsoid hides inside a
thin simplex frustum.  That pushes the inscribed and enclosing centers
apart by almost the full chord, which is the worst case the chord-ratio
measure permits in a given dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import helmert

from .bodies import AffineMap, Ball, BodyError, ConvexBody, CrossSectionHull, VPolytope, polar
from .ellipsoids import ContactSystem


class FamilyError(ValueError):
    """Invalid parameters for one of the body families."""


def epsilon_d(d: int) -> float:
    """Tilt parameter: the positive root of s (1 - (d+1) e^2) = (d - 1 - 1/d) e.

    Here s = sqrt(1 - 1/d).  The root is evaluated in the subtraction-free
    form 2c / (b + sqrt(b^2 + 4ac)) and cross-checked against bisection,
    which acts as the authority whenever the two disagree.  The root decays
    like 1/d and stays below 1/sqrt(d+1), which keeps both contact weights
    positive.
    """
    if d < 2:
        raise FamilyError("dimension must be at least 2")
    s = np.sqrt(1.0 - 1.0 / d)
    a = (d + 1.0) * s
    b = d - 1.0 - 1.0 / d
    closed = 2.0 * s / (b + np.sqrt(b * b + 4.0 * a * s))

    def f(e: float) -> float:
        return s * (1.0 - (d + 1.0) * e * e) - b * e

    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    bisected = 0.5 * (lo + hi)
    if abs(closed - bisected) > 1e-12:
        return bisected
    return float(closed)


@dataclass(frozen=True)
class FamilyParams:
    """Scalars of the two-section construction in a given dimension.

    epsilon is the tilt of the large section, rho the apex coordinate of
    the simplex completing the frustum, and t1, t2 the contact weights on
    the large and small rims.  The defining identities

        t1 (1 - eps^2) + t2 / d = 1/2
        t1 d eps^2 + t2 (d - 1) = 1/2
        t1 eps = t2 sqrt(1 - 1/d)

    are enforced at construction to 1e-12.
    """

    d: int
    epsilon: float
    rho: float
    t1: float
    t2: float

    def __post_init__(self):
        d, e, t1, t2 = self.d, self.epsilon, self.t1, self.t2
        s = np.sqrt(1.0 - 1.0 / d)
        eqs = (
            t1 * (1.0 - e * e) + t2 / d - 0.5,
            t1 * d * e * e + t2 * d * (1.0 - 1.0 / d) - 0.5,
            t1 * e - t2 * s,
        )
        if max(abs(v) for v in eqs) > 1e-12:
            raise FamilyError("contact weight identities violated: %r" % (eqs,))
        if t1 <= 0.0 or t2 <= 0.0:
            raise FamilyError("contact weights must be positive")


def family_params(d: int) -> FamilyParams:
    """Solve the weight identities for the tilt epsilon_d."""
    e = epsilon_d(d)
    s = np.sqrt(1.0 - 1.0 / d)
    ratio = s / e
    t2 = 0.5 / (ratio * (1.0 - e * e) + 1.0 / d)
    t1 = ratio * t2
    return FamilyParams(d, e, rho_d(d), t1, t2)


def regular_simplex(d: int) -> VPolytope:
    """The regular d-simplex with unit vertices and Gram entries -1/d."""
    if d < 1:
        raise FamilyError("dimension must be at least 1")
    n = d + 1
    E = np.eye(n) - 1.0 / n
    H = helmert(n, full=True)
    Y = E @ H[1:].T
    Y /= np.linalg.norm(Y[0])
    return VPolytope(Y)


def body_K(d: int, epsilon: Optional[float] = None) -> CrossSectionHull:
    """Hull of two parallel balls whose enclosing ellipsoid is the unit ball.

    Ambient dimension d + 1.  The large section sits at axis coordinate
    -epsilon with radius sqrt(1 - epsilon^2); the small one at sqrt(1 - 1/d)
    with radius 1/sqrt(d).  Both rims lie on the unit sphere.
    """
    e = epsilon_d(d) if epsilon is None else float(epsilon)
    zero = np.zeros(d)
    return CrossSectionHull([
        (-e, Ball(2.0, float(np.sqrt(1.0 - e * e)), zero)),
        (float(np.sqrt(1.0 - 1.0 / d)), Ball(2.0, float(1.0 / np.sqrt(d)), zero)),
    ])


def contact_system_K(d: int) -> ContactSystem:
    """The explicit 4d-point contact system of the two-ball hull.

    For each base coordinate i the rim of the large section contributes
    +-sqrt(1 - eps^2) e_i - eps e_1 with weight t1 and the rim of the small
    section +-(1/sqrt(d)) e_i + sqrt(1 - 1/d) e_1 with weight t2.
    """
    params = family_params(d)
    e, t1, t2 = params.epsilon, params.t1, params.t2
    D = d + 1
    big = np.sqrt(1.0 - e * e)
    small = 1.0 / np.sqrt(d)
    axis = np.sqrt(1.0 - 1.0 / d)
    points = []
    for i in range(1, D):
        for sign in (1.0, -1.0):
            v = np.zeros(D)
            v[i] = sign * big
            v[0] = -e
            points.append(v)
    for i in range(1, D):
        for sign in (1.0, -1.0):
            w = np.zeros(D)
            w[i] = sign * small
            w[0] = axis
            points.append(w)
    weights = np.concatenate([np.full(2 * d, t1), np.full(2 * d, t2)])
    return ContactSystem(np.array(points), weights)


def body_C(d: int, epsilon: Optional[float] = None) -> CrossSectionHull:
    """Simplex-over-ball variant of the two-section hull.

    The large ball section is replaced by the regular simplex inscribed in
    it; the enclosing ellipsoid is unchanged because the simplex vertices
    still pin the unit sphere, while the inscribed ellipsoid shrinks into a
    frustum whose center drifts almost a full radius along the axis.
    """
    e = epsilon_d(d) if epsilon is None else float(epsilon)
    simplex = regular_simplex(d)
    return CrossSectionHull([
        (-e, VPolytope(float(np.sqrt(1.0 - e * e)) * simplex.vertices)),
        (float(np.sqrt(1.0 - 1.0 / d)), Ball(2.0, float(1.0 / np.sqrt(d)), np.zeros(d))),
    ])


def rho_d(d: int) -> float:
    """Axis coordinate of the apex completing the frustum to a simplex."""
    e = epsilon_d(d)
    s = np.sqrt(1.0 - 1.0 / d)
    big = np.sqrt(1.0 - e * e)
    return float((e * np.sqrt(d) + big * s) / (np.sqrt(d) - big))


def frustum_body(d: int) -> CrossSectionHull:
    """The simplex frustum squeezed between the two sections.

    Hull of the large simplex section and the blown-up simplex sqrt(d)
    Delta_d at the small section's offset; it shares its inscribed ellipsoid
    with the full simplex and with the two hull families.
    """
    e = epsilon_d(d)
    simplex = regular_simplex(d)
    return CrossSectionHull([
        (-e, VPolytope(float(np.sqrt(1.0 - e * e)) * simplex.vertices)),
        (float(np.sqrt(1.0 - 1.0 / d)), VPolytope(float(np.sqrt(d)) * simplex.vertices)),
    ])


def completed_simplex(d: int) -> VPolytope:
    """The (d+1)-simplex whose truncation is the frustum: apex -rho_d e_1
    plus the blown-up base section."""
    simplex = regular_simplex(d)
    base = np.hstack([
        np.full((d + 1, 1), np.sqrt(1.0 - 1.0 / d)),
        np.sqrt(d) * simplex.vertices,
    ])
    apex = np.zeros(d + 1)
    apex[0] = -rho_d(d)
    return VPolytope(np.vstack([apex, base]))


def frustum_centroid_coordinate(d: int) -> float:
    """Axis coordinate of the completed simplex's centroid.

    A segment from the apex to the opposite base is cut by a simplex
    centroid in ratio dimension to one, so the coordinate is the vertex
    mean (-rho_d + (d+1) sqrt(1 - 1/d)) / (d + 2).  The inscribed ellipsoids
    of the frustum and of both hull families are centered there.
    """
    s = np.sqrt(1.0 - 1.0 / d)
    return float((-rho_d(d) + (d + 1.0) * s) / (d + 2.0))


def phi_jl_Cd_closed_form(d: int) -> float:
    """Chord-ratio measure of the simplex-over-ball hull, in closed form.

    Assumes the enclosing center sits at the origin and the inscribed
    center at the frustum coordinate; the chord through both runs along the
    axis from -epsilon_d to sqrt(1 - 1/d).  The solver route exists as an
    independent cross-check of exactly these identifications.
    """
    s = np.sqrt(1.0 - 1.0 / d)
    return float(1.0 - frustum_centroid_coordinate(d) / (s + epsilon_d(d)))


def cone_body(d: int, k: int) -> CrossSectionHull:
    """Cone over a (k+1)-norm ball: hull of the origin and (1, B_{k+1}).

    Ambient dimension d with a degenerate point section at offset zero.
    The designated symmetry group is the signed permutations of the last
    d - 1 coordinates, and its fixed line is the cone axis.
    """
    if d < 3:
        raise FamilyError("cone construction requires dimension at least 3")
    if k < 1:
        raise FamilyError("base exponent index must be at least 1")
    zero = np.zeros(d - 1)
    return CrossSectionHull([
        (0.0, Ball(2.0, 0.0, zero)),
        (1.0, Ball(float(k + 1), 1.0, zero)),
    ])


def shifted_crosspolytope_polar(d: int, delta: float) -> ConvexBody:
    """Polar of the unit cross polytope translated by -delta e_1.

    A handy worked family for duality-zero experiments: the translation
    breaks the central symmetry while the polar stays an explicit polytope.
    """
    if not 0.0 <= delta < 1.0:
        raise FamilyError("offset must lie in [0, 1) to keep the origin interior")
    vertices = np.vstack([np.eye(d), -np.eye(d)])
    vertices[:, 0] -= delta
    return polar(VPolytope(vertices))
