"""Affine symmetry groups of polytopes and the subspaces they fix.

The search conjugates the polytope by its vertex second-moment whitening, so
every affine self-map becomes an isometry of the normalized vertex cloud.
Candidate vertex permutations are enumerated depth-first under Gram-matrix
compatibility, each surviving permutation is turned back into an affine map
by orthogonal Procrustes, and the fixed space is the joint kernel of the
collected linear parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bodies import AffineMap, BodyError, ConvexBody, VPolytope
from .config import CONFIG
from .sampling import sphere_directions


class SymmetryError(RuntimeError):
    """Symmetry search preconditions violated or search aborted."""


@dataclass(frozen=True)
class SymmetryGroup:
    """A finite set of affine maps, each satisfying T(C) = C."""

    elements: Tuple[AffineMap, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def closure_residual(self) -> float:
        """Largest distance from a pairwise composition to the nearest element.

        Zero (to rounding) certifies the group table is complete; the check
        covers inverses as well because a finite set closed under composition
        that contains the identity contains every inverse.
        """
        worst = 0.0
        for s in self.elements:
            for t in self.elements:
                c = s.compose(t)
                best = min(
                    max(float(np.abs(c.matrix - e.matrix).max()),
                        float(np.abs(c.offset - e.offset).max()))
                    for e in self.elements)
                worst = max(worst, best)
        return worst

    def contains_identity(self, tol: float = 1e-9) -> bool:
        eye = AffineMap.identity(self.elements[0].dim)
        return any(e.isclose(eye, tol) for e in self.elements)


@dataclass(frozen=True)
class FixedSpace:
    """Affine subspace { base + span(basis) } fixed pointwise by a group."""

    base: np.ndarray
    basis: np.ndarray
    dim: int

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.dim == 0:
            return self.base.copy()
        rel = x - self.base
        return self.base + self.basis.T @ (self.basis @ rel)

    def distance(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.project(x)))


def _whiten(vertices: np.ndarray):
    """Shift to the vertex mean and whiten by the second-moment matrix."""
    mean = vertices.mean(axis=0)
    X = vertices - mean
    M = X.T @ X / len(X)
    w, V = np.linalg.eigh(M)
    if w[0] <= 1e-14 * max(w[-1], 1.0):
        raise SymmetryError("vertex set is not full-dimensional")
    N = V @ np.diag(w ** -0.5) @ V.T
    Ninv = V @ np.diag(w ** 0.5) @ V.T
    return X @ N, N, Ninv, mean


def _procrustes(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Orthogonal Q minimizing ||A Q^T - B||_F (rows are points)."""
    U, _, Vt = np.linalg.svd(A.T @ B)
    return (U @ Vt).T


def _gram_permutations(G1: np.ndarray, G2: np.ndarray, atol: float):
    """All bijections sigma with G2[sigma(i), sigma(k)] = G1[i, k].

    Depth-first with lexicographic candidate order; the Gram constraint
    against every previously assigned vertex prunes hard for generic bodies.
    """
    m = len(G1)
    out: List[Tuple[int, ...]] = []
    assigned = np.full(m, -1, dtype=int)
    used = np.zeros(m, dtype=bool)

    def descend(i: int):
        if i == m:
            out.append(tuple(assigned))
            return
        for j in range(m):
            if used[j] or abs(G2[j, j] - G1[i, i]) > atol:
                continue
            ok = True
            for k in range(i):
                if abs(G2[j, assigned[k]] - G1[i, k]) > atol:
                    ok = False
                    break
            if ok:
                assigned[i] = j
                used[j] = True
                descend(i + 1)
                used[j] = False
        assigned[i] = -1

    descend(0)
    return out


def _check_poly(poly: VPolytope, max_vertices: int) -> np.ndarray:
    if not isinstance(poly, VPolytope):
        raise SymmetryError("symmetry search requires an explicit vertex list")
    if len(poly.vertices) > max_vertices:
        raise SymmetryError("vertex count %d exceeds the search limit %d"
                            % (len(poly.vertices), max_vertices))
    if not poly.is_minimal():
        raise SymmetryError("vertex list is not a minimal V-representation")
    return poly.vertices


def symmetry_group(poly: VPolytope, tol: Optional[float] = None,
                   max_vertices: int = 60) -> SymmetryGroup:
    """All affine maps T with T(C) = C for a polytope C.

    Whitening makes each such T an isometry of the normalized vertices, so
    the group is exactly the set of Gram-preserving vertex permutations that
    an orthogonal map realizes within tol.
    """
    tol = CONFIG.group_tol if tol is None else float(tol)
    vertices = _check_poly(poly, max_vertices)
    W, N, Ninv, mean = _whiten(vertices)
    G = W @ W.T
    atol = max(1e-5, 1e3 * tol) * max(1.0, float(np.abs(G).max()))
    scale = max(1.0, float(np.abs(vertices).max()))

    elements = []
    for sigma in _gram_permutations(G, G, atol):
        Q = _procrustes(W, W[list(sigma)])
        if np.abs(W @ Q.T - W[list(sigma)]).max() > 1e3 * tol:
            continue
        L = Ninv @ Q @ N
        b = mean - L @ mean
        T = AffineMap(L, b)
        if np.abs(T(vertices) - vertices[list(sigma)]).max() > tol * scale * 1e3:
            continue
        elements.append((sigma, T))
    elements.sort(key=lambda st: st[0])
    return SymmetryGroup(tuple(T for _, T in elements))


def affinely_equivalent(c1: VPolytope, c2: VPolytope,
                        tol: Optional[float] = None,
                        max_vertices: int = 60) -> Optional[AffineMap]:
    """An affine map T with T(C1) = C2, or None when none exists.

    Invertible affine maps send vertices to vertices, so different vertex
    counts settle the question immediately; otherwise the same whitening and
    permutation search as the symmetry group, run across the two bodies.
    """
    tol = 1e-6 if tol is None else float(tol)
    v1 = _check_poly(c1, max_vertices)
    v2 = _check_poly(c2, max_vertices)
    if len(v1) != len(v2) or v1.shape[1] != v2.shape[1]:
        return None
    W1, N1, _, mean1 = _whiten(v1)
    W2, _, N2inv, mean2 = _whiten(v2)
    G1 = W1 @ W1.T
    G2 = W2 @ W2.T
    atol = max(1e-5, 1e3 * tol) * max(1.0, float(np.abs(G1).max()))
    scale = max(1.0, float(np.abs(v2).max()))
    for sigma in _gram_permutations(G1, G2, atol):
        Q = _procrustes(W1, W2[list(sigma)])
        if np.abs(W1 @ Q.T - W2[list(sigma)]).max() > 1e3 * tol:
            continue
        L = N2inv @ Q @ N1
        b = mean2 - L @ mean1
        T = AffineMap(L, b)
        if np.abs(T(v1) - v2[list(sigma)]).max() <= tol * scale:
            return T
    return None


def fixed_space(group: SymmetryGroup, tol: Optional[float] = None) -> FixedSpace:
    """The affine subspace fixed pointwise by every element of the group.

    The base point is the group average of the origin, which the projection
    property places in the fixed space exactly; the directions are the joint
    kernel of the stacked (L - Id) blocks.
    """
    tol = CONFIG.group_tol if tol is None else float(tol)
    d = group.elements[0].dim
    base = group_average(group, np.zeros(d))
    worst = max(float(np.linalg.norm(T(base) - base)) for T in group)
    if worst > 1e3 * tol:
        raise SymmetryError(
            "group average moved by %.2e under the group; elements do not "
            "form a symmetry group at this tolerance" % worst)
    stacked = np.vstack([T.matrix - np.eye(d) for T in group])
    _, s, Vt = np.linalg.svd(stacked)
    s = np.concatenate([s, np.zeros(max(0, d - len(s)))])
    mask = s <= tol * max(1.0, s[0] if len(s) else 1.0)
    basis = Vt[mask]
    return FixedSpace(base, basis, int(mask.sum()))


def group_average(group: SymmetryGroup, x) -> np.ndarray:
    """Mean of the group orbit of x; lands in the fixed space exactly."""
    x = np.asarray(x, dtype=float)
    return np.mean([T(x) for T in group], axis=0)


def verify_symmetry(body: ConvexBody, T: AffineMap, n_dirs: int = 512,
                    seed: int = 0) -> float:
    """Max support mismatch between T(C) and C over a direction net."""
    U = sphere_directions(n_dirs, body.dim, seed=seed)
    h_body = body.support_batch(U)
    h_image = body.support_batch(U @ T.matrix) + U @ T.offset
    return float(np.abs(h_image - h_body).max())


def axis_signed_permutations(dim: int, fixed_axes: int = 1) -> SymmetryGroup:
    """Signed permutations of the last dim - fixed_axes coordinates.

    This is the designated finite symmetry group of bodies built from
    p-norm ball cross sections stacked along the leading axes: permuting or
    flipping the trailing coordinates fixes every section.  Its fixed space
    is the span of the leading axes, which for the cone bodies is already
    the full fixed space of the body.
    """
    k = dim - fixed_axes
    if k < 1:
        raise SymmetryError("need at least one free coordinate")
    if k > 6:
        raise SymmetryError("signed permutation group of %d coordinates is "
                            "too large to enumerate" % k)
    elements = []
    for perm in permutations(range(k)):
        for signs in product((1.0, -1.0), repeat=k):
            L = np.eye(dim)
            block = np.zeros((k, k))
            for i, (j, s) in enumerate(zip(perm, signs)):
                block[i, j] = s
            L[fixed_axes:, fixed_axes:] = block
            elements.append(AffineMap(L, np.zeros(dim)))
    return SymmetryGroup(tuple(elements))
