"""Shared generators for the test suite.

Bodies come out of these helpers in general position by construction, so
individual tests do not need degenerate-input guards of their own.  The
affine maps are built from an SVD with a capped singular value spread,
which keeps every solver comfortably inside its conditioning budget.
"""
from __future__ import annotations

import numpy as np
import pytest

from affpoints import AffineMap, VPolytope


def random_polygon(rng: np.random.Generator, n_min: int = 4,
                   n_max: int = 10) -> VPolytope:
    """Hull of points on a noisy circle, then sheared off axis."""
    n = int(rng.integers(n_min, n_max + 1))
    angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    radii = rng.uniform(0.5, 1.5, n)
    pts = np.c_[radii * np.cos(angles), radii * np.sin(angles)]
    shear = np.array([[1.0, rng.uniform(-0.4, 0.4)],
                      [rng.uniform(-0.4, 0.4), 1.0]])
    return VPolytope(pts @ shear + rng.uniform(-0.5, 0.5, 2))


def random_polytope_3d(rng: np.random.Generator, m_min: int = 6,
                       m_max: int = 14) -> VPolytope:
    """Hull of radially jittered sphere points; always full dimensional."""
    m = int(rng.integers(m_min, m_max + 1))
    pts = rng.standard_normal((m + 6, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts *= rng.uniform(0.6, 1.4, m + 6)[:, None]
    return VPolytope(pts + rng.uniform(-0.3, 0.3, 3))


def random_affine(rng: np.random.Generator, d: int,
                  max_cond: float = 10.0) -> AffineMap:
    """Invertible map with condition number at most max_cond."""
    u, _ = np.linalg.qr(rng.standard_normal((d, d)))
    v, _ = np.linalg.qr(rng.standard_normal((d, d)))
    root = np.sqrt(max_cond)
    sing = rng.uniform(1.0 / root, root, d)
    return AffineMap(u @ np.diag(sing) @ v.T, rng.uniform(-1.0, 1.0, d))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)
