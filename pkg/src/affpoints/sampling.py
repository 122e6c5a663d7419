"""Deterministic direction sets on the unit sphere."""

from __future__ import annotations

import numpy as np
from scipy import stats
from scipy.special import gammaln


def unit_ball_volume(d: int) -> float:
    """Volume of the Euclidean unit ball in dimension d."""
    return float(np.exp(d / 2.0 * np.log(np.pi) - gammaln(d / 2.0 + 1.0)))


def sphere_directions(n: int, d: int, seed: int = 0) -> np.ndarray:
    """n quasi-uniform unit vectors in R^d, deterministic in (n, d, seed).

    Dimension 2 uses equispaced angles with a seed-dependent phase, higher
    dimensions push a scrambled Sobol cube through the normal quantile and
    normalize.  Sobol balance wants a power of two, so n is rounded up.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if d == 1:
        return np.array([[1.0], [-1.0]])[: max(n, 1)]
    if d == 2:
        theta = 2.0 * np.pi * (np.arange(n) + 0.5 * ((seed % 997) + 1) / 998.0) / n
        return np.column_stack([np.cos(theta), np.sin(theta)])
    n_pow = 1 << int(np.ceil(np.log2(max(n, 2))))
    sob = stats.qmc.Sobol(d, scramble=True, seed=seed)
    x = sob.random(n_pow)[:n]
    z = stats.norm.ppf(np.clip(x, 1e-12, 1.0 - 1e-12))
    nz = np.linalg.norm(z, axis=1)
    nz[nz == 0.0] = 1.0
    return z / nz[:, None]


def random_directions(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """iid uniform unit vectors."""
    z = rng.standard_normal((n, d))
    nz = np.linalg.norm(z, axis=1)
    nz[nz == 0.0] = 1.0
    return z / nz[:, None]
