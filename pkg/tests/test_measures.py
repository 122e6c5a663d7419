"""Symmetry measure, lower bound checks, duality zeros, random bodies."""
from __future__ import annotations

import numpy as np
import pytest

from affpoints import (
    CENTROID,
    JOHN,
    LOEWNER,
    SANTALO,
    Ball,
    MeasureError,
    PointMap,
    VPolytope,
    check_lower_bound_jl,
    dual_zero_search,
    phi_measure,
    point_distance_estimate,
    random_sandwich_body,
)
from conftest import random_affine, random_polygon, random_polytope_3d

TRIANGLE = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
SQUARE = VPolytope([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def test_phi_coincidence_branch():
    result = phi_measure(CENTROID, SANTALO, SQUARE)
    assert result.phi == 1.0
    assert result.delta == 0.0
    assert result.chord_length is None


def test_phi_separated_points_hand_value():
    p1 = PointMap("a", lambda b: np.array([0.0, 0.0]))
    p2 = PointMap("b", lambda b: np.array([0.5, 0.0]))
    result = phi_measure(p1, p2, Ball(dim=2))
    assert result.chord_length == pytest.approx(2.0, abs=1e-9)
    assert result.delta == pytest.approx(0.25, abs=1e-9)
    assert result.phi == pytest.approx(0.75, abs=1e-9)


def test_phi_affine_invariance(rng):
    for _ in range(5):
        poly = random_polygon(rng)
        base = phi_measure(JOHN, LOEWNER, poly)
        T = random_affine(rng, 2)
        image = VPolytope(np.array([T(v) for v in poly.vertices]))
        moved = phi_measure(JOHN, LOEWNER, image)
        assert moved.phi == pytest.approx(base.phi, abs=2e-4)


def test_phi_rejects_outside_values():
    p_out = PointMap("far", lambda b: np.array([9.0, 9.0]))
    with pytest.raises(MeasureError):
        phi_measure(CENTROID, p_out, TRIANGLE)


def test_lower_bound_jl_on_random_bodies(rng):
    for _ in range(10):
        phi, bound, ok = check_lower_bound_jl(random_polygon(rng))
        assert ok
        assert bound == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert phi >= bound - 1e-6
    phi, bound, ok = check_lower_bound_jl(random_polytope_3d(rng))
    assert ok and bound == pytest.approx(0.5, abs=1e-12)


def test_lower_bound_tight_for_symmetric_bodies():
    phi, bound, ok = check_lower_bound_jl(SQUARE)
    assert ok
    assert phi == pytest.approx(1.0, abs=1e-9)


def test_dual_zero_of_centroid_on_simplex():
    report = dual_zero_search(CENTROID, TRIANGLE)
    assert len(report.zeros) == 1
    np.testing.assert_allclose(report.zeros[0], [1 / 3, 1 / 3], atol=1e-6)
    assert report.values[0] <= report.tol


def test_dual_zero_of_santalo_on_square():
    report = dual_zero_search(SANTALO, SQUARE, grid_n=17)
    assert len(report.zeros) == 1
    np.testing.assert_allclose(report.zeros[0], 0.0, atol=1e-5)


def test_dual_zero_translation_covariance():
    shifted = TRIANGLE.translate(np.array([0.4, -0.2]))
    report = dual_zero_search(CENTROID, shifted)
    assert len(report.zeros) == 1
    np.testing.assert_allclose(report.zeros[0],
                               [1 / 3 + 0.4, 1 / 3 - 0.2], atol=1e-6)


def test_sandwich_bodies_are_sandwiched(rng):
    for dim in (2, 3):
        for _ in range(3):
            body = random_sandwich_body(dim, rng)
            norms = np.linalg.norm(body.vertices, axis=1)
            assert norms.max() <= dim + 1e-9
            U = rng.standard_normal((200, dim))
            U /= np.linalg.norm(U, axis=1, keepdims=True)
            assert body.support_batch(U).min() >= 1.0 - 1e-9


def test_point_distance_estimate_identity_is_zero():
    assert point_distance_estimate(CENTROID, CENTROID, n_bodies=4, seed=0) == 0.0


def test_point_distance_estimate_separates_g_l(rng):
    value = point_distance_estimate(CENTROID, LOEWNER, n_bodies=6, seed=1)
    assert value > 1e-3
