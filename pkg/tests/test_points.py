"""Point maps: centroid, dual minimizer, ellipsoid centers, gauge algebra."""
from __future__ import annotations

import numpy as np
import pytest

from affpoints import (
    CENTROID,
    JOHN,
    LOEWNER,
    POINT_MAPS,
    SANTALO,
    AffineImage,
    AffineMap,
    Ball,
    CrossSectionHull,
    PointError,
    PointMap,
    PolarBody,
    VPolytope,
    affine_combination,
    boundary_push,
    centroid,
    centroid_is_exact,
    equivariance_check,
    frustum_body,
    gauge_ratio,
    john_point,
    loewner_point,
    point_map,
    polar,
    polar_volume,
    psi,
    regular_simplex,
    santalo,
)
from conftest import random_affine, random_polygon

TRIANGLE = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
SQUARE = VPolytope([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def test_point_map_registry():
    assert set(POINT_MAPS) == {"g", "s", "j", "l"}
    assert point_map("g") is CENTROID
    assert point_map("j") is JOHN
    with pytest.raises(PointError):
        point_map("x")


def test_centroid_exact_paths(rng):
    np.testing.assert_allclose(centroid(TRIANGLE), [1 / 3, 1 / 3], atol=1e-12)
    ball = Ball(2.0, 1.5, np.array([0.2, -0.7]))
    np.testing.assert_allclose(centroid(ball), [0.2, -0.7], atol=1e-14)
    T = random_affine(rng, 2)
    image = AffineImage(T, TRIANGLE)
    np.testing.assert_allclose(centroid(image), T(np.array([1 / 3, 1 / 3])),
                               atol=1e-12)
    frustum = frustum_body(3)
    assert centroid_is_exact(frustum)
    axial = centroid(frustum)
    np.testing.assert_allclose(axial[1:], 0.0, atol=1e-12)
    for body in (TRIANGLE, ball, image, frustum):
        assert centroid_is_exact(body)


def test_centroid_monte_carlo_fallback():
    g = TRIANGLE.centroid()
    dual = PolarBody(TRIANGLE.translate(-g))
    assert not centroid_is_exact(dual)
    want = polar(TRIANGLE.translate(-g)).centroid()
    got = centroid(dual, seed=3)
    assert np.linalg.norm(got - want) <= 5e-3


def test_polar_volume_closed_cases():
    assert polar_volume(Ball(dim=2)) == pytest.approx(np.pi, abs=1e-12)
    assert polar_volume(SQUARE) == pytest.approx(2.0, rel=1e-5)
    ball3 = Ball(2.0, 2.0, np.zeros(3))
    want = (4.0 / 3.0) * np.pi / 8.0
    assert polar_volume(ball3) == pytest.approx(want, rel=1e-6)


def test_polar_volume_off_center():
    val0 = polar_volume(SQUARE, z=np.zeros(2))
    val1 = polar_volume(SQUARE, z=np.array([0.4, 0.0]))
    assert val1 > val0


def test_santalo_symmetric_bodies():
    np.testing.assert_allclose(santalo(SQUARE), 0.0, atol=1e-8)
    np.testing.assert_allclose(santalo(Ball(2.0, 1.0, np.array([0.3, 0.4]))),
                               [0.3, 0.4], atol=1e-8)


def test_santalo_simplex_is_centroid():
    np.testing.assert_allclose(santalo(TRIANGLE), [1 / 3, 1 / 3], atol=1e-5)


def test_santalo_minimizes_polar_volume(rng):
    poly = random_polygon(rng)
    s = santalo(poly)
    base = polar_volume(poly, z=s)
    for delta in 1e-3 * np.vstack([np.eye(2), -np.eye(2)]):
        assert polar_volume(poly, z=s + delta) >= base - 1e-12


def test_santalo_translation_covariance(rng):
    poly = random_polygon(rng)
    v = np.array([0.2, -0.1])
    np.testing.assert_allclose(santalo(poly.translate(v)), santalo(poly) + v,
                               atol=1e-9)


def test_john_loewner_points_on_simplex():
    np.testing.assert_allclose(john_point(TRIANGLE), [1 / 3, 1 / 3], atol=1e-7)
    np.testing.assert_allclose(loewner_point(regular_simplex(2)), 0.0, atol=1e-7)
    np.testing.assert_allclose(loewner_point(regular_simplex(3)), 0.0, atol=1e-7)


def test_gauge_ratio_ball_cases():
    ball = Ball(dim=2)
    for t in (0.25, 0.5, 0.8):
        gv = gauge_ratio(ball, np.array([t, 0.0]), np.zeros(2))
        assert gv.gamma == pytest.approx(t, abs=1e-9)
        assert gv.Gamma == pytest.approx(psi(t), abs=1e-9)


def test_gauge_ratio_coincidence_branch():
    gv = gauge_ratio(Ball(dim=2), np.zeros(2), np.zeros(2))
    assert gv.gamma == 0.0 and gv.Gamma == 1.0


def test_gauge_ratio_rejects_outside_query():
    with pytest.raises(PointError):
        gauge_ratio(Ball(dim=2), np.array([1.5, 0.0]), np.zeros(2))


def test_psi_tent():
    assert psi(0.0) == 1.0
    assert psi(0.5) == 0.5
    assert psi(1.0) == 1.0
    assert psi(0.2) == pytest.approx(0.8)
    assert psi(0.7) == pytest.approx(0.7)


def test_boundary_push_ball():
    outer = PointMap("q", lambda b: np.array([0.6, 0.0]))
    np.testing.assert_allclose(boundary_push(outer, Ball(dim=2)), [1.0, 0.0],
                               atol=1e-9)
    inner = PointMap("q", lambda b: np.array([0.3, 0.0]))
    np.testing.assert_allclose(boundary_push(inner, Ball(dim=2)),
                               [0.3 / 0.7, 0.0], atol=1e-9)


def test_boundary_push_coincidence_is_identity():
    np.testing.assert_allclose(boundary_push(CENTROID, TRIANGLE),
                               [1 / 3, 1 / 3], atol=1e-10)


def test_affine_combination():
    comb = affine_combination([CENTROID, JOHN], [0.5, 0.5])
    want = 0.5 * (centroid(TRIANGLE) + john_point(TRIANGLE))
    np.testing.assert_allclose(comb(TRIANGLE), want, atol=1e-10)
    with pytest.raises(PointError):
        affine_combination([CENTROID, JOHN], [0.7, 0.6])


def test_equivariance_of_closed_form_maps(rng):
    for _ in range(5):
        poly = random_polygon(rng)
        T = random_affine(rng, 2)
        assert equivariance_check(CENTROID, poly, T) <= 1e-9
        assert equivariance_check(JOHN, poly, T) <= 1e-6
        assert equivariance_check(LOEWNER, poly, T) <= 1e-6


def test_equivariance_of_santalo(rng):
    poly = random_polygon(rng)
    T = random_affine(rng, 2)
    assert equivariance_check(SANTALO, poly, T) <= 1e-3


def test_point_maps_land_inside(rng):
    hull = CrossSectionHull([
        (-0.5, Ball(2.0, 1.0, np.zeros(2))),
        (0.8, Ball(2.0, 0.3, np.zeros(2))),
    ])
    bodies = [random_polygon(rng), TRIANGLE, SQUARE, hull]
    for body in bodies:
        for name, pmap in POINT_MAPS.items():
            x = pmap(body)
            assert body.contains(x, tol=1e-6), (name, x)
