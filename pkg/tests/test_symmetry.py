"""Affine symmetry detection, fixed spaces, group utilities."""
from __future__ import annotations

import numpy as np
import pytest

from affpoints import (
    AffineMap,
    VPolytope,
    affinely_equivalent,
    axis_signed_permutations,
    cone_body,
    fixed_space,
    group_average,
    regular_simplex,
    symmetry_group,
    verify_symmetry,
)
from conftest import random_affine, random_polygon

SQUARE = VPolytope([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
CUBE = VPolytope([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])


def test_square_group_order_eight():
    group = symmetry_group(SQUARE)
    assert group.order == 8
    assert group.contains_identity()
    assert group.closure_residual() <= 1e-9
    space = fixed_space(group)
    assert space.dim == 0
    np.testing.assert_allclose(space.base, 0.0, atol=1e-9)


def test_triangle_group_order_six():
    group = symmetry_group(regular_simplex(2))
    assert group.order == 6
    assert fixed_space(group).dim == 0


def test_cube_group_order_fortyeight():
    group = symmetry_group(CUBE)
    assert group.order == 48
    assert group.closure_residual() <= 1e-8


def test_sheared_square_keeps_its_group(rng):
    T = random_affine(rng, 2)
    skew = VPolytope(np.array([T(v) for v in SQUARE.vertices]))
    group = symmetry_group(skew)
    assert group.order == 8
    for element in group:
        assert verify_symmetry(skew, element) <= 1e-7


def test_generic_polygon_group_trivial(rng):
    for _ in range(5):
        poly = random_polygon(rng, 5, 9)
        group = symmetry_group(poly.reduced())
        assert group.order == 1


def test_symmetries_fix_the_body(rng):
    for poly in (SQUARE, regular_simplex(2), CUBE):
        group = symmetry_group(poly)
        for element in group:
            assert verify_symmetry(poly, element) <= 1e-8


def test_verify_symmetry_flags_non_symmetry():
    quarter_turn = AffineMap(np.array([[0.0, -1.0], [1.0, 0.0]]), np.zeros(2))
    tri = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert verify_symmetry(tri, quarter_turn) > 1e-2


def test_fixed_space_of_cone_axis():
    group = axis_signed_permutations(3, fixed_axes=1)
    space = fixed_space(group)
    assert space.dim == 1
    line = np.abs(space.basis[0] / np.linalg.norm(space.basis[0]))
    np.testing.assert_allclose(line, [1.0, 0.0, 0.0], atol=1e-10)
    cone = cone_body(3, 1)
    for element in group:
        assert verify_symmetry(cone, element) <= 1e-8


def test_axis_signed_permutation_orders():
    assert axis_signed_permutations(3, fixed_axes=1).order == 8
    assert axis_signed_permutations(4, fixed_axes=1).order == 48
    assert axis_signed_permutations(4, fixed_axes=2).order == 8
    from affpoints import SymmetryError
    with pytest.raises(SymmetryError):
        axis_signed_permutations(3, fixed_axes=3)


def test_group_average_lands_in_fixed_space(rng):
    group = symmetry_group(SQUARE)
    space = fixed_space(group)
    for _ in range(5):
        x = rng.uniform(-1.0, 1.0, 2)
        avg = group_average(group, x)
        assert space.distance(avg) <= 1e-9
        np.testing.assert_allclose(group_average(group, avg), avg, atol=1e-9)


def test_group_average_fixes_fixed_points(rng):
    group = axis_signed_permutations(3, fixed_axes=1)
    x = np.array([0.7, 0.0, 0.0])
    np.testing.assert_allclose(group_average(group, x), x, atol=1e-12)


def test_affinely_equivalent_finds_map(rng):
    tri = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    other = VPolytope([[0.0, 0.0], [2.0, 0.0], [1.0, 3.0]])
    T = affinely_equivalent(tri, other)
    assert T is not None
    mapped = VPolytope(np.array([T(v) for v in tri.vertices]))
    assert affinely_equivalent(mapped, other) is not None
    assert verify_symmetry(other, AffineMap.identity(2)) == 0.0


def test_affinely_equivalent_rejects_different_shapes():
    tri = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert affinely_equivalent(tri, SQUARE) is None


def test_all_symmetries_are_affine_equivalences(rng):
    T = random_affine(rng, 2)
    skew = VPolytope(np.array([T(v) for v in SQUARE.vertices]))
    group = symmetry_group(skew)
    for element in group:
        image = VPolytope(np.array([element(v) for v in skew.vertices]))
        assert affinely_equivalent(skew, image) is not None
