from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from horn_amoeba.algebra import parse_poly
from horn_amoeba.geometry import (GeometryError, IntCone, dual_cone, fan_check, fans_equal, minkowski_sum,
                                  newton_polytope, normal_fan, polytope_from_points, rank, recession_cone)

MANY = settings(max_examples=200, deadline=None, derandomize=True)

points2 = st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=9)
points3 = st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=4, max_size=9)


def full_dim(pts):
    base = pts[0]
    return rank([tuple(a - b for a, b in zip(p, base)) for p in pts[1:]]) == len(base)


def test_cone_representations():
    C = IntCone.from_generators([(1, 0), (1, 2)], 2)
    assert sorted(C.halfspaces) == [(0, 1), (2, -1)]
    assert C.contains((2, 2)) and not C.contains((0, 1))
    assert C.contains(C.interior_point())
    assert dual_cone(C) == IntCone.from_generators([(0, 1), (2, -1)], 2)
    assert dual_cone(IntCone.from_generators([(1, 0), (0, 1), (-1, 0), (0, -1)], 2)).is_zero()


def test_recession_of_strip():
    cone = recession_cone([((1, 0), 4, ">="), ((0, 1), 1, ">="), ((0, 1), 3, "<=")])
    assert cone == IntCone.from_generators([(1, 0)], 2)


def test_polytope_basics():
    sq = polytope_from_points([(0, 0), (2, 0), (0, 2), (1, 1), (2, 2)])
    assert set(sq.vertices) == {(0, 0), (0, 2), (2, 0), (2, 2)}
    assert sq.volume() == 4
    assert len(sq.lattice_points()) == 9
    simplex = polytope_from_points([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert simplex.volume() == Fraction(1, 6)
    box = minkowski_sum(polytope_from_points([(0, 0), (1, 0)]), polytope_from_points([(0, 0), (0, 1)]))
    assert set(box.vertices) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_degenerate_polytope_has_no_normal_fan():
    seg = polytope_from_points([(0, 0), (2, 2)])
    assert seg.dim == 1 and seg.contains((1, 1))
    with pytest.raises(GeometryError, match="full-dimensional"):
        normal_fan(seg)


def test_newton_polytope_of_product():
    f = parse_poly("(1-x1)*(1-x2)*(1-x1-x2)")[0]
    P = newton_polytope(f)
    assert set(P.vertices) == {(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)}
    assert P.volume() == Fraction(7, 2)


def test_fan_check_verdicts():
    bad = [IntCone.from_generators([(1, 0), (0, 1)], 2), IntCone.from_generators([(1, 1), (-1, 0)], 2)]
    v = fan_check(bad)
    assert v.verdict == "not a fan" and v.overlaps == [(0, 1)]
    v = fan_check([IntCone.orthant((1, 1))])
    assert v.verdict == "fan (not complete)" and v.uncovered is not None
    quads = [IntCone.orthant(s) for s in product((1, -1), repeat=2)]
    assert fan_check(quads).verdict == "complete fan"
    assert fans_equal(quads, list(reversed(quads)))


@given(st.one_of(points2, points3))
@MANY
def test_vertices_match_scipy_hull(pts):
    assume(full_dim(pts))
    P = polytope_from_points(pts)
    arr = np.array(pts, dtype=float)
    hull = ConvexHull(arr)
    assert {tuple(int(v) for v in arr[i]) for i in hull.vertices} == set(P.vertices)
    assert float(P.volume()) == pytest.approx(hull.volume)


@given(st.one_of(points2, points3), st.lists(st.integers(-9, 9), min_size=3, max_size=3))
@MANY
def test_contains_matches_hull_equations(pts, q):
    assume(full_dim(pts))
    P = polytope_from_points(pts)
    q = tuple(q[:len(pts[0])])
    hull = ConvexHull(np.array(pts, dtype=float))
    inside = bool((hull.equations[:, :-1] @ np.array(q, dtype=float) + hull.equations[:, -1] <= 1e-9).all())
    assert P.contains(q) == inside


@given(st.one_of(points2, points3))
@MANY
def test_normal_cones_are_dual_to_vertex_tangent_cones(pts):
    assume(full_dim(pts))
    P = polytope_from_points(pts)
    F = normal_fan(P)
    for v, cone in zip(F.labels, F.maximal_cones):
        tangent = IntCone.from_generators([tuple(a - b for a, b in zip(w, v)) for w in P.vertices if w != v],
                                          P.nvars)
        assert cone == dual_cone(tangent).negate()
