"""Randomized property suites shared by the acceptance run.

Each ``suite_*`` function is a hypothesis test with at least 200 examples.
"""
from collections import Counter
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from horn_amoeba.algebra import MultiPoly, univariate_resultant
from horn_amoeba.amoeba import INSIDE, OUTSIDE, AmoebaError, component_census, membership, order_map
from horn_amoeba.geometry import (IntCone, dual_cone, fan_check, newton_polytope, normal_fan,
                                  polytope_from_points, rank)
from horn_amoeba.horn import OreSatoCoefficient, bergman_kernel, compatibility_check, horn_from_ore_sato
from horn_amoeba.supports import admissible_supports, check_support_conditions, two_sided_abel_bounds

# valid examples reaching the assertions, per suite
COUNTS: Counter = Counter()

SETTINGS = settings(max_examples=200, deadline=None, derandomize=True,
                    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])


@st.composite
def polys(draw, nvars, max_deg=2, max_terms=4, coeff=5):
    k = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(k):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        c = draw(st.integers(-coeff, coeff).filter(bool))
        terms[e] = Fraction(c)
    return MultiPoly(nvars, terms)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), polys(n), polys(n), polys(n))))
@SETTINGS
def suite_resultant_multiplicativity(args):
    n, f, g, h = args
    assume(min(f.degree_in(0), g.degree_in(0), h.degree_in(0)) >= 1)
    COUNTS["resultant"] += 1
    lhs = univariate_resultant(f * g, h, 0)
    rhs = univariate_resultant(f, h, 0) * univariate_resultant(g, h, 0)
    assert lhs == rhs


vectors3 = st.lists(st.integers(-3, 3), min_size=3, max_size=3).map(tuple)
vectors2 = st.lists(st.integers(-3, 3), min_size=2, max_size=2).map(tuple)


@given(st.one_of(st.lists(vectors2, min_size=1, max_size=4).map(lambda g: (2, g)),
                 st.lists(vectors3, min_size=1, max_size=5).map(lambda g: (3, g))))
@SETTINGS
def suite_dual_involution(args):
    n, gens = args
    gens = [g for g in gens if any(g)]
    assume(gens)
    COUNTS["dual"] += 1
    C = IntCone.from_generators(gens, n)
    assert dual_cone(dual_cone(C)) == C
    for g in gens:
        assert C.contains(g)


@given(st.one_of(st.lists(st.lists(st.integers(0, 3), min_size=2, max_size=2).map(tuple), min_size=3, max_size=7),
                 st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3).map(tuple), min_size=4, max_size=7)),
       st.lists(st.integers(-50, 50), min_size=3, max_size=3))
@SETTINGS
def suite_normal_fan_coverage(pts, w):
    n = len(pts[0])
    base = pts[0]
    assume(rank([tuple(a - b for a, b in zip(p, base)) for p in pts[1:]]) == n)
    P = polytope_from_points(pts)
    F = normal_fan(P)
    v = fan_check(F.maximal_cones, samples=2000)
    assert v.is_fan and v.complete
    w = tuple(w[:n])
    assume(any(w))
    COUNTS["fan"] += 1
    vals = [sum(a * b for a, b in zip(w, q)) for q in P.vertices]
    best = max(vals)
    for q, val, cone in zip(P.vertices, vals, F.maximal_cones):
        assert cone.contains(w) == (val == best)


@given(polys(2, max_deg=3, max_terms=5), st.lists(st.floats(-4, 4), min_size=4, max_size=4))
@SETTINGS
def suite_order_map(f, ts):
    assume(len(f.terms) >= 2)
    t1, t2 = np.array(ts[:2]), np.array(ts[2:])
    m1 = membership(f, t1)
    assume(m1.state == OUTSIDE)
    try:
        nu = order_map(f, t1)
    except AmoebaError:
        assume(False)
    COUNTS["order"] += 1
    assert nu == m1.order
    assert newton_polytope(f).contains(nu)
    m2 = membership(f, t2)
    if m2.state == OUTSIDE and m2.order == m1.order:
        # equal orders mean one (convex) component: the segment never meets the amoeba
        for lam in np.linspace(0, 1, 9)[1:-1]:
            assert membership(f, (1 - lam) * t1 + lam * t2).state != INSIDE


@st.composite
def nonconfluent(draw):
    n = draw(st.integers(2, 3))
    vec = st.lists(st.integers(-2, 2), min_size=n, max_size=n).map(tuple)
    k = draw(st.integers(n, n + 2))
    rows = [draw(vec) for _ in range(k - 1)]
    last = tuple(-sum(r[i] for r in rows) for i in range(n))
    rows.append(last)
    rows = [r for r in rows if any(r)]
    assume(rows and rank(rows) == n)
    frac = st.fractions(min_value=-3, max_value=3, max_denominator=7)
    num, den = [], []
    for r in rows:
        c = draw(frac)
        if draw(st.booleans()):
            num.append((r, c))
        else:
            den.append((tuple(-x for x in r), -1 - c))
    lin = [(draw(vec), draw(frac)) for _ in range(draw(st.integers(0, 2)))]
    lin = [(a, lam) for a, lam in lin if any(a)]
    t = [draw(frac.filter(bool)) for _ in range(n)]
    return OreSatoCoefficient(n, t, num, den, lin)


@given(nonconfluent())
@SETTINGS
def suite_horn_compatibility(phi):
    COUNTS["horn"] += 1
    H = horn_from_ore_sato(phi)
    assert H.is_nonconfluent()
    assert compatibility_check(H)


@st.composite
def planar_coefficients(draw):
    vec = st.lists(st.integers(-2, 2), min_size=2, max_size=2).map(tuple)
    rows = [draw(vec) for _ in range(draw(st.integers(1, 3)))]
    rows.append(tuple(-sum(r[i] for r in rows) for i in range(2)))
    rows = [r for r in rows if any(r)]
    assume(len(rows) >= 2 and rank(rows) == 2)
    ints = st.integers(-3, 3)
    num = [(r, Fraction(draw(ints))) for r in rows]
    lin = [(draw(vec), Fraction(draw(ints))) for _ in range(draw(st.integers(0, 2)))]
    lin = [(a, lam) for a, lam in lin if any(a)]
    return OreSatoCoefficient(2, (1, 1), num, [], lin)


@given(planar_coefficients())
@SETTINGS
def suite_admissible_recheck(phi):
    H = horn_from_ore_sato(phi)
    COUNTS["supports"] += 1
    sups = admissible_supports(H, (0, 0), window=8)
    for S in sups:
        assert check_support_conditions(H, S, window=8) == []


def _dist_to_cone(v: np.ndarray, gens: list) -> float:
    """Euclidean distance from ``v`` to a planar pointed cone given by two generators."""
    a, b = (np.asarray(g, dtype=float) for g in gens)
    coef = np.linalg.solve(np.column_stack([a, b]), v)
    if (coef >= 0).all():
        return 0.0
    best = np.linalg.norm(v)
    for g in (a, b):
        s = max(0.0, float(v @ g) / float(g @ g))
        best = min(best, float(np.linalg.norm(v - s * g)))
    return best


def abel_vs_census(p, resolution=80):
    """Compare -C^dual of every Bergman support with the matching census component.

    Returns the number of cell displacement checks performed.
    """
    B = bergman_kernel(p)
    f = B.closed_form.den
    census = component_census(f, resolution=resolution)
    grid = census.grid
    centers = grid.centers()
    R = grid.hi[0]
    sups = admissible_supports(B.system)
    assert len(sups) == len(census.components) == len(p) + 1
    checks = 0
    used = set()
    for S in sups:
        cone = two_sided_abel_bounds(S)
        gens = cone.generators
        direction = np.asarray(cone.interior_point(), dtype=float)
        far = 0.9 * R * direction / np.linalg.norm(direction)
        cell = int(np.argmin(np.linalg.norm(centers - far, axis=1)))
        comp = next(c for c in census.components if cell in set(c.cell_indices.tolist()))
        assert comp.order not in used
        used.add(comp.order)
        members = set(comp.cell_indices.tolist())
        base = centers[cell]
        # the whole component stays within a bounded distance of the cone at the origin
        K = 1.0 + float(np.linalg.norm(grid.cell_size()))
        for k in comp.cell_indices:
            assert _dist_to_cone(centers[k], gens) <= K
            checks += 1
        # the cone's rays from the base cell stay in the component while on the grid
        step = grid.cell_size().min()
        for g in gens:
            g = np.asarray(g, dtype=float) / np.linalg.norm(g)
            for lam in np.arange(step, 2 * R, step):
                q = base + lam * g
                if (q < np.asarray(grid.lo)).any() or (q > np.asarray(grid.hi)).any():
                    break
                idx = tuple(np.clip(((q - np.asarray(grid.lo)) / grid.cell_size()).astype(int), 0,
                                    np.asarray(grid.resolution) - 1))
                flat = int(np.ravel_multi_index(idx, grid.resolution))
                if grid.states[flat] == OUTSIDE:
                    assert flat in members
                checks += 1
    return checks
