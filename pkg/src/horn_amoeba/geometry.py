"""Integer cones, lattice polytopes and fans in dimension at most 3.

Everything here is exact: vectors are tuples of ints or Fractions and all
predicates are decided with rational arithmetic.  The only sampled step is
the completeness test of a fan, which shoots pseudo-random integer rays
and checks exact membership.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

MAX_DIM = 3


class GeometryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small exact linear algebra


def _frac_rows(rows) -> list:
    return [[Fraction(v) for v in r] for r in rows]


def rref(rows, ncols: int | None = None):
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    M = _frac_rows(rows)
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows) -> int:
    rows = [r for r in rows]
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, n: int) -> list:
    """Basis of {v : <r, v> = 0 for all rows}, as primitive integer vectors."""
    if not rows:
        return [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    R, piv = rref(rows, n)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[f]
        basis.append(primitive(v))
    return basis


def solve(A, b) -> list:
    """Unique solution of the square system ``A x = b`` over Q."""
    n = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(A, b)]
    R, piv = rref(aug, n)
    if piv != list(range(n)):
        raise GeometryError("singular linear system")
    return [R[i][n] for i in range(n)]


def primitive(v) -> tuple:
    """Scale a rational vector to the primitive integer vector with the same direction."""
    v = [Fraction(x) for x in v]
    if not any(v):
        return tuple(0 for _ in v)
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in v))
    ints = [int(x * lcm) for x in v]
    g = reduce(math.gcd, (abs(x) for x in ints))
    return tuple(x // g for x in ints)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _canonical_lineality(basis: list, n: int) -> list:
    if not basis:
        return []
    R, _ = rref(basis, n)
    return [primitive(r) for r in R]


# ---------------------------------------------------------------------------
# cones


def _extreme_rays(H: list, eqs: list, n: int) -> list:
    # rays of the pointed cone {v : h.v >= 0 (h in H), e.v = 0 (e in eqs)}
    k = n - 1 - rank(eqs) if eqs else n - 1
    rays = set()
    if k < 0:
        return []
    cands = list(dict.fromkeys(primitive(h) for h in H if any(h)))
    for sub in itertools.combinations(cands, k):
        ns = nullspace(list(sub) + list(eqs), n)
        if len(ns) != 1:
            continue
        for v in (ns[0], tuple(-x for x in ns[0])):
            if all(dot(h, v) >= 0 for h in H):
                rays.add(v)
    return sorted(rays)


class IntCone:
    """Polyhedral cone with generator and halfspace representations.

    ``generators`` are primitive integer vectors: extreme rays of the pointed
    part followed by a lineality basis and its negatives.  ``halfspaces`` are
    primitive integer normals ``h`` with the cone equal to ``{v : h.v >= 0}``.
    """

    def __init__(self, nvars: int, generators: list, halfspaces: list, lineality: list):
        self.nvars = nvars
        self.rays = list(generators)
        self.lineality = list(lineality)
        self.halfspaces = list(halfspaces)

    # constructors
    @classmethod
    def from_halfspaces(cls, H: Iterable, nvars: int) -> "IntCone":
        if nvars > MAX_DIM:
            raise GeometryError(f"dimension {nvars} exceeds the supported maximum {MAX_DIM}")
        H = [primitive(h) for h in H]
        H = [h for h in H if any(h)]
        lin = _canonical_lineality(nullspace(H, nvars), nvars)
        rays = _extreme_rays(H, lin, nvars)
        gens = rays + lin + [tuple(-x for x in l) for l in lin]
        # irredundant halfspaces: compute from the generators
        Hc = _extreme_rays(gens, _canonical_lineality(nullspace(gens, nvars), nvars), nvars) if gens else []
        hlin = _canonical_lineality(nullspace(gens, nvars), nvars) if gens else [
            tuple(1 if j == i else 0 for j in range(nvars)) for i in range(nvars)]
        halfspaces = Hc + hlin + [tuple(-x for x in l) for l in hlin]
        return cls(nvars, rays, halfspaces, lin)

    @classmethod
    def from_generators(cls, G: Iterable, nvars: int) -> "IntCone":
        G = [primitive(g) for g in G]
        G = [g for g in G if any(g)]
        if not G:
            return cls.zero(nvars)
        # halfspaces of cone(G) are the generators of its dual
        dual = cls.from_halfspaces(G, nvars)
        return cls.from_halfspaces(dual.generators, nvars)

    @classmethod
    def zero(cls, nvars: int) -> "IntCone":
        return cls.from_halfspaces(
            [tuple(s if j == i else 0 for j in range(nvars)) for i in range(nvars) for s in (1, -1)], nvars)

    @classmethod
    def orthant(cls, signs: Sequence[int]) -> "IntCone":
        n = len(signs)
        return cls.from_halfspaces([tuple(signs[i] if j == i else 0 for j in range(n)) for i in range(n)], n)

    @property
    def generators(self) -> list:
        return self.rays + self.lineality + [tuple(-x for x in l) for l in self.lineality]

    # predicates
    def contains(self, v) -> bool:
        return all(dot(h, v) >= 0 for h in self.halfspaces)

    def contains_cone(self, other: "IntCone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, IntCone):
            return NotImplemented
        return self.nvars == other.nvars and self.contains_cone(other) and other.contains_cone(self)

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.rays)), len(self.lineality)))

    def dim(self) -> int:
        return rank(self.generators) if self.generators else 0

    def is_full_dimensional(self) -> bool:
        return self.dim() == self.nvars

    def is_strongly_convex(self) -> bool:
        return not self.lineality

    def is_simplicial(self) -> bool:
        return self.is_strongly_convex() and len(self.rays) == self.dim()

    def is_zero(self) -> bool:
        return not self.generators

    def intersection(self, other: "IntCone") -> "IntCone":
        return IntCone.from_halfspaces(self.halfspaces + other.halfspaces, self.nvars)

    def negate(self) -> "IntCone":
        return IntCone.from_halfspaces([tuple(-x for x in h) for h in self.halfspaces], self.nvars)

    def face_containing(self, sub: "IntCone") -> "IntCone":
        """Smallest face of ``self`` containing the subcone ``sub``."""
        gens = sub.generators
        tight = [h for h in self.halfspaces if all(dot(h, g) == 0 for g in gens)]
        return IntCone.from_halfspaces(self.halfspaces + [tuple(-x for x in h) for h in tight], self.nvars)

    def is_face(self, sub: "IntCone") -> bool:
        return self.contains_cone(sub) and self.face_containing(sub) == sub

    def interior_point(self) -> tuple:
        """An integer point in the relative interior (sum of all generators)."""
        gens = self.generators
        if not gens:
            return (0,) * self.nvars
        return tuple(sum(g[i] for g in gens) for i in range(self.nvars))

    def to_json(self) -> dict:
        return {"generators": [list(g) for g in self.generators],
                "halfspaces": [list(h) for h in self.halfspaces]}

    def __repr__(self):
        lin = f", lineality={self.lineality}" if self.lineality else ""
        return f"IntCone(rays={self.rays}{lin})"


def dual_cone(C: IntCone) -> IntCone:
    """``C^dual = {v : <u, v> >= 0 for all u in C}``."""
    return IntCone.from_halfspaces(C.generators, C.nvars)


def fourier_motzkin_feasible(rows: list) -> bool:
    """Decide whether ``{s : <a, s> >= b}`` is nonempty over Q; rows are (a, b)."""
    rows = [([Fraction(x) for x in a], Fraction(b)) for a, b in rows]
    if not rows:
        return True
    n = len(rows[0][0])
    for k in range(n):
        pos, neg, zero = [], [], []
        for a, b in rows:
            (pos if a[k] > 0 else neg if a[k] < 0 else zero).append((a, b))
        new = list(zero)
        for ap, bp in pos:
            for an, bn in neg:
                lp, ln = -an[k], ap[k]
                new.append(([lp * x + ln * y for x, y in zip(ap, an)], lp * bp + ln * bn))
        rows = new
    return all(b <= 0 for _, b in rows)


def recession_cone(halfspaces: Iterable) -> IntCone:
    """Recession cone of ``{s : <a, s> (>=|<=) b}``.

    Each constraint is ``(a, b, sense)`` with sense ``">="`` or ``"<="``.
    Raises :class:`GeometryError` for an empty polyhedron.
    """
    rows = []
    for a, b, sense in halfspaces:
        if sense in (">=", "ge"):
            rows.append((tuple(a), Fraction(b)))
        elif sense in ("<=", "le"):
            rows.append((tuple(-x for x in a), -Fraction(b)))
        else:
            raise ValueError(f"unknown sense {sense!r}")
    if not rows:
        raise GeometryError("no constraints given")
    n = len(rows[0][0])
    if not fourier_motzkin_feasible(rows):
        raise GeometryError("empty polyhedron")
    return IntCone.from_halfspaces([a for a, _ in rows], n)


# ---------------------------------------------------------------------------
# polytopes


def _hull_2d(points: list) -> list:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]  # counterclockwise


def _facets_3d(points: list) -> list:
    """Facets of a full-dimensional 3-d hull as (outer normal, offset)."""
    P = np.array(points, dtype=np.int64)
    centroid = [Fraction(int(c), len(points)) for c in P.sum(axis=0)]
    facets = {}
    m = len(points)
    # restrict the triples to points that can be vertices: extreme in some direction
    for i, j, k in itertools.combinations(range(m), 3):
        a, b, c = P[i], P[j], P[k]
        nrm = np.cross(b - a, c - a)
        if not nrm.any():
            continue
        vals = P @ nrm
        off = int(vals[i])
        if (vals <= off).all():
            key = primitive(nrm)
        elif (vals >= off).all():
            key = primitive(-nrm)
        else:
            continue
        if key not in facets:
            facets[key] = dot(key, points[i])
    # sanity: centroid strictly inside every facet
    for nrm, off in facets.items():
        assert dot(nrm, centroid) < off
    return sorted(facets.items())


def _order_facet_polygon(verts: list, normal) -> list:
    # counterclockwise around the outward normal, using exact angular sort in a projection
    c = [Fraction(sum(v[i] for v in verts), len(verts)) for i in range(3)]
    drop = max(range(3), key=lambda i: abs(normal[i]))
    keep = [i for i in range(3) if i != drop]
    pts2 = [(v[keep[0]] - c[keep[0]], v[keep[1]] - c[keep[1]]) for v in verts]
    ang = [math.atan2(float(p[1]), float(p[0])) for p in pts2]
    order = sorted(range(len(verts)), key=lambda i: ang[i])
    return [verts[i] for i in order]


@dataclass
class LatticePolytope:
    nvars: int
    vertices: list
    points: list = field(default_factory=list)
    dim: int = 0
    facets: list = field(default_factory=list)  # (outer normal, offset), only when full dimensional

    def is_full_dimensional(self) -> bool:
        return self.dim == self.nvars

    def contains(self, q) -> bool:
        if self.is_full_dimensional():
            return all(dot(nrm, q) <= off for nrm, off in self.facets)
        return _in_hull_lowdim(self, q)

    def lattice_points(self) -> list:
        lo = [min(v[i] for v in self.vertices) for i in range(self.nvars)]
        hi = [max(v[i] for v in self.vertices) for i in range(self.nvars)]
        return [q for q in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]) if self.contains(q)]

    def volume(self) -> Fraction:
        """Euclidean volume in the ambient dimension (zero unless full dimensional)."""
        if not self.is_full_dimensional():
            return Fraction(0)
        if self.nvars == 1:
            return Fraction(max(v[0] for v in self.vertices) - min(v[0] for v in self.vertices))
        if self.nvars == 2:
            vs = _hull_2d(self.vertices)
            s = sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1]
                    for i in range(len(vs)))
            return Fraction(abs(s), 2)
        return _volume_3d(self.vertices, self.facets)

    def vertex_set(self) -> set:
        return set(self.vertices)

    def to_json(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices], "dim": self.dim}


def _in_hull_lowdim(P: LatticePolytope, q) -> bool:
    sub = polytope_from_points(list(P.vertices) + [tuple(q)])
    return sub.dim == P.dim and set(sub.vertices) == set(P.vertices)


def _volume_3d(vertices, facets) -> Fraction:
    v0 = vertices[0]
    total = Fraction(0)
    for nrm, off in facets:
        fv = [v for v in vertices if dot(nrm, v) == off]
        if v0 in fv:
            continue
        poly = _order_facet_polygon(fv, nrm)
        for a, b in zip(poly[1:-1], poly[2:]):
            p = poly[0]
            m = [[p[i] - v0[i] for i in range(3)], [a[i] - v0[i] for i in range(3)],
                 [b[i] - v0[i] for i in range(3)]]
            det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                   - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                   + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            total += Fraction(abs(det), 6)
    return total


def polytope_from_points(points: Iterable) -> LatticePolytope:
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if not pts:
        raise GeometryError("empty point set")
    n = len(pts[0])
    if n > MAX_DIM:
        raise GeometryError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    p0 = pts[0]
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]
    d = rank(diffs) if diffs else 0
    if d == 0:
        return LatticePolytope(n, [p0], pts, 0, [])
    if d == n:
        if n == 1:
            verts = sorted({pts[0], pts[-1]})
            facets = [((1,), pts[-1][0]), ((-1,), -pts[0][0])]
        elif n == 2:
            hull = _hull_2d(pts)
            verts = sorted(hull)
            facets = []
            for i in range(len(hull)):
                a, b = hull[i], hull[(i + 1) % len(hull)]
                nrm = primitive((b[1] - a[1], a[0] - b[0]))
                facets.append((nrm, dot(nrm, a)))
            facets.sort()
        else:
            facets = _facets_3d(pts)
            verts = []
            for p in pts:
                tight = [nrm for nrm, off in facets if dot(nrm, p) == off]
                if len(tight) >= 3 and rank(tight) == 3:
                    verts.append(p)
        return LatticePolytope(n, sorted(verts), pts, n, facets)
    # lower dimensional: project injectively onto d coordinates
    for coords in itertools.combinations(range(n), d):
        proj = [tuple(v[i] for i in coords) for v in diffs]
        if rank(proj) == d:
            break
    sub = polytope_from_points([tuple(p[i] for i in coords) for p in pts])
    back = {tuple(p[i] for i in coords): p for p in pts}
    verts = sorted(back[v] for v in sub.vertices)
    return LatticePolytope(n, verts, pts, d, [])


def newton_polytope(f) -> LatticePolytope:
    """Convex hull of the exponent vectors of a nonzero Laurent polynomial."""
    if f.is_zero():
        raise GeometryError("the zero polynomial has no Newton polytope")
    return polytope_from_points(f.support())


def minkowski_sum(P: LatticePolytope, Q: LatticePolytope) -> LatticePolytope:
    return polytope_from_points([tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices])


# ---------------------------------------------------------------------------
# fans


@dataclass
class Fan:
    nvars: int
    maximal_cones: list
    labels: list = field(default_factory=list)

    def rays(self) -> set:
        return {r for c in self.maximal_cones for r in c.rays}

    def to_json(self) -> dict:
        return {"nvars": self.nvars,
                "cones": [dict(c.to_json(), label=_jsonable(l))
                          for c, l in itertools.zip_longest(self.maximal_cones, self.labels)]}


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


def normal_fan(P: LatticePolytope) -> Fan:
    """Outer normal fan: the cone at vertex v is ``{u : <u, v> >= <u, w> for w in P}``."""
    if not P.is_full_dimensional():
        raise GeometryError(
            f"normal fan needs a full-dimensional polytope (dimension {P.dim} in ambient {P.nvars})")
    cones = []
    for v in P.vertices:
        H = [tuple(a - b for a, b in zip(v, w)) for w in P.vertices if w != v]
        cones.append(IntCone.from_halfspaces(H, P.nvars))
    return Fan(P.nvars, cones, list(P.vertices))


@dataclass
class FanVerdict:
    is_fan: bool
    complete: bool
    overlaps: list = field(default_factory=list)  # index pairs with bad intersections
    uncovered: tuple | None = None
    message: str = ""

    @property
    def verdict(self) -> str:
        return "complete fan" if self.is_fan and self.complete else (
            "fan (not complete)" if self.is_fan else "not a fan")

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "overlaps": [list(p) for p in self.overlaps],
                "uncovered": list(self.uncovered) if self.uncovered else None, "message": self.message}


def fan_check(cones: Sequence[IntCone], samples: int = 10_000, seed: int = 0) -> FanVerdict:
    """Decide whether full-dimensional strongly convex cones form a complete fan.

    Pairwise intersections must be faces of both cones (exact); completeness
    is checked on ``samples`` pseudo-random integer directions.
    """
    if not cones:
        raise GeometryError("no cones given")
    n = cones[0].nvars
    for i, c in enumerate(cones):
        if not c.is_full_dimensional():
            raise GeometryError(f"cone {i} is not full dimensional")
        if not c.is_strongly_convex():
            raise GeometryError(f"cone {i} is not strongly convex; maximal cones of a fan must be pointed")
    overlaps = []
    for i, j in itertools.combinations(range(len(cones)), 2):
        inter = cones[i].intersection(cones[j])
        if not (cones[i].is_face(inter) and cones[j].is_face(inter)):
            overlaps.append((i, j))
    rng = np.random.default_rng(seed)
    dirs = rng.integers(-1000, 1001, size=(samples, n))
    covered = np.zeros(samples, dtype=bool)
    for c in cones:
        H = np.array(c.halfspaces, dtype=np.int64)
        covered |= ((dirs @ H.T) >= 0).all(axis=1)
    uncovered = None
    if not covered.all():
        uncovered = tuple(int(x) for x in dirs[np.argmin(covered)])
    is_fan = not overlaps
    msg = ""
    if overlaps:
        msg = f"cones {overlaps[0][0]} and {overlaps[0][1]} meet outside a common face"
    elif uncovered is not None:
        msg = f"direction {uncovered} is not covered"
    return FanVerdict(is_fan, uncovered is None, overlaps, uncovered, msg)


def fans_equal(a: Sequence[IntCone], b: Sequence[IntCone]) -> bool:
    """Equality of cone collections as sets."""
    if len(a) != len(b):
        return False
    unused = list(b)
    for c in a:
        match = next((k for k, d in enumerate(unused) if d == c), None)
        if match is None:
            return False
        unused.pop(match)
    return True
