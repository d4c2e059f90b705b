"""Amoeba membership, complement components, Ronkin pieces and spines.

Membership of a point ``t`` is decided in layers:

1. lopsidedness: one term dominates the sum of all the others on the torus
   ``|x| = e^t``, which certifies that ``t`` lies in the complement;
2. root counting on fibers: for each coordinate ``j`` and sampled angles of
   the remaining coordinates, the roots of ``f`` as a polynomial in ``x_j``
   are computed.  A root on the circle ``|x_j| = e^{t_j}`` (up to a tolerance
   in log scale) is an explicit amoeba point.  When the number of roots inside
   the circle changes between two fibers, bisection along the fiber path
   locates a torus zero.  Otherwise the counts give the order
   ``nu_j = (lowest power of x_j) + (roots inside)``, which equals the
   winding number of ``f`` along the circle;
3. anything else is reported as unknown.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .algebra import MultiPoly
from .geometry import IntCone, newton_polytope, nullspace, polytope_from_points, rank, solve

UNKNOWN, INSIDE, OUTSIDE = 0, 1, 2
STATE_NAMES = {UNKNOWN: "UNKNOWN", INSIDE: "INSIDE", OUTSIDE: "OUTSIDE"}


class AmoebaError(ValueError):
    pass


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HORN_AMOEBA_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# numeric form of a polynomial


class _NumPoly:
    def __init__(self, f: MultiPoly):
        if f.is_zero():
            raise AmoebaError("the zero polynomial has no amoeba")
        self.n = f.nvars
        items = f.items()
        self.exps = np.array([e for e, _ in items], dtype=np.int64)
        self.coeffs = np.array([float(c) for _, c in items], dtype=float)
        self.logabs = np.log(np.abs(self.coeffs))
        self.vertices = np.array(newton_polytope(f).vertices, dtype=np.int64)

    def lopsided(self, T: np.ndarray):
        """(mask, index of dominant term) for points T (rows)."""
        L = self.logabs[None, :] + T @ self.exps.T
        k = np.argmax(L, axis=1)
        top = L[np.arange(len(T)), k]
        rest = np.exp(L - top[:, None]).sum(axis=1) - 1.0
        return rest < 1.0 - 1e-12, k

    def fiber_polys(self, T: np.ndarray, angles: np.ndarray, j: int):
        """Coefficients in ``u = x_j e^{-t_j}`` (lowest power removed), highest first.

        T: (M, n) points; angles: (F, n) shared or (M, F, n) per point fiber
        angles (entry j ignored).
        Returns (coefficient array (M, F, d+1), lowest power of x_j).
        """
        ej = self.exps[:, j]
        lo = int(ej.min())
        d = int(ej.max()) - lo
        other = [k for k in range(self.n) if k != j]
        # log modulus and phase of each term on the fiber, x_j factor scaled to the unit circle
        logmod = self.logabs[None, :] + T @ self.exps.T                 # (M, terms)
        mask = np.array([k in other for k in range(self.n)], dtype=float)
        phase = (angles * mask) @ self.exps.T.astype(float)     # (..., F, terms)
        rot = np.exp(1j * phase) * np.sign(self.coeffs)
        scale = logmod.max(axis=1, keepdims=True)
        mod = np.exp(logmod - scale)
        if rot.ndim == 2:
            vals = mod[:, None, :] * rot[None, :, :]
        else:
            vals = mod[:, None, :] * rot
        place = np.zeros((len(self.coeffs), d + 1))
        place[np.arange(len(self.coeffs)), d - (ej - lo)] = 1.0
        return vals @ place, lo


def _roots_batch(coeffs: np.ndarray) -> np.ndarray:
    """Roots of many polynomials (last axis: coefficients, highest first).

    Leading coefficients below 1e-13 of the largest are trimmed; the roots
    they would carry have modulus far above 1 and are returned as inf.
    """
    shape = coeffs.shape[:-1]
    d = coeffs.shape[-1] - 1
    if d == 0:
        return np.zeros(shape + (0,), dtype=complex)
    C = coeffs.reshape(-1, d + 1)
    norm = np.abs(C).max(axis=1, keepdims=True)
    small = np.abs(C) < 1e-13 * norm
    drop = np.minimum(np.cumprod(small, axis=1).sum(axis=1), d)
    roots = np.full((len(C), d), np.inf, dtype=complex)
    for k in np.unique(drop):
        rows = np.nonzero(drop == k)[0]
        m = d - k
        if m == 0:
            continue
        sub = C[rows, k:]
        comp = np.zeros((len(rows), m, m), dtype=complex)
        comp[:, 0, :] = -sub[:, 1:] / sub[:, :1]
        if m > 1:
            idx = np.arange(m - 1)
            comp[:, idx + 1, idx] = 1.0
        roots[rows, :m] = np.linalg.eigvals(comp)
    return roots.reshape(shape + (d,))


def _fiber_angles(n: int, F: int, rng: np.random.Generator) -> np.ndarray:
    """(F, n) fiber angles.

    The real sign patterns (angles 0 and pi) come first since near-singular
    torus zero sets of real polynomials cluster there; the rest is an evenly
    spaced sweep in 2-D and a Kronecker sequence with random offset in 3-D.
    """
    ang = np.zeros((F, n))
    if n == 1:
        return ang
    if n == 2:
        base = np.arange(F) / F * 2 * np.pi
        order = np.argsort(np.minimum(base % np.pi, np.pi - base % np.pi), kind="stable")
        ang[:, :] = base[order][:, None]
        return ang
    signs = np.array(list(itertools.product((0.0, np.pi), repeat=n)))
    alphas = np.array([math.sqrt(p) % 1.0 for p in (2, 3, 5, 7, 11)])[:n]
    off = rng.uniform(0, 1, size=n)
    rest = 2 * np.pi * ((np.arange(1, F + 1)[:, None] * alphas[None, :] + off[None, :]) % 1.0)
    ang[:] = np.concatenate([signs, rest])[:F]
    return ang


@dataclass
class Membership:
    state: int
    order: tuple | None = None
    witness: tuple | None = None     # complex point on the torus with f ~ 0
    certified: bool = False
    how: str = ""

    @property
    def name(self) -> str:
        return STATE_NAMES[self.state]

    def to_json(self) -> dict:
        out = {"state": self.name, "how": self.how, "certified": self.certified}
        if self.order is not None:
            out["order"] = list(self.order)
        if self.witness is not None:
            out["witness"] = [[w.real, w.imag] for w in self.witness]
        return out


def _classify(npoly: _NumPoly, T: np.ndarray, n_angle: int, tol: float, seed: int,
              bisect: bool = True, refine: int = 16) -> tuple:
    """Classify many points; returns (states, orders, witnesses dict, how list).

    Root-count orders that are not Newton vertices are re-checked with
    ``refine`` times as many fibers, since a small torus zero set can slip
    between sampled fibers.
    """
    M, n = T.shape
    states = np.full(M, UNKNOWN, dtype=np.int8)
    orders = np.zeros((M, n), dtype=np.int64)
    how = np.array([""] * M, dtype=object)
    witnesses = {}
    lop, k = npoly.lopsided(T)
    states[lop] = OUTSIDE
    orders[lop] = npoly.exps[k[lop]]
    how[lop] = "lopsided"
    todo = np.nonzero(~lop)[0]
    if len(todo) == 0:
        return states, orders, witnesses, how
    rng = np.random.default_rng(seed)
    base = _fiber_angles(n, n_angle, rng)
    consistent = np.ones(len(todo), dtype=bool)
    inside = np.zeros(len(todo), dtype=bool)
    ords = np.zeros((len(todo), n), dtype=np.int64)
    split_axis = np.full(len(todo), -1)
    split_fiber = np.zeros(len(todo), dtype=np.int64)
    Tt = T[todo]
    for j in range(n):
        act = np.nonzero(consistent & ~inside)[0]
        if len(act) == 0:
            break
        coeffs, lo = npoly.fiber_polys(Tt[act], base, j)
        d = coeffs.shape[-1] - 1
        # Rouche: a coefficient dominating all others on |u| = 1 fixes the count
        mag = np.abs(coeffs)
        top = mag.argmax(axis=2)
        big = np.take_along_axis(mag, top[:, :, None], axis=2)[:, :, 0]
        dom = big > 1.000001 * (mag.sum(axis=2) - big)
        cnt = d - top
        near = np.zeros(cnt.shape, dtype=bool)
        roots = np.zeros(cnt.shape + (d,), dtype=complex)
        logm = np.zeros(cnt.shape + (d,))
        if (~dom).any():
            roots[~dom] = _roots_batch(coeffs[~dom])
            logm[~dom] = np.log(np.abs(roots[~dom]) + 1e-300)
            near[~dom] = (np.abs(logm[~dom]) < tol).any(axis=1)
            cnt[~dom] = (logm[~dom] < 0).sum(axis=1)
        hit = near.any(axis=1)
        for r in np.nonzero(hit)[0]:
            fidx = int(np.argmax(near[r]))
            ridx = int(np.argmin(np.abs(logm[r, fidx])))
            witnesses[int(todo[act[r]])] = _witness_point(Tt[act[r]], base[fidx], j, roots[r, fidx, ridx])
        inside[act[hit]] = True
        differs = cnt != cnt[:, :1]
        same = ~differs.any(axis=1)
        split_axis[act[~same]] = j
        split_fiber[act[~same]] = np.argmax(differs[~same], axis=1)
        consistent[act[~same]] = False
        ords[act, j] = lo + cnt[:, 0]
    res_inside = inside.copy()
    unresolved = ~inside & ~consistent
    if bisect and unresolved.any():
        for j in range(n):
            rows = np.nonzero(unresolved & (split_axis == j))[0]
            if len(rows) == 0:
                continue
            found, pts = _bisect_zeros(npoly, Tt[rows], base[0], base[split_fiber[rows]], j, tol)
            for r, ok_r, w in zip(rows, found, pts):
                if ok_r:
                    res_inside[r] = True
                    witnesses[int(todo[r])] = w
    ok = ~res_inside & consistent
    states[todo[res_inside]] = INSIDE
    how[todo[res_inside]] = "torus zero"
    states[todo[ok]] = OUTSIDE
    orders[todo[ok]] = ords[ok]
    how[todo[ok]] = "root count"
    if refine > 1:
        is_vertex = (orders[:, None, :] == npoly.vertices[None, :, :]).all(axis=2).any(axis=1)
        again = np.nonzero((how == "root count") & ~is_vertex)[0]
        if len(again):
            st2, od2, w2, how2 = _classify(npoly, T[again], n_angle * refine, tol, seed, bisect, 1)
            states[again], orders[again], how[again] = st2, od2, how2
            for k2, w in w2.items():
                witnesses[int(again[k2])] = w
    return states, orders, witnesses, how


def _witness_point(t, angles, j, u) -> tuple:
    n = len(t)
    x = [complex(math.exp(t[k]) * np.exp(1j * angles[k])) for k in range(n)]
    x[j] = complex(u * math.exp(t[j]))
    return tuple(x)


def _bisect_zeros(npoly: _NumPoly, T: np.ndarray, a: np.ndarray, b: np.ndarray, j: int, tol: float,
                  iters: int = 48):
    """Lockstep bisection between fibers ``a`` (shared) and ``b`` (per row) whose root counts differ.

    Returns (found mask, witness points).
    """
    R = len(T)
    a = np.broadcast_to(a, b.shape).copy()
    b = b.copy()

    def count(angles):
        c, _ = npoly.fiber_polys(T, angles[:, None, :], j)
        r = _roots_batch(c)[:, 0, :]
        return r, (np.log(np.abs(r) + 1e-300) < 0).sum(axis=1)

    _, ca = count(a)
    for _ in range(iters):
        mid = (a + b) / 2
        _, cm = count(mid)
        keep = cm == ca
        a[keep] = mid[keep]
        b[~keep] = mid[~keep]
    roots, _ = count(a)
    lm = np.abs(np.log(np.abs(roots) + 1e-300))
    found = np.zeros(R, dtype=bool)
    pts = [None] * R
    if roots.shape[1] == 0:
        return found, pts
    k = np.argmin(lm, axis=1)
    for r in range(R):
        if lm[r, k[r]] < max(tol, 1e-6):
            found[r] = True
            pts[r] = _witness_point(T[r], a[r], j, roots[r, k[r]])
    return found, pts


def membership(f: MultiPoly, t: Sequence[float], n_angle: int = 64, tol: float = 1e-3,
               seed: int = 0) -> Membership:
    """Layered amoeba membership test at ``t``."""
    npoly = _NumPoly(f)
    T = np.array([t], dtype=float)
    if T.shape[1] != f.nvars:
        raise AmoebaError(f"point has {T.shape[1]} coordinates, polynomial has {f.nvars} variables")
    states, orders, wit, how = _classify(npoly, T, n_angle, tol, seed)
    st = int(states[0])
    if st == OUTSIDE:
        order = tuple(int(v) for v in orders[0])
        if how[0] != "lopsided" and not newton_polytope(f).contains(order):
            return Membership(UNKNOWN, how="order outside the Newton polytope")
        return Membership(OUTSIDE, order, None, how[0] == "lopsided", how[0])
    if st == INSIDE:
        return Membership(INSIDE, None, wit.get(0), True, "torus zero")
    return Membership(UNKNOWN, how="inconsistent fibers without a located zero")


def order_map(f: MultiPoly, t: Sequence[float], n_circle: int = 512, n_fiber: int = 5, seed: int = 0) -> tuple:
    """Winding numbers of ``x_j -> f(x)`` along ``|x_j| = e^{t_j}`` by argument tracking."""
    n = f.nvars
    t = np.asarray(t, dtype=float)
    rng = np.random.default_rng(seed)
    npoly = _NumPoly(f)
    theta = np.linspace(0, 2 * np.pi, n_circle, endpoint=False)
    result = []
    scale = (npoly.logabs[None, :] + t[None, :] @ npoly.exps.T).max()
    for j in range(n):
        vals = set()
        for _ in range(n_fiber):
            ang = rng.uniform(0, 2 * np.pi, size=n)
            A = np.tile(ang, (n_circle, 1))
            A[:, j] = theta
            phase = A @ npoly.exps.T
            mod = npoly.logabs[None, :] + (t @ npoly.exps.T)[None, :] - scale
            z = (np.sign(npoly.coeffs)[None, :] * np.exp(mod + 1j * phase)).sum(axis=1)
            if (np.abs(z) == 0).any():
                raise AmoebaError("point likely inside or too close to the amoeba")
            arg = np.angle(z)
            steps = np.diff(np.concatenate([arg, arg[:1]]))
            steps = (steps + np.pi) % (2 * np.pi) - np.pi
            if np.abs(steps).max() > np.pi / 2:
                raise AmoebaError("point likely inside or too close to the amoeba (argument jumps)")
            w = steps.sum() / (2 * np.pi)
            if abs(w - round(w)) > 1e-6:
                raise AmoebaError("non-integral winding: point likely inside or too close to the amoeba")
            vals.add(int(round(w)))
        if len(vals) != 1:
            raise AmoebaError("winding numbers disagree across fibers: point likely inside or too close to the amoeba")
        result.append(vals.pop())
    return tuple(result)


# ---------------------------------------------------------------------------
# grid census


@dataclass
class AmoebaGrid:
    nvars: int
    lo: tuple
    hi: tuple
    resolution: tuple
    states: np.ndarray          # flat, C order over the grid
    orders: np.ndarray          # (cells, n)

    def centers(self) -> np.ndarray:
        axes = [self.lo[k] + (np.arange(self.resolution[k]) + 0.5) * (self.hi[k] - self.lo[k]) / self.resolution[k]
                for k in range(self.nvars)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.nvars)

    def cell_size(self) -> np.ndarray:
        return np.array([(self.hi[k] - self.lo[k]) / self.resolution[k] for k in range(self.nvars)])

    def unknown_fraction(self) -> float:
        return float((self.states == UNKNOWN).mean())

    def to_csv(self) -> str:
        C = self.centers()
        head = ",".join([f"t{k + 1}" for k in range(self.nvars)] + ["state"] +
                        [f"nu{k + 1}" for k in range(self.nvars)])
        lines = [head]
        for c, s, o in zip(C, self.states, self.orders):
            ords = [str(int(v)) for v in o] if s == OUTSIDE else [""] * self.nvars
            lines.append(",".join([f"{v:.6f}" for v in c] + [STATE_NAMES[int(s)]] + ords))
        return "\n".join(lines) + "\n"


@dataclass
class Component:
    order: tuple
    cells: int
    representative: tuple
    pieces: int
    cell_indices: np.ndarray = field(repr=False, default=None)


@dataclass
class Census:
    grid: AmoebaGrid
    components: list
    vertices: list
    solid: bool | None
    verdict: str
    unknown_fraction: float
    inside_cells: int

    def orders(self) -> set:
        return {c.order for c in self.components}

    def to_json(self) -> dict:
        return {
            "components": [{"order": list(c.order), "cells": c.cells,
                            "representative": [round(v, 6) for v in c.representative], "pieces": c.pieces}
                           for c in self.components],
            "count": len(self.components),
            "newton_vertices": [list(v) for v in self.vertices],
            "solid": self.solid,
            "verdict": self.verdict,
            "unknown_fraction": self.unknown_fraction,
            "inside_cells": self.inside_cells,
            "grid": {"lo": list(self.grid.lo), "hi": list(self.grid.hi), "resolution": list(self.grid.resolution)},
        }


def default_radius(f: MultiPoly) -> float:
    """Twice the largest absolute log-ratio of coefficient magnitudes (at least 4)."""
    logs = [math.log(abs(float(c))) for _, c in f.items()]
    spread = max(logs) - min(logs) if logs else 0.0
    return max(4.0, 2.0 * spread)


def classify_grid(f: MultiPoly, lo, hi, resolution, n_angle: int = 64, tol: float = 1e-3,
                  seed: int = 0, chunk: int = 2048) -> AmoebaGrid:
    n = f.nvars
    if n not in (2, 3):
        raise AmoebaError("grid census supports 2 or 3 variables")
    res = tuple(int(r) for r in (resolution if isinstance(resolution, (list, tuple)) else [resolution] * n))
    lo = tuple(float(v) for v in (lo if isinstance(lo, (list, tuple)) else [lo] * n))
    hi = tuple(float(v) for v in (hi if isinstance(hi, (list, tuple)) else [hi] * n))
    grid = AmoebaGrid(n, lo, hi, res, np.zeros(0, dtype=np.int8), np.zeros((0, n), dtype=np.int64))
    C = grid.centers()
    npoly = _NumPoly(f)
    starts = list(range(0, len(C), chunk))

    def work(k):
        s = starts[k]
        st, od, _, _ = _classify(npoly, C[s:s + chunk], n_angle, tol, seed)
        return st, od

    threads = _threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, range(len(starts))))
    else:
        parts = [work(k) for k in range(len(starts))]
    grid.states = np.concatenate([p[0] for p in parts])
    grid.orders = np.concatenate([p[1] for p in parts])
    return grid


def census_from_grid(f: MultiPoly, grid: AmoebaGrid, unknown_limit: float = 0.10) -> Census:
    n = grid.nvars
    res = grid.resolution
    M = len(grid.states)
    idx = np.arange(M).reshape(res)
    out = grid.states == OUTSIDE
    rows, cols = [], []
    for k in range(n):
        a = np.take(idx, range(res[k] - 1), axis=k).ravel()
        b = np.take(idx, range(1, res[k]), axis=k).ravel()
        ok = out[a] & out[b] & (grid.orders[a] == grid.orders[b]).all(axis=1)
        rows.append(a[ok])
        cols.append(b[ok])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    g = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(M, M))
    _, labels = connected_components(g, directed=False)
    centers = grid.centers()
    by_order: dict = {}
    for lab in np.unique(labels[out]):
        members = np.nonzero((labels == lab) & out)[0]
        order = tuple(int(v) for v in grid.orders[members[0]])
        by_order.setdefault(order, []).append(members)
    comps = []
    for order, pieces in sorted(by_order.items()):
        allm = np.concatenate(pieces)
        big = max(pieces, key=len)
        rep = centers[big[len(big) // 2]]
        comps.append(Component(order, int(len(allm)), tuple(float(v) for v in rep), len(pieces), allm))
    P = newton_polytope(f)
    verts = list(P.vertices)
    unk = grid.unknown_fraction()
    if unk > unknown_limit:
        return Census(grid, comps, verts, None, "inconclusive, refine resolution", unk,
                      int((grid.states == INSIDE).sum()))
    solid = len(comps) == len(verts) and all(c.order in set(verts) for c in comps)
    return Census(grid, comps, verts, solid, "solid" if solid else "not solid", unk,
                  int((grid.states == INSIDE).sum()))


def component_census(f: MultiPoly, lo=None, hi=None, resolution=None, n_angle: int = 64, tol: float = 1e-3,
                     seed: int = 0, unknown_limit: float = 0.10) -> Census:
    """Classify a grid and count complement components keyed by order."""
    n = f.nvars
    if resolution is None:
        resolution = 200 if n == 2 else 48
    if lo is None or hi is None:
        R = default_radius(f)
        lo, hi = -R, R
    if n == 1 or f.is_monomial():
        if f.is_monomial():
            order = f.support()[0]
            res = tuple([resolution] * n) if not isinstance(resolution, (list, tuple)) else tuple(resolution)
            lo_t = tuple([float(lo)] * n) if not isinstance(lo, (list, tuple)) else tuple(lo)
            hi_t = tuple([float(hi)] * n) if not isinstance(hi, (list, tuple)) else tuple(hi)
            cells = int(np.prod(res))
            grid = AmoebaGrid(n, lo_t, hi_t, res, np.full(cells, OUTSIDE, dtype=np.int8),
                              np.tile(np.array(order, dtype=np.int64), (cells, 1)))
            return census_from_grid(f, grid, unknown_limit)
    grid = classify_grid(f, lo, hi, resolution, n_angle, tol, seed)
    return census_from_grid(f, grid, unknown_limit)


# ---------------------------------------------------------------------------
# exact log constants


_LOG2, _LOG3 = math.log(2.0), math.log(3.0)


@dataclass(frozen=True)
class LogConstant:
    """``n2 log 2 + n3 log 3`` with rational n2, n3; ``approx`` set when not exact."""

    n2: Fraction = Fraction(0)
    n3: Fraction = Fraction(0)
    approx: float | None = None

    @property
    def exact(self) -> bool:
        return self.approx is None

    @classmethod
    def of_coefficient(cls, c) -> "LogConstant":
        """``log |c|``; exact when ``|c| = 2^a 3^b``."""
        c = abs(Fraction(c))
        if c == 0:
            raise AmoebaError("log of zero")
        exps = []
        for part in (c.numerator, c.denominator):
            a = b = 0
            while part % 2 == 0:
                part //= 2
                a += 1
            while part % 3 == 0:
                part //= 3
                b += 1
            exps.append((a, b, part))
        (a1, b1, r1), (a2, b2, r2) = exps
        if r1 == 1 and r2 == 1:
            return cls(Fraction(a1 - a2), Fraction(b1 - b2))
        return cls(Fraction(0), Fraction(0), math.log(float(c)))

    def value(self) -> float:
        return self.approx if self.approx is not None else float(self.n2) * _LOG2 + float(self.n3) * _LOG3

    def __add__(self, other: "LogConstant") -> "LogConstant":
        if self.exact and other.exact:
            return LogConstant(self.n2 + other.n2, self.n3 + other.n3)
        return LogConstant(approx=self.value() + other.value())

    def __neg__(self):
        return LogConstant(-self.n2, -self.n3) if self.exact else LogConstant(approx=-self.approx)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "LogConstant":
        k = Fraction(k)
        return LogConstant(self.n2 * k, self.n3 * k) if self.exact else LogConstant(approx=self.approx * float(k))

    def sign(self, tol: float = 1e-9) -> int:
        if not self.exact:
            v = self.approx
            return 0 if abs(v) <= tol else (1 if v > 0 else -1)
        # sign of a log 2 + b log 3 with a, b rational: compare 2^A and 3^(-B) over a common denominator
        D = self.n2.denominator * self.n3.denominator
        A, B = int(self.n2 * D), int(self.n3 * D)
        if A == 0 and B == 0:
            return 0
        if A >= 0 and B >= 0:
            return 1
        if A <= 0 and B <= 0:
            return -1
        lhs, rhs = (2 ** A, 3 ** (-B)) if A > 0 else (3 ** B, 2 ** (-A))
        s = 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return s

    def __eq__(self, other):
        if not isinstance(other, LogConstant):
            return NotImplemented
        return (self - other).sign() == 0

    def __hash__(self):
        return hash((self.n2, self.n3)) if self.exact else hash(round(self.approx, 9))

    def to_text(self) -> str:
        if not self.exact:
            return f"{self.approx:.12g}"
        parts = []
        for k, name in ((self.n2, "log2"), (self.n3, "log3")):
            if k:
                parts.append(name if k == 1 else f"-{name}" if k == -1 else f"{k}*{name}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def to_json(self):
        if self.exact:
            return {"log2": str(self.n2), "log3": str(self.n3), "value": self.value()}
        return {"approx": self.approx, "certified": False}


@dataclass
class RonkinPiece:
    nu: tuple
    const: LogConstant

    def evaluate(self, t) -> float:
        return self.const.value() + float(np.dot(self.nu, t))


def ronkin_pieces(f: MultiPoly, census: Census | None = None) -> tuple:
    """One affine piece ``log|c_nu| + <t, nu>`` per vertex component; returns (pieces, warnings)."""
    verts = newton_polytope(f).vertices
    if census is None:
        orders = list(verts)
    else:
        orders = [c.order for c in census.components]
    warnings = []
    pieces = []
    vset = set(verts)
    for nu in orders:
        if nu not in vset:
            warnings.append(f"component with order {nu} is not a vertex of the Newton polytope; excluded")
            continue
        pieces.append(RonkinPiece(tuple(nu), LogConstant.of_coefficient(f.coeff(nu))))
    pieces.sort(key=lambda p: p.nu)
    return pieces, warnings


# ---------------------------------------------------------------------------
# spine


@dataclass
class SpineVertex:
    point: tuple          # LogConstants
    value: LogConstant
    tie: tuple            # indices of pieces attaining the maximum


@dataclass
class Wall:
    pair: tuple
    vertices: list        # indices of spine vertices on the wall
    recession: IntCone


@dataclass
class DualCell:
    tie: tuple
    vertices: list
    simplicial: bool
    volume: Fraction


@dataclass
class SpineComplex:
    pieces: list
    vertices: list
    walls: list
    dual_cells: list
    certified: bool

    def anchor(self, w: "Wall") -> list:
        """A point of the wall (floating): a spine vertex if it has one."""
        if w.vertices:
            return [c.value() for c in self.vertices[w.vertices[0]].point]
        a, b = (self.pieces[k] for k in w.pair)
        g = np.array(a.nu, dtype=float) - np.array(b.nu, dtype=float)
        return list(g * (b.const.value() - a.const.value()) / float(g @ g))

    def to_json(self) -> dict:
        return {
            "pieces": [{"nu": list(p.nu), "const": p.const.to_text()} for p in self.pieces],
            "vertices": [{"t": [c.to_text() for c in v.point], "t_float": [c.value() for c in v.point],
                          "value": v.value.to_text(), "tie": [list(self.pieces[k].nu) for k in v.tie]}
                         for v in self.vertices],
            "walls": [{"pair": [list(self.pieces[k].nu) for k in w.pair], "vertices": w.vertices,
                       "recession": [list(g) for g in w.recession.generators],
                       "anchor": self.anchor(w)} for w in self.walls],
            "dual_cells": [{"vertices": [list(v) for v in c.vertices], "simplicial": c.simplicial,
                            "volume": str(c.volume)} for c in self.dual_cells],
            "certified": self.certified,
        }


def _lc_dot(nu, point) -> LogConstant:
    total = LogConstant()
    for a, c in zip(nu, point):
        if a:
            total = total + c.scale(a)
    return total


def spine(pieces: Sequence[RonkinPiece]) -> SpineComplex:
    """Non-smooth locus of ``t -> max_k (C_k + <nu_k, t>)`` and the dual subdivision."""
    pieces = list(pieces)
    if len(pieces) < 2:
        raise AmoebaError("a spine needs at least two pieces")
    n = len(pieces[0].nu)
    certified = all(p.const.exact for p in pieces)
    vertices: list = []
    seen = set()
    for sub in itertools.combinations(range(len(pieces)), n + 1):
        nus = [pieces[k].nu for k in sub]
        diffs = [tuple(a - b for a, b in zip(nu, nus[0])) for nu in nus[1:]]
        if rank(diffs) < n:
            continue
        # <nu_k - nu_0, t> = C_0 - C_k for k in sub
        A = diffs
        inv_cols = [solve(A, [1 if r == c else 0 for r in range(n)]) for c in range(n)]
        rhs = [pieces[sub[0]].const - pieces[k].const for k in sub[1:]]
        point = []
        for i in range(n):
            acc = LogConstant()
            for c in range(n):
                if inv_cols[c][i]:
                    acc = acc + rhs[c].scale(inv_cols[c][i])
            point.append(acc)
        value = pieces[sub[0]].const + _lc_dot(pieces[sub[0]].nu, point)
        tie = []
        ok = True
        for k, p in enumerate(pieces):
            s = (p.const + _lc_dot(p.nu, point) - value).sign()
            if s > 0:
                ok = False
                break
            if s == 0:
                tie.append(k)
        if not ok:
            continue
        key = tuple(tie)
        if key in seen:
            continue
        seen.add(key)
        vertices.append(SpineVertex(tuple(point), value, key))
    dual_cells = []
    for v in vertices:
        pts = [pieces[k].nu for k in v.tie]
        P = polytope_from_points(pts)
        dual_cells.append(DualCell(v.tie, sorted(P.vertices), len(P.vertices) == n + 1, P.volume()))
    walls = []
    edge_pairs = set()
    for cell in dual_cells:
        for a, b in _cell_edges(cell, pieces):
            edge_pairs.add((a, b))
    if not vertices:
        # no bounded features: every pair whose tie locus is nonempty is a wall
        for a, b in itertools.combinations(range(len(pieces)), 2):
            edge_pairs.add((a, b))
    for a, b in sorted(edge_pairs):
        na, nb = pieces[a].nu, pieces[b].nu
        H = [tuple(x - y for x, y in zip(na, nb)), tuple(y - x for x, y in zip(na, nb))]
        H += [tuple(x - y for x, y in zip(na, pieces[j].nu)) for j in range(len(pieces)) if j not in (a, b)]
        rec = IntCone.from_halfspaces(H, n)
        vids = [k for k, v in enumerate(vertices) if a in v.tie and b in v.tie]
        if vids or not rec.is_zero():
            walls.append(Wall((a, b), vids, rec))
    return SpineComplex(pieces, vertices, walls, dual_cells, certified)


def _cell_edges(cell: DualCell, pieces) -> list:
    """Index pairs of the tie set whose exponents span an edge of the dual cell."""
    idx = list(cell.tie)
    verts = set(cell.vertices)
    pts = [pieces[k].nu for k in idx]
    return [(a, b) for a, b in itertools.combinations(idx, 2)
            if pieces[a].nu in verts and pieces[b].nu in verts and _is_edge(pieces[a].nu, pieces[b].nu, pts)]


def _is_edge(p, q, pts) -> bool:
    """[p, q] is an edge of conv(pts) iff p projects to a vertex along q - p."""
    n = len(p)
    v = tuple(b - a for a, b in zip(p, q))
    basis = nullspace([v], n)
    if not basis:
        return True
    proj = lambda x: tuple(sum(w[i] * x[i] for i in range(n)) for w in basis)
    P = polytope_from_points([proj(x) for x in pts])
    return proj(p) in set(P.vertices)
