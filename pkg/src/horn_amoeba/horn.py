"""Ore-Sato coefficients and the Horn systems they define.

A coefficient is

    phi(s) = const * t^s * prod Gamma(<A, s+g> - c) / prod Gamma(<B, s+g> - d)
             * prod (<a, s+g> + lam)

with ``g = gamma``.  Derived objects work in the shifted variable
``sigma = s + gamma``: the operators ``P_i(theta)``, ``Q_i(theta)`` act on
``x^(s+gamma)`` by substituting ``theta = sigma``, and the quotient
``phi(s + e_i) / phi(s)`` equals ``P_i(sigma) / Q_i(sigma + e_i)``.

Canonical rows put everything in numerator form: a denominator factor
``1/Gamma(<B,sigma> - d)`` becomes the row ``(-B, -1 - d)`` (reflection
formula, up to a periodic factor) and a linear factor ``<a,sigma> + lam``
becomes the pair ``(a, -lam - 1)``, ``(-a, lam - 1)``.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaln, gammasgn

from .algebra import (MultiPoly, RationalFn, default_names, parse_poly, sylvester_resultant,
                      theta_apply, univariate_resultant)
from .geometry import primitive, rank


class ValidationError(ValueError):
    """Invalid input; ``field`` points at the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InvalidParameterError(ValueError):
    """A Gamma pole that is not compensated was hit during series evaluation."""


def _frac(v, where: str) -> Fraction:
    try:
        if isinstance(v, float):
            raise TypeError
        return Fraction(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValidationError(where, f"expected an exact rational (int or 'p/q' string), got {v!r}")


def _int_vec(v, n: int, where: str) -> tuple:
    if not isinstance(v, (list, tuple)) or len(v) != n or not all(isinstance(x, int) and not isinstance(x, bool)
                                                                  for x in v):
        raise ValidationError(where, f"expected a list of {n} integers, got {v!r}")
    return tuple(v)


# ---------------------------------------------------------------------------
# linear forms


@dataclass(frozen=True)
class LinearForm:
    """``<coeffs, sigma> + const`` with rational entries."""

    coeffs: tuple
    const: Fraction

    @classmethod
    def make(cls, coeffs, const) -> "LinearForm":
        return cls(tuple(Fraction(c) for c in coeffs), Fraction(const))

    def __add__(self, k) -> "LinearForm":
        return LinearForm(self.coeffs, self.const + k)

    def shift(self, v: Sequence) -> "LinearForm":
        """The form ``L(sigma + v)``."""
        return LinearForm(self.coeffs, self.const + sum(a * b for a, b in zip(self.coeffs, v)))

    def scale(self, k) -> "LinearForm":
        return LinearForm(tuple(c * k for c in self.coeffs), self.const * k)

    def evaluate(self, sigma):
        return sum(a * b for a, b in zip(self.coeffs, sigma)) + self.const

    def normalized(self) -> tuple:
        """``(r, L0)`` with ``self = r * L0`` and ``L0`` having coprime integer
        entries whose first nonzero variable coefficient is positive."""
        vals = list(self.coeffs) + [self.const]
        prim = primitive(vals)
        lead = next(x for x in prim[:-1] if x != 0) if any(prim[:-1]) else prim[-1]
        if lead < 0:
            prim = tuple(-x for x in prim)
        L0 = LinearForm.make(prim[:-1], prim[-1])
        ref = next(i for i, x in enumerate(vals) if x != 0)
        r = vals[ref] / Fraction(prim[ref])
        return r, L0

    def to_poly(self) -> MultiPoly:
        n = len(self.coeffs)
        terms = {tuple(1 if j == i else 0 for j in range(n)): c for i, c in enumerate(self.coeffs)}
        terms[(0,) * n] = self.const
        return MultiPoly(n, terms)

    def to_text(self, names=None) -> str:
        return self.to_poly().to_text(names or default_names(len(self.coeffs)))


@dataclass(frozen=True)
class FactoredPoly:
    """``scalar * prod factors`` with linear factors."""

    scalar: Fraction
    factors: tuple

    def expand(self, n: int) -> MultiPoly:
        p = MultiPoly.constant(self.scalar, n)
        for f in self.factors:
            p = p * f.to_poly()
        return p

    def shift(self, v) -> "FactoredPoly":
        return FactoredPoly(self.scalar, tuple(f.shift(v) for f in self.factors))

    def degree(self) -> int:
        return sum(1 for f in self.factors if any(f.coeffs))

    def to_text(self, names=None) -> str:
        parts = [] if self.scalar == 1 else [str(self.scalar)]
        parts += [f"({f.to_text(names)})" for f in self.factors]
        return "*".join(parts) if parts else "1"


def parse_factored(text: str, names: Sequence[str]) -> FactoredPoly | None:
    """Parse a product of linear factors; returns None when some factor is not linear."""
    depth, start, pieces = 0, 0, []
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            pieces.append(text[start:k])
            start = k + 1
    pieces.append(text[start:])
    scalar = Fraction(1)
    factors = []
    n = len(names)
    for piece in pieces:
        p, _ = parse_poly(piece, names)
        if p.is_constant():
            scalar *= p.constant_term()
            continue
        if p.total_degree() != 1 or min(min(e) for e in p.support()) < 0:
            return None
        coeffs = [p.coeff(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)]
        factors.append(LinearForm.make(coeffs, p.constant_term()))
    return FactoredPoly(scalar, tuple(factors))


# ---------------------------------------------------------------------------
# Ore-Sato coefficients


@dataclass
class OreSatoCoefficient:
    n: int
    t: tuple
    num_rows: list            # (A, c): Gamma(<A, sigma> - c) in the numerator
    den_rows: list = field(default_factory=list)        # (B, d): Gamma(<B, sigma> - d) in the denominator
    linear_factors: list = field(default_factory=list)  # (a, lam): <a, sigma> + lam
    gamma: tuple = None
    const: Fraction = Fraction(1)

    def __post_init__(self):
        n = self.n
        if self.gamma is None:
            self.gamma = (Fraction(0),) * n
        self.t = tuple(Fraction(x) for x in self.t)
        self.gamma = tuple(Fraction(x) for x in self.gamma)
        self.num_rows = [(tuple(A), Fraction(c)) for A, c in self.num_rows]
        self.den_rows = [(tuple(B), Fraction(d)) for B, d in self.den_rows]
        self.linear_factors = [(tuple(a), Fraction(l)) for a, l in self.linear_factors]
        self.const = Fraction(self.const)
        self.validate()

    def validate(self):
        n = self.n
        if len(self.t) != n:
            raise ValidationError("t", f"expected {n} entries")
        for i, ti in enumerate(self.t):
            if ti == 0:
                raise ValidationError(f"t[{i}]", "must be nonzero")
        if len(self.gamma) != n:
            raise ValidationError("gamma", f"expected {n} entries")
        if self.const == 0:
            raise ValidationError("const", "must be nonzero")
        for key, rows in (("num_rows", self.num_rows), ("den_rows", self.den_rows),
                          ("linear_factors", self.linear_factors)):
            for k, (A, _) in enumerate(rows):
                if len(A) != n:
                    raise ValidationError(f"{key}[{k}]", f"vector must have length {n}")
                if not any(A):
                    raise ValidationError(f"{key}[{k}]", "vector must be nonzero")
        if rank([A for A, _ in self.rows]) != n:
            raise ValidationError("num_rows", f"the row matrix must have rank {n}")

    @property
    def rows(self) -> list:
        """Canonical numerator-form rows ``(A, c)``, one per Gamma function."""
        out = list(self.num_rows)
        out += [(tuple(-b for b in B), -1 - d) for B, d in self.den_rows]
        for a, lam in self.linear_factors:
            out.append((a, -lam - 1))
            out.append((tuple(-x for x in a), lam - 1))
        return out

    # JSON
    @classmethod
    def from_json(cls, data: dict) -> "OreSatoCoefficient":
        if not isinstance(data, dict):
            raise ValidationError("<root>", "expected a JSON object")
        allowed = {"n", "t", "gamma", "num_rows", "den_rows", "linear_factors", "const", "name"}
        for k in data:
            if k not in allowed:
                raise ValidationError(k, "unknown key")
        n = data.get("n")
        if not isinstance(n, int) or n < 1:
            raise ValidationError("n", "expected a positive integer")
        t = data.get("t", [1] * n)
        if not isinstance(t, list) or len(t) != n:
            raise ValidationError("t", f"expected a list of {n} rationals")
        t = [_frac(v, f"t[{i}]") for i, v in enumerate(t)]
        gamma = data.get("gamma", [0] * n)
        if not isinstance(gamma, list) or len(gamma) != n:
            raise ValidationError("gamma", f"expected a list of {n} rationals")
        gamma = [_frac(v, f"gamma[{i}]") for i, v in enumerate(gamma)]

        def rows(key, vkey, ckey):
            out = []
            items = data.get(key, [])
            if not isinstance(items, list):
                raise ValidationError(key, "expected a list")
            for k, r in enumerate(items):
                if not isinstance(r, dict) or set(r) - {vkey, ckey}:
                    raise ValidationError(f"{key}[{k}]", f"expected an object with keys {vkey!r}, {ckey!r}")
                out.append((_int_vec(r.get(vkey), n, f"{key}[{k}].{vkey}"),
                            _frac(r.get(ckey, 0), f"{key}[{k}].{ckey}")))
            return out

        return cls(n, t, rows("num_rows", "A", "c"), rows("den_rows", "A", "c"),
                   rows("linear_factors", "a", "lam"), gamma, _frac(data.get("const", 1), "const"))

    def to_json(self) -> dict:
        s = str
        return {
            "n": self.n, "t": [s(x) for x in self.t], "gamma": [s(x) for x in self.gamma],
            "num_rows": [{"A": list(A), "c": s(c)} for A, c in self.num_rows],
            "den_rows": [{"A": list(B), "c": s(d)} for B, d in self.den_rows],
            "linear_factors": [{"a": list(a), "lam": s(l)} for a, l in self.linear_factors],
            "const": s(self.const),
        }

    # numeric value (original placement of every factor)
    def log_terms(self, S: np.ndarray):
        """Return (log|phi|, sign, zero mask, pole mask) at integer points ``S`` (rows)."""
        S = np.asarray(S, dtype=float)
        g = np.array([float(x) for x in self.gamma])
        sig = S + g
        logabs = np.full(len(S), math.log(abs(float(self.const))))
        sign = np.full(len(S), 1.0 if self.const > 0 else -1.0)
        zero = np.zeros(len(S), dtype=bool)
        pole = np.zeros(len(S), dtype=bool)
        for i, ti in enumerate(self.t):
            logabs += S[:, i] * math.log(abs(float(ti)))
            if ti < 0:
                sign *= np.where(S[:, i] % 2 == 0, 1.0, -1.0)
        for A, c in self.num_rows:
            z = sig @ np.array(A, dtype=float) - float(c)
            bad = _at_pole(z)
            pole |= bad
            zz = np.where(bad, 1.0, z)
            logabs += gammaln(zz)
            sign *= gammasgn(zz)
        for B, d in self.den_rows:
            z = sig @ np.array(B, dtype=float) - float(d)
            bad = _at_pole(z)
            zero |= bad
            zz = np.where(bad, 1.0, z)
            logabs -= gammaln(zz)
            sign *= gammasgn(zz)
        for a, lam in self.linear_factors:
            z = sig @ np.array(a, dtype=float) + float(lam)
            bad = np.abs(z) < 1e-12
            zero |= bad
            zz = np.where(bad, 1.0, z)
            logabs += np.log(np.abs(zz))
            sign *= np.sign(zz)
        return logabs, sign, zero, pole

    def value(self, s) -> float:
        la, sg, zero, pole = self.log_terms(np.array([s]))
        if pole[0] and not zero[0]:
            raise InvalidParameterError(f"uncompensated Gamma pole at s={tuple(s)}")
        if zero[0]:
            return 0.0
        return float(sg[0] * math.exp(la[0]))


def _at_pole(z: np.ndarray) -> np.ndarray:
    r = np.round(z)
    return (np.abs(z - r) < 1e-12) & (r <= 0)


def nonconfluency_check(phi: OreSatoCoefficient) -> bool:
    """True iff the canonical rows sum to zero."""
    total = [0] * phi.n
    for A, _ in phi.rows:
        total = [a + b for a, b in zip(total, A)]
    return not any(total)


# ---------------------------------------------------------------------------
# Horn systems


@dataclass
class HornSystem:
    """Operators ``x_i P_i(theta) y = Q_i(theta) y``, i = 1..n."""

    n: int
    P: list                     # MultiPoly in s_1..s_n
    Q: list
    P_factored: list | None = None
    Q_factored: list | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_factored(cls, n, Pf, Qf, meta=None) -> "HornSystem":
        return cls(n, [f.expand(n) for f in Pf], [f.expand(n) for f in Qf], list(Pf), list(Qf), meta or {})

    @classmethod
    def from_text(cls, pairs: Sequence, names: Sequence[str] | None = None) -> "HornSystem":
        n = len(pairs)
        names = list(names) if names else [f"s{i + 1}" for i in range(n)]
        P, Q, Pf, Qf = [], [], [], []
        for i, (ptxt, qtxt) in enumerate(pairs):
            try:
                P.append(parse_poly(ptxt, names)[0])
                Q.append(parse_poly(qtxt, names)[0])
            except ValueError as exc:
                raise ValidationError(f"equations[{i}]", str(exc))
            Pf.append(parse_factored(ptxt, names))
            Qf.append(parse_factored(qtxt, names))
        factored = all(f is not None for f in Pf + Qf)
        return cls(n, P, Q, Pf if factored else None, Qf if factored else None)

    @property
    def factored(self) -> bool:
        return self.P_factored is not None and self.Q_factored is not None

    def is_nonconfluent(self) -> bool:
        return all(p.total_degree() == q.total_degree() for p, q in zip(self.P, self.Q))

    def same_system(self, other: "HornSystem") -> bool:
        """Equal up to rescaling each equation: P_i Q'_i = P'_i Q_i."""
        return self.n == other.n and all(
            p * q2 == p2 * q for p, q, p2, q2 in zip(self.P, self.Q, other.P, other.Q))

    def to_json(self) -> dict:
        names = [f"s{i + 1}" for i in range(self.n)]
        eqs = []
        for i in range(self.n):
            ptxt = self.P_factored[i].to_text(names) if self.factored else self.P[i].to_text(names)
            qtxt = self.Q_factored[i].to_text(names) if self.factored else self.Q[i].to_text(names)
            eqs.append({"P": ptxt, "Q": qtxt, "P_expanded": self.P[i].to_text(names),
                        "Q_expanded": self.Q[i].to_text(names)})
        return {"n": self.n, "variables": names, "equations": eqs}


def _gamma_ratio(form: LinearForm, k: int):
    # Gamma(z + k) / Gamma(z) as (numerator factors, denominator factors)
    if k >= 0:
        return [form + j for j in range(k)], []
    return [], [form + (-j) for j in range(1, -k + 1)]


def _cancel(num: list, den: list):
    scalar = Fraction(1)
    den = list(den)
    kept = []
    den_norm = [f.normalized() for f in den]
    for f in num:
        r, f0 = f.normalized()
        hit = next((k for k, (_, d0) in enumerate(den_norm) if d0 == f0), None)
        if hit is None:
            kept.append(f)
            continue
        scalar *= r / den_norm[hit][0]
        den.pop(hit)
        den_norm.pop(hit)
    # constant factors go into the scalar
    out_num, out_den = [], []
    for f in kept:
        if any(f.coeffs):
            out_num.append(f)
        else:
            scalar *= f.const
    for f in den:
        if any(f.coeffs):
            out_den.append(f)
        else:
            scalar /= f.const
    return scalar, out_num, out_den


def horn_from_ore_sato(phi: OreSatoCoefficient) -> HornSystem:
    """Horn system whose i-th operator pair encodes ``phi(s + e_i) / phi(s)``."""
    n = phi.n
    Pf, Qf = [], []
    for i in range(n):
        num, den = [], []
        for A, c in phi.num_rows:
            a, b = _gamma_ratio(LinearForm.make(A, -c), A[i])
            num += a
            den += b
        for B, d in phi.den_rows:
            a, b = _gamma_ratio(LinearForm.make(B, -d), B[i])
            num += b
            den += a
        for a_vec, lam in phi.linear_factors:
            L = LinearForm.make(a_vec, lam)
            num.append(L + a_vec[i])
            den.append(L)
        scalar, num, den = _cancel(num, den)
        e_i = tuple(-1 if j == i else 0 for j in range(n))
        Pf.append(FactoredPoly(scalar * phi.t[i], tuple(num)))
        Qf.append(FactoredPoly(Fraction(1), tuple(f.shift(e_i) for f in den)))
    return HornSystem.from_factored(n, Pf, Qf, {"source": "ore-sato"})


def _unit(n, i, k=1):
    return tuple(k if j == i else 0 for j in range(n))


def compatibility_check(H: HornSystem) -> bool:
    """Exact check of R_i(s+e_j) R_j(s) = R_j(s+e_i) R_i(s) with R_i(s) = P_i(s)/Q_i(s+e_i)."""
    n = H.n
    for i, j in itertools.combinations(range(n), 2):
        ei, ej = _unit(n, i), _unit(n, j)
        eij = tuple(a + b for a, b in zip(ei, ej))
        lhs = H.P[i].shift(ej) * H.P[j] * H.Q[j].shift(eij) * H.Q[i].shift(ei)
        rhs = H.P[j].shift(ei) * H.P[i] * H.Q[i].shift(eij) * H.Q[j].shift(ej)
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# principal symbols and resultants


@dataclass
class SymbolSet:
    """Symbols ``H_i(x, z)`` as polynomials in ``(x_1..x_n, z_1..z_n)``."""

    n: int
    H: list
    degrees: list

    def names(self) -> list:
        return [f"x{i + 1}" for i in range(self.n)] + [f"z{i + 1}" for i in range(self.n)]

    def to_json(self) -> dict:
        return {"n": self.n, "variables": self.names(), "symbols": [h.to_text(self.names()) for h in self.H],
                "degrees": self.degrees}


def _top_in_xz(p: MultiPoly, d: int, n: int) -> MultiPoly:
    # leading homogeneous form with s_j -> x_j z_j
    return MultiPoly(2 * n, {tuple(e) + tuple(e): c for e, c in p.terms.items() if sum(e) == d})


def principal_symbols(H: HornSystem) -> SymbolSet:
    if not H.is_nonconfluent():
        raise ValidationError("equations", "confluent system: deg P_i differs from deg Q_i")
    n = H.n
    out, degs = [], []
    for i in range(n):
        d = H.P[i].total_degree()
        xi = MultiPoly.var(i, 2 * n)
        out.append(xi * _top_in_xz(H.P[i], d, n) - _top_in_xz(H.Q[i], d, n))
        degs.append(d)
    return SymbolSet(n, out, degs)


def _binary_coeffs(h: MultiPoly, var: int, degree: int, n: int) -> list:
    # coefficients of z_var^k (k = degree..0) after setting the other z to 1, as polys in x
    by = {}
    for e, c in h.terms.items():
        k = e[n + var]
        by.setdefault(k, {})[tuple(e[:n])] = c
    return [MultiPoly(n, by.get(k, {})) for k in range(degree, -1, -1)]


def symbol_resultant(S: SymbolSet, normalize: bool = True) -> MultiPoly:
    """Resultant of two binary forms in ``z``, a polynomial in ``x``.

    Computed as the Sylvester resultant in ``z2`` after setting ``z1 = 1``
    with the formal degrees of the forms.  With ``normalize`` the integer
    content is divided out (positive factor), giving the primitive resultant.
    """
    if S.n != 2:
        raise ValidationError("symbols", "resultant of symbols is implemented for n = 2 only")
    f = _binary_coeffs(S.H[0], 1, S.degrees[0], 2)
    g = _binary_coeffs(S.H[1], 1, S.degrees[1], 2)
    R = sylvester_resultant(f, g)
    if normalize and not R.is_zero():
        R = R * (1 / R.content())
    return R


def essential_resultant(R: MultiPoly) -> MultiPoly:
    """Divide out the largest monomial dividing every term."""
    if R.is_zero():
        raise ValueError("zero resultant")
    m = R.min_exponents()
    return R.mul_monomial(tuple(-k for k in m))


# ---------------------------------------------------------------------------
# Mellin and Bergman systems


def mellin_horn(m: int, exps: Sequence[int]) -> HornSystem:
    """Horn system in ``xi_i = x_i^m`` for a root of ``y^m + sum x_i y^{m_i} - 1``.

    ``meta["x_form"]`` keeps the operators before the change of variables:
    ``x_i^m R_i(theta) y = (-1)^{m_i} m^m prod_j (theta_i - j) y``.
    """
    exps = list(exps)
    n = len(exps)
    if m < 1 or not exps or any(not isinstance(k, int) or k < 1 for k in exps):
        raise ValidationError("exps", "expected positive integers")
    if any(a <= b for a, b in zip(exps, exps[1:])):
        raise ValidationError("exps", "exponents must be strictly decreasing")
    if m <= exps[0]:
        raise ValidationError("m", "m must exceed the largest exponent")
    comp = [m - k for k in exps]
    x_P, x_Q, P, Q = [], [], [], []
    for i in range(n):
        first = [LinearForm.make(exps, 1 + m * j) for j in range(exps[i])]
        second = [LinearForm.make(comp, -1 + m * j) for j in range(comp[i])]
        x_P.append(FactoredPoly(Fraction(1), tuple(first + second)))
        x_Q.append(FactoredPoly(Fraction((-1) ** exps[i] * m ** m),
                                tuple(LinearForm.make(_unit(n, i), -j) for j in range(m))))
        P.append(FactoredPoly(Fraction(1), tuple(_rescale(first + second, m))))
        Q.append(FactoredPoly(x_Q[-1].scalar, tuple(_rescale(x_Q[-1].factors, m))))
    meta = {"source": "mellin", "m": m, "exps": exps,
            "x_form": HornSystem.from_factored(n, x_P, x_Q, {"variables": "x"})}
    return HornSystem.from_factored(n, P, Q, meta)


def _rescale(forms, m):
    # L(theta_x) with theta_x = m * theta_xi
    return [LinearForm(tuple(c * m for c in f.coeffs), f.const) for f in forms]


@dataclass
class BergmanKernel:
    p: tuple
    coefficient: OreSatoCoefficient
    system: HornSystem
    closed_form: RationalFn | None
    normalization: str
    note: str = ""


def bergman_coefficient(p: Sequence[int]) -> OreSatoCoefficient:
    p = tuple(p)
    n = len(p)
    total = sum(p)
    den = [(_unit(n, i, p[i]), Fraction(-p[i])) for i in range(n)]
    return OreSatoCoefficient(n, (1,) * n, [(p, Fraction(-(total + 1)))], den, [], None,
                              Fraction(1, math.prod(p)))


def _power_derivative(num: MultiPoly, base: MultiPoly, k: int, i: int) -> MultiPoly:
    # d/dx_i (num / base^k) = (num' base - k num base') / base^(k+1)
    return num.derivative(i) * base - num * base.derivative(i) * k


def bergman_closed_form(p: Sequence[int]) -> RationalFn:
    """Sum of the Bergman series as an exact rational function (the 1/pi^n factor dropped).

    The sum over all roots ``w_i^{p_i} = x_i`` of ``1/(1 - sum w_i)`` is a
    trace: with ``N`` the norm of ``D = 1 - sum w_i`` (computed by resultants
    against ``u^{p_i} - w_i^{p_i}``) and ``g = N / D``, the trace is
    ``prod(p) * sum_{p | k} g_k x^{k/p}`` over ``N``.
    """
    p = tuple(p)
    n = len(p)
    nv = n + 1  # w_1..w_n, u
    D = MultiPoly.one(nv) - sum((MultiPoly.var(i, nv) for i in range(n)), MultiPoly.zero(nv))
    Nw = D
    for i in range(n):
        if p[i] == 1:
            continue
        swapped = MultiPoly(nv, {_swap(e, i, n): c for e, c in Nw.terms.items()})
        A = MultiPoly.var(n, nv) ** p[i] - MultiPoly.var(i, nv) ** p[i]
        Nw = univariate_resultant(A, swapped, n)
    g = Nw.exact_div(D)
    scale = math.prod(p)

    def to_x(poly, keep_all):
        out = {}
        for e, c in poly.terms.items():
            if all(e[j] % p[j] == 0 for j in range(n)):
                out[tuple(e[j] // p[j] for j in range(n))] = c * (scale if keep_all else 1)
            elif not keep_all:
                raise ArithmeticError("norm is not a polynomial in x")
        return MultiPoly(n, out)

    num = to_x(g, True)
    base = to_x(Nw, False)
    k = 1
    for i in range(n):
        num = _power_derivative(num, base, k, i)
        k += 1
    return RationalFn(num * Fraction(1, scale), base ** k)


def _swap(e, i, n):
    e = list(e)
    e[i], e[n] = e[n], e[i]
    return tuple(e)


def bergman_kernel(p: Sequence[int]) -> BergmanKernel:
    p = tuple(int(v) for v in p)
    if not p or any(v < 1 for v in p):
        raise ValidationError("p", "expected positive integers")
    phi = bergman_coefficient(p)
    system = horn_from_ore_sato(phi)
    closed, note = None, ""
    if len(p) <= 3 and max(p) <= 3:
        closed = bergman_closed_form(p)
    else:
        note = "closed form is computed only for n <= 3 and all p_i <= 3"
    return BergmanKernel(p, phi, system, closed, f"multiply by 1/pi^{len(p)}", note)


def nonbergman_coefficient(n: int, p: int) -> OreSatoCoefficient:
    """Coefficient of the series of ``((1 - x1)^p - x2 - ... - xn)^(-1)``."""
    tail = tuple([0] + [1] * (n - 1))
    first = tuple([1] + [p] * (n - 1))
    num = [(first, Fraction(-p)), (tail, Fraction(-1))]
    den = [(_unit(n, i), Fraction(-1)) for i in range(n)] + [(tuple(p * v for v in tail), Fraction(-p))]
    return OreSatoCoefficient(n, (1,) * n, num, den)


# ---------------------------------------------------------------------------
# verification and evaluation


def verify_horn_solution(H: HornSystem, y) -> list:
    """Residuals ``x_i P_i(theta) y - Q_i(theta) y``; y solves the system iff all vanish."""
    if isinstance(y, MultiPoly):
        y = RationalFn(y)
    if y.nvars != H.n:
        raise ValidationError("y", f"function has {y.nvars} variables, system has {H.n}")
    out = []
    for i in range(H.n):
        xi = MultiPoly.var(i, H.n)
        out.append(theta_apply(H.P[i], y) * xi - theta_apply(H.Q[i], y))
    return out


@dataclass
class SeriesValue:
    value: complex
    error: float
    nterms: int


def series_eval(phi: OreSatoCoefficient, support, x: Sequence, N: int) -> SeriesValue:
    """Partial sum of ``x^gamma sum_{s in S} phi(s) x^s`` over ``max|s_j| <= N``.

    ``support`` is a SupportSpec (or anything with ``contains_many``).  The
    error estimate is the total modulus of the outermost shell.
    """
    n = phi.n
    grid = np.array(list(itertools.product(range(-N, N + 1), repeat=n)), dtype=np.int64)
    grid = grid[support.contains_many(grid)]
    if len(grid) == 0:
        return SeriesValue(0j, 0.0, 0)
    logabs, sign, zero, pole = phi.log_terms(grid)
    bad = pole & ~zero
    if bad.any():
        s = tuple(int(v) for v in grid[np.argmax(bad)])
        raise InvalidParameterError(f"uncompensated Gamma pole at support point s={s}")
    keep = ~zero
    grid, logabs, sign = grid[keep], logabs[keep], sign[keep]
    logx = np.array([cmath.log(complex(v)) for v in x])
    expo = logabs + (grid @ logx)
    terms = sign * np.exp(expo)
    shell = np.abs(grid).max(axis=1)
    order = np.lexsort(tuple(grid.T[::-1]) + (shell,))
    terms, shell = terms[order], shell[order]
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    gshift = complex(1)
    for xv, g in zip(x, phi.gamma):
        if g:
            gshift *= complex(xv) ** float(g)
    err = float(np.abs(terms[shell == N]).sum()) if (shell == N).any() else 0.0
    return SeriesValue(total * gshift, err * abs(gshift), int(len(terms)))


# ---------------------------------------------------------------------------
# rationality screens


def _rank_screen_hypotheses(phi: OreSatoCoefficient):
    n = phi.n
    if phi.linear_factors:
        return None, "linear prefactors present"
    if len(phi.den_rows) != n:
        return None, "denominator is not a product of n factors Gamma(p_j(s_j + 1))"
    p = [None] * n
    for B, d in phi.den_rows:
        nz = [j for j in range(n) if B[j] != 0]
        if len(nz) != 1 or B[nz[0]] <= 0 or d != -B[nz[0]] or p[nz[0]] is not None:
            return None, "denominator is not a product of n factors Gamma(p_j(s_j + 1))"
        p[nz[0]] = B[nz[0]]
    if any(v <= 0 for A, _ in phi.num_rows for v in A):
        return None, "numerator rows are not all positive"
    if any(g != 0 for g in phi.gamma):
        return None, "nonzero shift gamma"
    return tuple(p), ""


def rationality_screens(phi: OreSatoCoefficient, window: int | None = None) -> dict:
    from .supports import admissible_supports, horn_fan  # local import: supports depends on this module

    if not nonconfluency_check(phi):
        raise ValidationError("num_rows", "confluent coefficient: rows do not sum to zero")
    report: dict = {}
    p, why = _rank_screen_hypotheses(phi)
    rk = rank([A for A, _ in phi.num_rows])
    report["rank_A"] = rk
    if p is None:
        report["rank_screen"] = {"applicable": False, "reason": why}
    else:
        entry = {"applicable": True, "rank": rk}
        if rk > 1:
            entry["verdict"] = "cannot define a rational function"
        else:
            entry["verdict"] = "rational only if contiguous to the Bergman kernel"
            entry["contiguity_target"] = list(p)
        report["rank_screen"] = entry
    H = horn_from_ore_sato(phi)
    sets = admissible_supports(H, (0,) * phi.n, window=window)
    pointed = [S for S in sets if S.cone.is_strongly_convex()]
    fan = horn_fan(phi)
    ncones = len(fan.B_cones)
    report["zero_admissible_sets"] = len(pointed)
    report["fan_maximal_cones"] = ncones
    if fan.verdict.is_fan and fan.verdict.complete:
        blocked = len(pointed) < ncones
        report["count_screen"] = {
            "verdict": (f"obstruction: a rational sum needs one Laurent expansion per maximal fan cone "
                        f"({ncones}) but only {len(pointed)} zero-admissible sets exist")
            if blocked else "no obstruction",
            "obstruction": blocked,
        }
    else:
        report["count_screen"] = {"verdict": "not applicable: the cones do not form a complete fan",
                                  "obstruction": False}
    return report
