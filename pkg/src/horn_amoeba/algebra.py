"""Exact sparse Laurent polynomials over the rationals.

A :class:`MultiPoly` maps integer exponent vectors (negative entries allowed)
to nonzero :class:`fractions.Fraction` coefficients.  Values are immutable and
always stored in canonical form, so structural equality is polynomial
equality.  Canonical term order is graded lexicographic, highest first.

The module also provides rational functions, the action of polynomial
differential operators in ``theta_i = x_i d/dx_i``, Sylvester resultants by
fraction-free (Bareiss) elimination, and discriminants.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

Exponent = tuple

__all__ = [
    "MultiPoly",
    "RationalFn",
    "DimensionError",
    "PolynomialParseError",
    "parse_poly",
    "poly_arithmetic",
    "partial_derivative",
    "theta_apply",
    "bareiss_det",
    "sylvester_resultant",
    "univariate_resultant",
    "discriminant",
]


class DimensionError(ValueError):
    """Operands live in polynomial rings with different numbers of variables."""


class PolynomialParseError(ValueError):
    pass


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient must be exact (int, Fraction or str), got {type(c).__name__}")


def _grlex_key(e: Exponent):
    return (sum(e), e)


class MultiPoly:
    """Sparse Laurent polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = nvars
        clean: dict = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(v) for v in e)
                if len(e) != nvars:
                    raise DimensionError(f"exponent {e} has length {len(e)}, expected {nvars}")
                c = _as_fraction(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
            clean = {e: c for e, c in clean.items() if c}
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "MultiPoly":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # ----- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, nvars: int) -> "MultiPoly":
        return cls.constant(1, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "MultiPoly":
        """The variable ``x_{i+1}`` (0-based index ``i``)."""
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "MultiPoly":
        return cls(len(exponent), {tuple(exponent): coeff})

    # ----- basic queries ------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in graded lexicographic order, highest first."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def support(self) -> list:
        return [e for e, _ in self.items()]

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0,) * self.nvars in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def coeff(self, exponent: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coeff((0,) * self.nvars)

    def leading_term(self):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=_grlex_key)
        return e, self._terms[e]

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def min_total_degree(self) -> int:
        return min(sum(e) for e in self._terms)

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def min_degree_in(self, i: int) -> int:
        return min(e[i] for e in self._terms)

    def min_exponents(self) -> tuple:
        """Componentwise minimum exponent (the largest monomial dividing every term)."""
        if not self._terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self._terms) for i in range(self.nvars))

    def max_exponents(self) -> tuple:
        return tuple(max(e[i] for e in self._terms) for i in range(self.nvars))

    def is_homogeneous_in(self, idx: Sequence[int]) -> bool:
        degs = {sum(e[i] for i in idx) for e in self._terms}
        return len(degs) <= 1

    # ----- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionError(f"dimension mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly.zero(self.nvars)
            return MultiPoly._raw(self.nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self.exact_div(other)

    def __pow__(self, k: int):
        if k < 0:
            if self.is_monomial():
                (e, c), = self._terms.items()
                return MultiPoly._raw(self.nvars, {tuple(-v * -k for v in e): Fraction(1) / c ** -k})
            raise ValueError("negative power of a non-monomial")
        result = MultiPoly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.constant(other, self.nvars)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def mul_monomial(self, exponent: Sequence[int], coeff=1) -> "MultiPoly":
        coeff = _as_fraction(coeff)
        return MultiPoly._raw(
            self.nvars,
            {tuple(a + b for a, b in zip(e, exponent)): c * coeff for e, c in self._terms.items()} if coeff else {},
        )

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient ``self / other``; raises ``ArithmeticError`` unless it is exact."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_monomial():
            (eb, cb), = other._terms.items()
            return MultiPoly._raw(
                self.nvars,
                {tuple(a - b for a, b in zip(e, eb)): c / cb for e, c in self._terms.items()},
            )
        if self.is_zero():
            return MultiPoly.zero(self.nvars)
        lb, cb = other.leading_term()
        floor = self.min_total_degree() - other.min_total_degree() + sum(lb)
        rem = dict(self._terms)
        quot: dict = {}
        bterms = list(other._terms.items())
        while rem:
            lr = max(rem, key=_grlex_key)
            if sum(lr) < floor:
                raise ArithmeticError("polynomial division is not exact")
            qe = tuple(a - b for a, b in zip(lr, lb))
            qc = rem[lr] / cb
            quot[qe] = qc
            for e, c in bterms:
                t = tuple(a + b for a, b in zip(qe, e))
                v = rem.get(t, 0) - qc * c
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return MultiPoly._raw(self.nvars, quot)

    # ----- calculus and substitution -------------------------------------
    def derivative(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly._raw(self.nvars, out)

    def theta(self, i: int) -> "MultiPoly":
        """Euler operator ``x_i d/dx_i``: scales each term by its ``i``-th exponent."""
        return MultiPoly._raw(self.nvars, {e: c * e[i] for e, c in self._terms.items() if e[i]})

    def shift(self, offsets: Sequence) -> "MultiPoly":
        """Return ``p(x + offsets)``; requires nonnegative exponents."""
        offsets = [_as_fraction(o) for o in offsets]
        if self._terms and min(min(e) for e in self._terms) < 0:
            raise ValueError("shift is defined for polynomials only")
        n = self.nvars
        result = MultiPoly.zero(n)
        lin = [MultiPoly.var(i, n) + offsets[i] for i in range(n)]
        pow_cache: dict = {}

        def lin_pow(i, k):
            key = (i, k)
            if key not in pow_cache:
                pow_cache[key] = lin[i] ** k
            return pow_cache[key]

        for e, c in self._terms.items():
            term = MultiPoly.constant(c, n)
            for i, k in enumerate(e):
                if k:
                    term = term * lin_pow(i, k) if offsets[i] else term.mul_monomial(
                        tuple(k if j == i else 0 for j in range(n)))
            result = result + term
        return result

    def substitute(self, values: Mapping[int, "MultiPoly | Fraction | int"]) -> "MultiPoly":
        """Replace variables ``x_i`` (0-based keys) by polynomials in the same ring."""
        n = self.nvars
        subs = {i: (v if isinstance(v, MultiPoly) else MultiPoly.constant(v, n)) for i, v in values.items()}
        result = MultiPoly.zero(n)
        for e, c in self._terms.items():
            kept = tuple(0 if i in subs else k for i, k in enumerate(e))
            term = MultiPoly._raw(n, {kept: c})
            for i, v in subs.items():
                if e[i]:
                    term = term * (v ** e[i])
            result = result + term
        return result

    def evaluate(self, point: Sequence):
        """Evaluate at a point; exact for rational input, floating for float/complex input."""
        total = 0
        for e, c in self._terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        return total

    def coefficients_in(self, i: int) -> dict:
        """Map power ``k`` of ``x_i`` to the coefficient polynomial (with ``x_i`` removed)."""
        out: dict = {}
        for e, c in self._terms.items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[ne] = c
        return {k: MultiPoly._raw(self.nvars, t) for k, t in out.items()}

    def homogeneous_part(self, degree: int, idx: Sequence[int] | None = None) -> "MultiPoly":
        idx = range(self.nvars) if idx is None else idx
        return MultiPoly._raw(
            self.nvars, {e: c for e, c in self._terms.items() if sum(e[i] for i in idx) == degree})

    def embed(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Re-index into a ring with ``nvars`` variables; variable ``i`` goes to ``positions[i]``."""
        out = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            out[tuple(ne)] = c
        return MultiPoly(nvars, out)

    def content(self) -> Fraction:
        """Positive rational ``g`` with ``self / g`` having coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        nums = reduce(math.gcd, (c.numerator for c in self._terms.values()))
        dens = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in self._terms.values()))
        return Fraction(nums, dens)

    def primitive(self) -> "MultiPoly":
        """Integer-coefficient primitive part with positive leading coefficient."""
        if not self._terms:
            return self
        p = self * (1 / self.content())
        if p.leading_term()[1] < 0:
            p = -p
        return p

    # ----- text ---------------------------------------------------------
    def to_text(self, names: Sequence[str] | None = None) -> str:
        names = default_names(self.nvars) if names is None else list(names)
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.to_text()!r})"


def default_names(n: int) -> list:
    return [f"x{i + 1}" for i in range(n)]


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _natural_key(name: str):
    m = re.fullmatch(r"([A-Za-z_]+)(\d*)", name)
    if m:
        return (m.group(1) != "x", m.group(1), int(m.group(2) or 0), name)
    return (True, name, 0, name)


def _tokenize(text: str) -> list:
    text = text.replace("−", "-").replace("·", "*")
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialParseError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, names):
        self.toks = tokens
        self.i = 0
        self.names = names
        self.n = len(names)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise PolynomialParseError(f"expected {op!r}, got {val!r}")

    def expr(self):
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise PolynomialParseError("division is only allowed by nonzero rational constants")
                p = p * (1 / q.constant_term())
        return p

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            while self.peek() in (("op", "-"), ("op", "+")):
                if self.take()[1] == "-":
                    sign = -sign
            kind, val = self.take()
            if kind == "op" and val == "(":
                # allow x^(-2)
                inner_sign = 1
                while self.peek() in (("op", "-"), ("op", "+")):
                    if self.take()[1] == "-":
                        inner_sign = -inner_sign
                kind, val = self.take()
                self.expect(")")
                sign *= inner_sign
            if kind != "num":
                raise PolynomialParseError("exponent must be an integer literal")
            k = sign * val
            if k < 0 and not base.is_monomial():
                raise PolynomialParseError("negative exponents are allowed on monomials only")
            return base ** k
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return MultiPoly.constant(val, self.n)
        if kind == "id":
            if val not in self.names:
                raise PolynomialParseError(f"unknown variable {val!r}")
            return MultiPoly.var(self.names.index(val), self.n)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise PolynomialParseError(f"unexpected token {val!r}")


def parse_poly(text: str, names: Sequence[str] | None = None) -> tuple:
    """Parse polynomial text; returns ``(poly, names)``.

    Terms look like ``c*x1^a1*...*xn^an`` with rational ``c = p/q``; negative
    exponents and parentheses are accepted.  When ``names`` is omitted the
    variables found in the text are ordered naturally (``x1, x2, ...`` first).
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialParseError("empty polynomial text")
    if names is None:
        found = sorted({v for k, v in tokens if k == "id"}, key=_natural_key)
        names = found or ["x1"]
    names = list(names)
    parser = _Parser(tokens, names)
    poly = parser.expr()
    if parser.i != len(tokens):
        raise PolynomialParseError(f"trailing input near token {parser.i}: {tokens[parser.i][1]!r}")
    return poly, names


# ---------------------------------------------------------------------------
# operations


def poly_arithmetic(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if a.nvars != b.nvars:
        raise DimensionError(f"dimension mismatch: {a.nvars} vs {b.nvars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(p: MultiPoly, i: int) -> MultiPoly:
    """Exact ``dp/dx_i`` with 1-based variable index ``i``."""
    if not 1 <= i <= p.nvars:
        raise IndexError(f"variable index {i} out of range 1..{p.nvars}")
    return p.derivative(i - 1)


class RationalFn:
    """Quotient of two polynomials with content-normalized integer coefficients.

    Only the integer content is normalized; no polynomial gcd is taken, so
    equality is decided by cross multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.one(num.nvars)
        if num.nvars != den.nvars:
            raise DimensionError("numerator and denominator dimensions differ")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, MultiPoly.one(num.nvars)
            return
        coeffs = list(num._terms.values()) + list(den._terms.values())
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coeffs))
        g = reduce(math.gcd, ((c * lcm).numerator for c in coeffs))
        scale = Fraction(lcm, g)
        if den.leading_term()[1] < 0:
            scale = -scale
        self.num = num * scale
        self.den = den * scale

    @property
    def nvars(self):
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, MultiPoly):
            return RationalFn(other)
        if isinstance(other, (int, Fraction)):
            return RationalFn(MultiPoly.constant(other, self.nvars))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalFn(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def derivative(self, i: int) -> "RationalFn":
        return RationalFn(self.num.derivative(i) * self.den - self.num * self.den.derivative(i), self.den * self.den)

    def evaluate(self, point):
        return self.num.evaluate(point) / self.den.evaluate(point)

    def to_text(self, names=None) -> str:
        if self.den == 1:
            return self.num.to_text(names)
        return f"({self.num.to_text(names)})/({self.den.to_text(names)})"

    def __repr__(self):
        return f"RationalFn({self.to_text()!r})"


def _power_frac_theta(num: MultiPoly, base: MultiPoly, base_theta: list, k: int, i: int) -> MultiPoly:
    # theta_i(num / base^k) = (theta_i(num)*base - k*num*theta_i(base)) / base^(k+1)
    out = num.theta(i) * base
    if k and not base_theta[i].is_zero():
        out = out - num * base_theta[i] * k
    return out


def theta_apply(P: MultiPoly, y) -> RationalFn:
    """Apply the operator ``P(theta)``, ``theta_i = x_i d/dx_i``, to ``y``.

    ``P`` is a polynomial in formal variables ``s_1..s_n`` and each monomial
    ``s^a`` acts as the composition of ``theta_i^{a_i}``.
    """
    if isinstance(y, MultiPoly):
        y = RationalFn(y)
    if P.nvars != y.nvars:
        raise DimensionError("operator and function dimensions differ")
    if min((min(e) for e in P._terms), default=0) < 0:
        raise ValueError("operator polynomial must have nonnegative exponents")
    n = P.nvars
    base = y.den
    constant_base = base.is_constant()
    base_theta = [base.theta(i) for i in range(n)]
    # cache: exponent -> numerator over base^(1 + |alpha|) (or over base when constant)
    cache = {(0,) * n: y.num}

    def apply_mono(alpha):
        if alpha in cache:
            return cache[alpha]
        i = next(j for j in range(n) if alpha[j])
        prev = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
        inner = apply_mono(prev)
        if constant_base:
            res = inner.theta(i)
        else:
            res = _power_frac_theta(inner, base, base_theta, 1 + sum(prev), i)
        cache[alpha] = res
        return res

    if P.is_zero():
        return RationalFn(MultiPoly.zero(n))
    top = P.total_degree()
    total = MultiPoly.zero(n)
    for alpha, c in P._terms.items():
        term = apply_mono(alpha) * c
        if not constant_base:
            gap = top - sum(alpha)
            if gap:
                term = term * base ** gap
        total = total + term
    den = base if constant_base else base ** (top + 1)
    return RationalFn(total, den)


def bareiss_det(matrix: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant by fraction-free Gaussian elimination with exact divisions."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    nv = next(e.nvars for row in matrix for e in row)
    M = [list(row) for row in matrix]
    if any(len(row) != n for row in M):
        raise ValueError("matrix must be square")
    sign = 1
    prev = MultiPoly.one(nv)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((r for r in range(k + 1, n) if not M[r][k].is_zero()), None)
            if swap is None:
                return MultiPoly.zero(nv)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n):
                v = row_i[j] * pivot
                if not mik.is_zero() and not row_k[j].is_zero():
                    v = v - mik * row_k[j]
                row_i[j] = v.exact_div(prev) if not prev == 1 else v
            row_i[k] = MultiPoly.zero(nv)
        prev = pivot
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester_resultant(f_coeffs: Sequence[MultiPoly], g_coeffs: Sequence[MultiPoly]) -> MultiPoly:
    """Resultant from coefficient lists ordered from the top (formal) degree down.

    The Sylvester matrix has ``deg g`` shifted rows of ``f`` on top of
    ``deg f`` shifted rows of ``g``; leading entries may be zero, which gives
    the resultant of binary forms of the stated degrees.
    """
    m, k = len(f_coeffs) - 1, len(g_coeffs) - 1
    if m < 0 or k < 0:
        raise ValueError("empty coefficient list")
    nv = (list(f_coeffs) + list(g_coeffs))[0].nvars
    zero = MultiPoly.zero(nv)
    size = m + k
    if size == 0:
        return MultiPoly.one(nv)
    rows = []
    for r in range(k):
        rows.append([zero] * r + list(f_coeffs) + [zero] * (size - r - m - 1))
    for r in range(m):
        rows.append([zero] * r + list(g_coeffs) + [zero] * (size - r - k - 1))
    return bareiss_det(rows)


def _coeff_list(p: MultiPoly, var: int, degree: int) -> list:
    by_power = p.coefficients_in(var)
    return [by_power.get(d, MultiPoly.zero(p.nvars)) for d in range(degree, -1, -1)]


def univariate_resultant(f: MultiPoly, g: MultiPoly, var: int) -> MultiPoly:
    """Sylvester resultant of ``f`` and ``g`` eliminating variable ``var`` (0-based).

    The result keeps the ring of ``f`` with ``x_var`` absent.  Sign follows
    the Sylvester matrix with ``f`` in the top rows, so ``Res(y - a, y - b) = a - b``.
    """
    if f.nvars != g.nvars:
        raise DimensionError("dimension mismatch")
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of the zero polynomial")
    for p in (f, g):
        if p.min_degree_in(var) < 0:
            raise ValueError("negative powers of the eliminated variable")
    df, dg = f.degree_in(var), g.degree_in(var)
    if df < 1 or dg < 1:
        raise ValueError("both polynomials need positive degree in the eliminated variable")
    return sylvester_resultant(_coeff_list(f, var, df), _coeff_list(g, var, dg))


def discriminant(f: MultiPoly, var: int) -> MultiPoly:
    """``Res(f, df/dvar)`` normalized to a negative constant term when it is nonzero.

    ``f`` must be monic in ``var``.
    """
    d = f.degree_in(var)
    if d < 2:
        raise ValueError("discriminant needs degree >= 2 in the chosen variable")
    lead = f.coefficients_in(var)[d]
    if lead != 1:
        raise ValueError("discriminant expects a polynomial monic in the chosen variable")
    r = univariate_resultant(f, f.derivative(var), var)
    if r.constant_term() > 0:
        r = -r
    return r
