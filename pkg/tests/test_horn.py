import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from horn_amoeba.algebra import MultiPoly, RationalFn, parse_poly
from horn_amoeba.horn import (HornSystem, OreSatoCoefficient, ValidationError, bergman_kernel, compatibility_check,
                              essential_resultant, horn_from_ore_sato, mellin_horn, nonconfluency_check,
                              principal_symbols, rationality_screens, nonbergman_coefficient, series_eval,
                              symbol_resultant, verify_horn_solution)
from horn_amoeba.supports import admissible_supports

from test_algebra import from_sympy

MANY = settings(max_examples=200, deadline=None, derandomize=True)


def test_validation_errors_name_the_field():
    with pytest.raises(ValidationError) as info:
        OreSatoCoefficient.from_json({"n": 2, "num_rows": [{"A": [1, 0], "c": "0"}]})
    assert info.value.field == "num_rows"
    assert str(info.value).startswith("num_rows: ")
    with pytest.raises(ValidationError, match=r"t\[0\]"):
        OreSatoCoefficient(1, (0,), [((1,), 0)])


def test_json_roundtrip(example1):
    again = OreSatoCoefficient.from_json(example1.to_json())
    assert again.rows == example1.rows
    assert nonconfluency_check(example1)


def test_confluent_coefficient_is_rejected_by_screens():
    phi = OreSatoCoefficient(1, (1,), [((1,), 0)])
    assert not nonconfluency_check(phi)
    with pytest.raises(ValidationError, match="confluent"):
        rationality_screens(phi)


def test_coefficient_satisfies_its_recurrences(example1):
    # phi(s + e_i) / phi(s) = P_i(s) / Q_i(s + e_i)
    H = horn_from_ore_sato(example1)
    for s in [(5, 6), (7, 9), (4, 8)]:
        for i in range(2):
            up = tuple(v + (k == i) for k, v in enumerate(s))
            ratio = example1.value(up) / example1.value(s)
            shifted = H.Q[i].shift([int(k == i) for k in range(2)])
            expected = float(H.P[i].evaluate(s)) / float(shifted.evaluate(s))
            assert ratio == pytest.approx(expected, rel=1e-10)


def test_example1_resultant_against_sympy(example1):
    # independent route: sympy resultant of the dehomogenized symbols
    S = principal_symbols(horn_from_ore_sato(example1))
    x1, x2, z1, z2 = sp.symbols("x1 x2 z1 z2")
    names = [x1, x2, z1, z2]
    exprs = [sp.Add(*[sp.Rational(c.numerator, c.denominator) * sp.Mul(*[v ** e for v, e in zip(names, ex)])
                      for ex, c in h.terms.items()]) for h in S.H]
    # homogeneous resultant: Sylvester matrix built on the formal degrees, not the actual ones
    d = S.degrees
    coeffs = [[sp.expand(e.subs(z1, 1)).coeff(z2, k) for k in range(deg, -1, -1)] for e, deg in zip(exprs, d)]
    size = d[0] + d[1]
    rows = []
    for cs, shifts in ((coeffs[0], d[1]), (coeffs[1], d[0])):
        for k in range(shifts):
            rows.append([0] * k + cs + [0] * (size - k - len(cs)))
    ref = from_sympy(sp.expand(sp.Matrix(rows).det()), 2)
    ours = symbol_resultant(S)
    assert ours == ref * (1 / ref.content()) or ours == ref * (-1 / ref.content())
    assert essential_resultant(ours) == parse_poly("(1-x1)*(1-x2)*(1-x1-x2)")[0]


def test_mellin_system_matches_printed_x_form():
    M = mellin_horn(3, (2, 1))
    assert compatibility_check(M) and M.is_nonconfluent()
    printed = HornSystem.from_text([("(2*s1+s2+1)*(2*s1+s2+4)*(s1+2*s2-1)", "27*s1*(s1-1)*(s1-2)"),
                                    ("(2*s1+s2+1)*(s1+2*s2-1)*(s1+2*s2+2)", "-27*s2*(s2-1)*(s2-2)")])
    assert M.meta["x_form"].same_system(printed)
    with pytest.raises(ValidationError, match="decreasing"):
        mellin_horn(3, (1, 2))


@pytest.mark.parametrize("p", [(1, 1), (2, 1), (1, 1, 1)])
def test_bergman_closed_form_solves_and_sums(p):
    B = bergman_kernel(p)
    y = B.closed_form
    assert all(r.is_zero() for r in verify_horn_solution(B.system, y))
    sups = admissible_supports(B.system)
    n = len(p)
    main = [S for S in sups if S.contains((0,) * n) and S.contains((3,) * n)]
    x = (0.04,) * n
    approx = series_eval(B.coefficient, main[0], x, 50 if n == 2 else 30)
    assert complex(approx.value) == pytest.approx(float(y.evaluate([Fraction(1, 25)] * n)), rel=1e-9)


def test_bergman_11_denominator():
    B = bergman_kernel((1, 1))
    f = parse_poly("1-x1-x2")[0]
    assert B.closed_form.den == f ** 3 or B.closed_form.den == -(f ** 3)


def test_rank_screen_on_bergman():
    report = rationality_screens(bergman_kernel((1, 1)).coefficient)
    assert report["rank_A"] == 1
    assert report["rank_screen"]["contiguity_target"] == [1, 1]
    assert report["count_screen"]["obstruction"] is False


def test_nonbergman_kernel_solves_its_system():
    phi = nonbergman_coefficient(3, 2)
    H = horn_from_ore_sato(phi)
    g = parse_poly("(1-x1)^2-x2-x3")[0]
    assert all(r.is_zero() for r in verify_horn_solution(H, RationalFn(MultiPoly.one(3), g)))
    # a wrong candidate must leave residuals
    assert not all(r.is_zero() for r in verify_horn_solution(H, RationalFn(MultiPoly.one(3), g * g)))


@given(st.integers(2, 3), st.lists(st.integers(-3, 3), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.lists(st.integers(1, 5), min_size=3, max_size=3))
@MANY
def test_series_coefficient_values_match_gamma(n, c_num, c_den, s):
    # Gamma(|s| - c) / prod Gamma(s_i - d_i), checked against math.gamma
    ones = tuple([1] * n)
    den = [(tuple(int(j == i) for j in range(n)), Fraction(c_den[i])) for i in range(n)]
    phi = OreSatoCoefficient(n, ones, [(ones, Fraction(c_num[0]) - Fraction(1, 2))], den)
    s = tuple(s[:n])
    got = phi.value(s)
    arg = sum(s) - (c_num[0] - 0.5)
    expected = math.gamma(arg)
    for i in range(n):
        a = s[i] - c_den[i]
        expected /= math.gamma(a) if a > 0 else float("inf")
    assert got == pytest.approx(expected, rel=1e-9, abs=1e-300)
