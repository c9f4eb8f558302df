import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from jacobroid.symfun import (Chart, ChartMismatch, Expr, Frac, SingularMatrix, det, identity, invert,
                              make_frac, matmul)

from conftest import R2, R2T, exprs

C = Chart(("x", "y", "t"))
x, y, t = (Expr.coord(C, n) for n in C.names)
E_T = Expr.exp(C, {"t": 1})
E_MT = Expr.exp(C, {"t": -1})


class TestChart:
    def test_rejects_duplicates_and_reserved(self):
        with pytest.raises(ValueError):
            Chart(("x", "x"))
        with pytest.raises(ValueError):
            Chart(("exp",))
        with pytest.raises(ValueError):
            Chart(())

    def test_extension_collision_raises(self):
        with pytest.raises(ValueError):
            R2.extended("x")


class TestArithmetic:
    def test_additive_inverse(self):
        assert (x + (-x)).is_zero()

    def test_like_terms_merge(self):
        assert 2 * x + 3 * x == 5 * x
        assert E_MT + E_MT == 2 * E_MT

    def test_exponent_cancellation(self):
        assert E_T * E_MT == 1
        assert E_MT * E_MT == Expr.exp(C, {"t": -2})

    def test_product_of_coordinates(self):
        assert (x * y).terms() == [(Fraction(1), (1, 1, 0), (0, 0, 0))]

    def test_chart_mismatch(self):
        with pytest.raises(ChartMismatch):
            _ = Expr.coord(R2, "x") + x

    def test_power(self):
        assert (x + 1) ** 2 == x * x + 2 * x + 1
        assert (x + y) ** 0 == 1


class TestDiff:
    def test_polynomial(self):
        assert (x * x * y).diff("x") == 2 * x * y

    def test_exponential(self):
        assert E_MT.diff("t") == -E_MT
        e2x = Expr.exp(C, {"x": 2})
        assert (e2x * y).diff("x") == 2 * e2x * y

    def test_unknown_coordinate(self):
        with pytest.raises(KeyError):
            x.diff("w")


class TestZeroTest:
    def test_examples(self):
        assert (E_T * E_MT - 1).is_zero()
        assert not (x - y).is_zero()
        assert ((x * y).diff("x") - y).is_zero()


class TestEval:
    def test_polynomial_value(self):
        v = (x * x * y).eval({"x": 2, "y": 3, "t": 0})
        assert v.rational == 12

    def test_exponential_value(self):
        assert E_MT.eval({"x": 0, "y": 0, "t": 0}).rational == 1
        v = (x + E_T).eval({"x": 1, "y": 0, "t": 1})
        assert v.rational is None
        assert v.approx == pytest.approx(1 + math.e, abs=1e-9)

    def test_missing_coordinate(self):
        with pytest.raises(KeyError):
            x.eval({"x": 1})


class TestExtend:
    def test_examples(self):
        xy = Expr.coord(R2, "x") * Expr.coord(R2, "y")
        assert Expr.coord(R2, "x").extend(R2T) == Expr.coord(R2T, "x")
        assert Expr.const(R2, 1).extend(R2T) == 1
        assert xy.extend(R2T) * Expr.exp(R2T, {"t": -1}) == \
            Expr.coord(R2T, "x") * Expr.coord(R2T, "y") * Expr.exp(R2T, {"t": -1})

    def test_restrict_round_trip(self):
        f = Expr.coord(R2, "x") ** 2 - Expr.coord(R2, "y")
        assert f.extend(R2T).restrict(R2) == f


class TestQuotients:
    def test_exact_division_returns_expr(self):
        q = make_frac(x * x - 1, x - 1)
        assert isinstance(q, Expr) and q == x + 1

    def test_inexact_division_is_frac(self):
        q = make_frac(x, 1 + x * x)
        assert isinstance(q, Frac)
        assert (q * (1 + x * x) - x).is_zero()
        assert q.diff("x") == make_frac(1 - x * x, (1 + x * x) ** 2)

    def test_inverse_and_det(self):
        M = [[1 + y * y, -y], [-y, Expr.const(C, 1)]]
        assert det(M) == 1
        inv = invert(M)
        P = matmul(M, inv)
        assert all((P[i][j] - (1 if i == j else 0)).is_zero() for i in range(2) for j in range(2))

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            invert([[x, y], [2 * x, 2 * y]])
        assert identity(C, 3)[1][1] == 1


# ---------------------------------------------------------------------------
# properties

E = exprs(R2T, time_name="t")


@settings(max_examples=60, deadline=None)
@given(E, E, E)
def test_ring_axioms(a, b, c):
    assert (a + b) - (b + a) == 0
    assert (a * b) - (b * a) == 0
    assert (a * b) * c - a * (b * c) == 0
    assert a * (b + c) - (a * b + a * c) == 0
    assert (a - a).is_zero()


@settings(max_examples=60, deadline=None)
@given(E, E)
def test_leibniz_and_commuting_partials(a, b):
    for n in R2T.names:
        assert ((a * b).diff(n) - (a.diff(n) * b + a * b.diff(n))).is_zero()
    assert (a.diff("x").diff("t") - a.diff("t").diff("x")).is_zero()


@settings(max_examples=60, deadline=None)
@given(E, E)
def test_eval_is_a_ring_homomorphism(a, b):
    p = {"x": Fraction(1, 2), "y": Fraction(-3, 2), "t": Fraction(1, 3)}
    pa, pb, pab = a.eval(p).approx, b.eval(p).approx, (a * b).eval(p).approx
    assert pab == pytest.approx(pa * pb, rel=1e-12, abs=1e-9)
    q = {"x": Fraction(2), "y": Fraction(-1, 3), "t": Fraction(0)}
    assert (a * b).eval(q).rational == a.eval(q).rational * b.eval(q).rational


@settings(max_examples=40, deadline=None)
@given(E)
def test_to_str_is_stable_canonical_form(a):
    assert str(a) == str(a + Expr.zero(R2T))
    assert (a + a).terms() == (2 * a).terms()
