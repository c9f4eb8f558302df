import pytest
from hypothesis import given, settings

from jacobroid.algebroid import tangent
from jacobroid.calculus import schouten
from jacobroid.exterior import CoSec, MultiVec
from jacobroid.jacobi import JacobiAlgebroid, phi_schouten, standard_oplus
from jacobroid.oplusr import make_pair, to_oplus
from jacobroid.poissonization import (NotJacobi, build_bar, build_hat, check_tangent_isomorphism, exp_t,
                                      manifold_poissonization, poissonization_identity_residual, poissonize,
                                      tilde_differential, tilde_differential_closed_form, time_chart)
from jacobroid.symfun import Chart, Expr

from conftest import R2, R3, multivecs

x, y = (Expr.coord(R2, n) for n in R2.names)
T2 = tangent(R2)
dx, dy = (CoSec.basis(R2, 2, i) for i in range(2))
TWIST = JacobiAlgebroid(T2, dx + dy.scale(2))


class TestTimeChart:
    def test_appends_time(self):
        assert time_chart(R2).names == ("x", "y", "t")
        assert time_chart(R2, "s").names == ("x", "y", "s")

    def test_collision_raises(self):
        with pytest.raises(ValueError):
            time_chart(Chart(("x", "t")))


class TestTildeAlgebroids:
    def test_bar_differential_of_time_is_phi0(self):
        bar = build_bar(TWIST)
        t = CoSec.scalar(bar.chart, 2, Expr.coord(bar.chart, "t"))
        assert tilde_differential(bar, t) == bar.lift(TWIST.phi0)

    def test_both_realizations_are_lie(self):
        assert build_bar(TWIST).is_lie()
        assert build_hat(TWIST).is_lie()

    def test_non_closed_phi0_breaks_bar(self):
        J = JacobiAlgebroid.unchecked(T2, dx.scale(y))
        assert not build_bar(J).is_lie()
        assert not build_hat(J).is_lie()

    def test_closed_form_differentials(self):
        for T in (build_bar(TWIST), build_hat(TWIST)):
            ch = T.chart
            t = Expr.coord(ch, "t")
            w = CoSec.from_components(ch, 2, [t * Expr.coord(ch, "x"), exp_t(ch, -1)])
            f = CoSec.scalar(ch, 2, t * t * Expr.coord(ch, "y"))
            for v in (f, w):
                assert tilde_differential(T, v) == tilde_differential_closed_form(T, v)

    def test_tangent_isomorphism(self):
        T = build_bar(standard_oplus(T2))
        assert check_tangent_isomorphism(T)
        assert not check_tangent_isomorphism(build_bar(TWIST))


class TestPoissonization:
    def test_jacobi_gives_poisson(self, contact_jacobi):
        J, _, pi = contact_jacobi
        bar = build_bar(J)
        pt = poissonize(J, pi)
        assert schouten(bar.realized, pt, pt).is_zero()

    def test_manifold_formula(self, contact_jacobi):
        _, pair, _ = contact_jacobi
        Pi = manifold_poissonization(pair.first, pair.second)
        assert Pi.chart.names == ("x", "y", "z", "t")
        assert schouten(tangent(Pi.chart), Pi, Pi).is_zero()

    def test_manifold_formula_rejects_non_jacobi(self, contact_jacobi):
        _, pair, _ = contact_jacobi
        with pytest.raises(NotJacobi):
            manifold_poissonization(pair.first, MultiVec.zero(pair.first.chart, 3, 1))

    def test_non_jacobi_stays_non_poisson(self, contact_jacobi):
        J, pair, _ = contact_jacobi
        pi = to_oplus(make_pair(pair.first))
        assert not phi_schouten(J, pi, pi).is_zero()
        bar = build_bar(J)
        pt = poissonize(J, pi)
        assert not schouten(bar.realized, pt, pt).is_zero()


TWIST3 = JacobiAlgebroid(tangent(R3), CoSec.from_components(R3, 3, [1, 0, Expr.coord(R3, "z")]))


@settings(max_examples=20, deadline=None)
@given(multivecs(R3, 3, 2))
def test_identity_on_random_two_sections(pi):
    assert poissonization_identity_residual(TWIST3, pi).is_zero()


def test_identity_on_contact_algebroid(contact_jacobi):
    J, _, pi = contact_jacobi
    assert poissonization_identity_residual(J, pi).is_zero()
    skew = to_oplus(contact_jacobi[1]) + MultiVec.basis(J.chart, 4, 0, 3).scale(Expr.coord(J.chart, "y"))
    assert poissonization_identity_residual(J, skew).is_zero()
