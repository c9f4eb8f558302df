from fractions import Fraction

import pytest

from jacobroid.metric import Metric
from jacobroid.sasaki import (AlmostContactTuple, PreconditionFailed, almost_contact_check, build_J,
                              contact_pseudo_metric_check, corollary39_check, derive_heisenberg_tuple,
                              j_squared_residual, lie_xi_g, nijenhuis_J, perturbed_metric_tuple,
                              reeb_derivative_residual, sasakian_residual, squashed_heisenberg_tuple,
                              theorem38_harness)
from jacobroid.symfun import Chart, Expr, matmul

from conftest import R3, heisenberg_eta

LINE = Chart(("z",))


@pytest.fixture(scope="module")
def fixture():
    return derive_heisenberg_tuple(1)


@pytest.fixture(scope="module")
def perturbed(fixture):
    return perturbed_metric_tuple(fixture)


@pytest.fixture(scope="module")
def squashed():
    return squashed_heisenberg_tuple()


class TestLineTuple:
    """``n = 0``: ``phi = 0``, ``xi = d/dz``, ``eta = dz`` on a line."""

    def line(self, eta=1, g=1):
        return AlmostContactTuple.build(LINE, [[0]], [1], [eta], [[g]])

    def test_is_sasakian(self):
        T = self.line()
        assert almost_contact_check(T)
        assert contact_pseudo_metric_check(T)
        assert sasakian_residual(T).is_zero()

    def test_scaled_eta_fails(self):
        assert not almost_contact_check(self.line(eta=2))

    def test_scaled_metric_fails(self):
        assert almost_contact_check(self.line(g=2))
        assert not contact_pseudo_metric_check(self.line(g=2))

    def test_even_dimension_rejected(self):
        with pytest.raises(ValueError):
            AlmostContactTuple.build(Chart(("x", "y")), [[0, 0], [0, 0]], [1, 0], [1, 0], [[1, 0], [0, 1]])

    def test_epsilon_follows_signature_index(self):
        T = AlmostContactTuple.build(LINE, [[0]], [1], [1], [[-1]], q=1)
        assert T.epsilon == -1
        assert contact_pseudo_metric_check(T)


class TestHeisenbergFixture:
    def test_data(self, fixture):
        assert fixture.eta == heisenberg_eta()
        assert fixture.xi[(2,)] == 1
        assert contact_pseudo_metric_check(fixture)

    def test_scaled_fixture(self):
        T = derive_heisenberg_tuple(Fraction(1, 2))
        assert sasakian_residual(T).is_zero()
        with pytest.raises(ValueError):
            derive_heisenberg_tuple(-1)

    def test_sasakian_consequences(self, fixture):
        assert sasakian_residual(fixture).is_zero()
        assert reeb_derivative_residual(fixture).is_zero()
        assert lie_xi_g(fixture).is_zero()
        assert nijenhuis_J(fixture).is_zero()

    def test_compatibility(self, fixture):
        rep = theorem38_harness(fixture)
        assert rep.compatible and rep.sasakian_side
        assert rep.verdict == "equivalent, both hold"
        assert rep.consistent


class TestPerturbed:
    def test_not_contact_metric(self, perturbed):
        assert almost_contact_check(perturbed)
        assert not contact_pseudo_metric_check(perturbed, require=False)
        with pytest.raises(PreconditionFailed):
            theorem38_harness(perturbed)

    def test_both_sides_fail(self, perturbed):
        rep = theorem38_harness(perturbed, require=False)
        assert not rep.compatible
        assert not rep.sasakian.is_zero()
        assert rep.equivalent and rep.consistent

    def test_cone_is_not_kahler(self, perturbed):
        assert "parallel" in corollary39_check(perturbed).failed()


class TestSquashed:
    def test_contact_metric_but_not_sasakian(self, squashed):
        assert contact_pseudo_metric_check(squashed)
        assert not sasakian_residual(squashed).is_zero()
        assert not nijenhuis_J(squashed).is_zero()

    def test_compatibility_fails_too(self, squashed):
        rep = theorem38_harness(squashed)
        assert not rep.compatible and not rep.sasakian_side
        assert rep.equivalent


class TestCone:
    def test_J_on_reeb_and_time(self, fixture):
        Jm = build_J(fixture)
        n = len(Jm)
        col = lambda b: [Jm[i][b] for i in range(n)]   # noqa: E731
        # J(xi) = -d/dt and J(d/dt) = xi with xi = d/dz
        assert [str(v) for v in col(2)] == ["0", "0", "0", "-1"]
        assert [str(v) for v in col(3)] == ["0", "0", "1", "0"]

    def test_J_squared(self, fixture, squashed):
        assert j_squared_residual(build_J(fixture)).is_zero()
        assert j_squared_residual(build_J(squashed)).is_zero()

    def test_kahler_on_fixture(self, fixture):
        rep = corollary39_check(fixture)
        assert rep.ok, rep.failed()

    def test_kahler_fails_on_squashed(self, squashed):
        assert "parallel" in corollary39_check(squashed).failed()

    def test_phi_squared_on_plane(self, fixture):
        P2 = matmul(fixture.phi, fixture.phi)
        eta, xi = fixture.eta, fixture.xi
        for i in range(3):
            for j in range(3):
                expect = -(1 if i == j else 0) + xi[(i,)] * eta[(j,)]
                assert (P2[i][j] - expect).is_zero()


def test_metric_change_keeps_structure(fixture):
    g2 = Metric("A", tuple(tuple(v * 2 for v in row) for row in fixture.g.gram))
    T = fixture.with_metric(g2)
    assert almost_contact_check(T)
    assert not contact_pseudo_metric_check(T, require=False)
    assert isinstance(T.eta[(0,)], Expr) and T.chart == R3
