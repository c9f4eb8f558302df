import pytest
from hypothesis import given, settings

from jacobroid.algebroid import AlgebroidDef, lie_algebra, tangent
from jacobroid.calculus import differential, lie_derivative, schouten
from jacobroid.exterior import CoSec, MultiVec, wedge
from jacobroid.jacobi import (JacobiAlgebroid, NotAJacobiAlgebroid, build_induced_dual, check_bracket_identity,
                              check_induced_bracket, dual_is_lie, from_dual_section, induced_bracket, is_jacobi,
                              phi_differential, phi_differential_alternating, phi_lie_derivative,
                              phi_lie_derivative_additive, phi_schouten, sharp)
from jacobroid.symfun import Expr

from conftest import R2, R3, cosecs, multivecs

x, y = (Expr.coord(R2, n) for n in R2.names)
T2 = tangent(R2)
dx, dy = (CoSec.basis(R2, 2, i) for i in range(2))
X, Y = (MultiVec.basis(R2, 2, i) for i in range(2))

AFF = lie_algebra({(0, 1): [0, 1]}, 2)
AFF_J = JacobiAlgebroid(AFF, CoSec.basis(AFF.chart, 2, 0))


class TestJacobiAlgebroid:
    def test_rejects_non_closed_phi0(self):
        with pytest.raises(NotAJacobiAlgebroid):
            JacobiAlgebroid(T2, dx.scale(y))

    def test_rejects_non_lie_base(self):
        C = R3
        xc = Expr.coord(C, "x")
        A = AlgebroidDef(C, 3, [[0, 0, 0], [0, 0, 0], [1, 0, 0]], {(0, 1): [0, 0, xc], (0, 2): [0, 1, 0]})
        with pytest.raises(NotAJacobiAlgebroid):
            JacobiAlgebroid.trivial(A)

    def test_unchecked_skips_validation(self):
        J = JacobiAlgebroid.unchecked(T2, dx.scale(y))
        assert not differential(T2, J.phi0).is_zero()


class TestTwistedCalculus:
    def test_zero_phi0_reduces_to_untwisted(self):
        J = JacobiAlgebroid.trivial(T2)
        pi = wedge(X, Y).scale(x)
        assert phi_schouten(J, pi, pi) == schouten(T2, pi, pi)
        assert phi_differential(J, dy.scale(x)) == differential(T2, dy.scale(x))

    def test_functions_commute(self):
        f, g = MultiVec.scalar(AFF.chart, 2, 1), MultiVec.scalar(AFF.chart, 2, 2)
        assert phi_schouten(AFF_J, f, g).degree == -1
        assert phi_schouten(AFF_J, f, g).is_zero()

    def test_twisted_differential_of_constant(self):
        one = CoSec.scalar(AFF.chart, 2, 1)
        assert phi_differential(AFF_J, one) == CoSec.basis(AFF.chart, 2, 0)

    def test_sharp(self):
        pi = wedge(X, Y)
        assert sharp(pi, dx) == Y
        assert sharp(pi, dy) == -X
        with pytest.raises(ValueError):
            sharp(X, dx)


class TestJacobiStructures:
    def test_constant_bivector_on_plane(self):
        J = JacobiAlgebroid.trivial(T2)
        assert is_jacobi(J, wedge(X, Y))

    def test_affine_point_example(self):
        e12 = MultiVec.basis(AFF.chart, 2, 0, 1)
        assert is_jacobi(AFF_J, e12)

    def test_contact_induced_dual(self, contact_jacobi):
        J, _, pi = contact_jacobi
        ID = build_induced_dual(J, pi)
        assert ID.X0 == -MultiVec.basis(R3, 4, 2)
        assert dual_is_lie(ID)
        X0 = from_dual_section(ID.X0)
        assert differential(ID.dual, CoSec(ID.dual.chart, 4, 1, dict(X0.coeffs))).is_zero()

    def test_bracket_identity_on_coframe(self, contact_jacobi):
        J, _, pi = contact_jacobi
        cof = [CoSec.basis(R3, 4, a) for a in range(4)]
        pairs = [(cof[a], cof[b]) for a in range(4) for b in range(a + 1, 4)]
        assert check_bracket_identity(J, pi, pairs)
        ID = build_induced_dual(J, pi)
        assert check_induced_bracket(ID, pairs)

    def test_non_jacobi_bivector_has_non_lie_dual(self):
        J = JacobiAlgebroid.trivial(tangent(R3))
        # d/dx ^ (d/dy + x d/dz): the two fields do not span an integrable plane
        dxv, dyv, dzv = (MultiVec.basis(R3, 3, i) for i in range(3))
        pi = wedge(dxv, dyv + dzv.scale(Expr.coord(R3, "x")))
        assert not is_jacobi(J, pi)
        assert not dual_is_lie(build_induced_dual(J, pi))


W2 = [cosecs(R2, 2, k) for k in range(3)]
TWIST = JacobiAlgebroid(T2, dx + dy.scale(2))


@settings(max_examples=40, deadline=None)
@given(W2[0], W2[1])
def test_twisted_differential_forms_agree_and_square_to_zero(f, w):
    for v in (f, w):
        assert phi_differential(TWIST, v) == phi_differential_alternating(TWIST, v)
        assert phi_differential(TWIST, phi_differential(TWIST, v)).is_zero()


@settings(max_examples=40, deadline=None)
@given(multivecs(R2, 2, 1), W2[1])
def test_lie_derivative_forms_agree(Xv, w):
    assert phi_lie_derivative(TWIST, Xv, w) == phi_lie_derivative_additive(TWIST, Xv, w)


@settings(max_examples=30, deadline=None)
@given(multivecs(R2, 2, 2), W2[1], W2[1])
def test_induced_bracket_is_antisymmetric(pi, a, b):
    lhs = induced_bracket(TWIST, pi, a, b)
    assert (lhs + induced_bracket(TWIST, pi, b, a)).is_zero()


@settings(max_examples=30, deadline=None)
@given(multivecs(R2, 2, 2), W2[1], W2[1])
def test_bracket_identity_holds_for_every_two_section(pi, a, b):
    assert check_bracket_identity(TWIST, pi, [(a, b)])


def test_lie_derivative_of_phi0_free_case():
    J = JacobiAlgebroid.trivial(T2)
    w = dy.scale(x * x)
    assert phi_lie_derivative(J, X, w) == lie_derivative(T2, X, w)
