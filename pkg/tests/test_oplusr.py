import pytest
from hypothesis import given, settings

from jacobroid.algebroid import check_jacobi_identity, tangent
from jacobroid.calculus import differential, schouten
from jacobroid.exterior import CoSec, MultiVec, evaluate, wedge
from jacobroid.jacobi import is_jacobi, phi_differential, standard_oplus
from jacobroid.oplusr import (DimensionMismatch, PairCoSec, PairVec, build_oplus, contact_check,
                              contact_to_jacobi, from_oplus, function_pair, make_pair, oplus_differential,
                              pair_eval, pair_wedge, reeb_field, to_oplus)
from jacobroid.symfun import Chart, Expr

from conftest import R2, R3, cosecs, heisenberg_eta, multivecs

x, y, z = (Expr.coord(R3, n) for n in R3.names)
T3 = tangent(R3)
J3 = standard_oplus(T3)
dx, dy, dz = (CoSec.basis(R3, 3, i) for i in range(3))


class TestPairs:
    def test_degrees_must_differ_by_one(self):
        with pytest.raises(ValueError):
            PairCoSec(dx, dy)
        with pytest.raises(TypeError):
            PairCoSec(dx, MultiVec.scalar(R3, 3, 1))

    def test_identification_round_trip(self):
        p = PairVec(wedge(MultiVec.basis(R3, 3, 0), MultiVec.basis(R3, 3, 1)), MultiVec.basis(R3, 3, 2))
        assert from_oplus(to_oplus(p)) == p
        assert to_oplus(p).rank == 4

    def test_pair_eval(self):
        # (X, f) evaluated on (alpha, g) is <alpha, X> + f g
        X = MultiVec.basis(R3, 3, 0).scale(y)
        p = PairVec(X, MultiVec.scalar(R3, 3, x))
        a = PairCoSec(dx, CoSec.scalar(R3, 3, z))
        assert pair_eval(p, [a]) == y + x * z
        with pytest.raises(ValueError):
            pair_eval(p, [a, a])

    def test_standard_cosection(self):
        one = function_pair(R3, 3, Expr.const(R3, 1))
        assert to_oplus(one) == CoSec.basis(R3, 4, 3)


class TestOplusAlgebroid:
    def test_extra_element_is_central_with_zero_anchor(self):
        B = build_oplus(T3)
        assert B.rank == 4
        assert all(v.is_zero() for v in B.anchor[3])
        assert all(B.structure_fn(a, 3, c).is_zero() for a in range(3) for c in range(4))
        assert check_jacobi_identity(B)

    def test_differential_of_pair(self):
        d = oplus_differential(T3, PairCoSec(CoSec.zero(R3, 3, 2), heisenberg_eta()))
        assert d.first.is_zero()
        assert d.second == -wedge(dx, dy)

    def test_twisted_differential_matches_pair_formula(self):
        al = CoSec.from_components(R3, 3, [x * y, z, 1])
        be = CoSec.scalar(R3, 3, x * z)
        lhs = phi_differential(J3, to_oplus(make_pair(al, be)))
        rhs = PairCoSec(differential(T3, al), al - differential(T3, be))
        assert from_oplus(lhs) == rhs

    def test_closed_pairs_are_exact(self):
        be = CoSec.from_components(R3, 3, [y, x * z, 0])
        assert phi_differential(J3, to_oplus(PairCoSec(differential(T3, be), be))).is_zero()
        shifted = PairCoSec(differential(T3, be), be + dx.scale(y))
        assert not phi_differential(J3, to_oplus(shifted)).is_zero()

    def test_poisson_embedding(self):
        # a Poisson bivector pi on TM gives the Jacobi pair (pi, 0)
        pi = wedge(MultiVec.basis(R3, 3, 0), MultiVec.basis(R3, 3, 1)).scale(z)
        assert schouten(T3, pi, pi).is_zero()
        assert is_jacobi(J3, to_oplus(make_pair(pi)))


class TestContact:
    def test_heisenberg_form(self):
        assert contact_check(heisenberg_eta())
        assert not contact_check(dx)
        assert contact_check(heisenberg_eta(), n=1)

    def test_dimension_errors(self):
        with pytest.raises(DimensionMismatch):
            contact_check(CoSec.basis(R2, 2, 0))
        with pytest.raises(DimensionMismatch):
            contact_check(heisenberg_eta(), n=2)

    def test_reeb_field(self):
        assert reeb_field(heisenberg_eta()) == MultiVec.basis(R3, 3, 2)
        with pytest.raises(ValueError):
            reeb_field(dx)

    def test_contact_pair_is_jacobi(self):
        pair = contact_to_jacobi(heisenberg_eta())
        assert is_jacobi(J3, to_oplus(pair))
        assert not is_jacobi(J3, to_oplus(make_pair(pair.first)))

    def test_standard_contact_form_on_r5(self):
        C = Chart(("x1", "y1", "x2", "y2", "z"))
        y1, y2 = Expr.coord(C, "y1"), Expr.coord(C, "y2")
        eta = CoSec.from_components(C, 5, [-y1, 0, -y2, 0, 1])
        assert contact_check(eta, n=2)
        pair = contact_to_jacobi(eta)
        assert pair.second == MultiVec.basis(C, 5, 4)
        assert is_jacobi(standard_oplus(tangent(C)), to_oplus(pair))


V = [multivecs(R3, 3, k) for k in range(3)]
W = [cosecs(R3, 3, k) for k in range(3)]


@settings(max_examples=30, deadline=None)
@given(V[2], V[1], W[1], W[1], W[0], W[0])
def test_pair_eval_matches_identification(P, Q, a1, a2, f1, f2):
    p = PairVec(P, Q)
    args = [PairCoSec(a1, f1), PairCoSec(a2, f2)]
    direct = pair_eval(p, args)
    via = evaluate(to_oplus(p), *(to_oplus(a) for a in args))
    assert (direct - via).is_zero()


@settings(max_examples=30, deadline=None)
@given(W[1], W[0], W[2], W[1])
def test_pair_wedge_matches_identification(a, b, c, d):
    u, v = PairCoSec(a, b), PairCoSec(c, d)
    assert to_oplus(pair_wedge(u, v)) == wedge(to_oplus(u), to_oplus(v))


@settings(max_examples=30, deadline=None)
@given(W[1], W[0])
def test_pair_differential_matches_identification(a, b):
    w = PairCoSec(a, b)
    assert to_oplus(oplus_differential(T3, w)) == differential(build_oplus(T3), to_oplus(w))
