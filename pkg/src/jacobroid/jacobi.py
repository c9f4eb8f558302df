"""Jacobi algebroids, the phi0-twisted calculus and Jacobi structures.

A Jacobi algebroid is a Lie algebroid ``A`` together with a closed
1-cosection ``phi0``.  A 2-section ``pi`` induces a skew algebroid structure
on the dual bundle, which is a Lie algebroid exactly when ``pi`` is Jacobi.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Tuple

from .algebroid import (AlgebroidDef, CheckResult, anchor_vector, bracket, check_anchor_morphism,
                        check_jacobi_identity)
from .calculus import differential, lie_derivative, schouten
from .exterior import CoSec, MultiVec, _Alternating, contract, evaluate, pairing, wedge
from .oplusr import build_oplus
from .symfun import Fn


class NotAJacobiAlgebroid(ValueError):
    pass


def _with_degree(elem: _Alternating, degree: int) -> _Alternating:
    if elem.degree == degree:
        return elem
    if not elem.is_zero():
        raise ValueError(f"nonzero element of degree {elem.degree}, expected {degree}")
    return type(elem).zero(elem.chart, elem.rank, degree)


@dataclass(frozen=True)
class JacobiAlgebroid:
    """A Lie algebroid with a ``d_A``-closed 1-cosection ``phi0``."""

    base: AlgebroidDef
    phi0: CoSec

    def __post_init__(self):
        p = self.phi0
        if not isinstance(p, CoSec) or p.degree != 1:
            raise TypeError("phi0 must be a 1-cosection")
        if p.chart != self.base.chart or p.rank != self.base.rank:
            raise ValueError("phi0 does not live on the base algebroid")
        if getattr(self, "_skip_checks", False):
            return
        if not differential(self.base, p).is_zero():
            raise NotAJacobiAlgebroid("d_A phi0 is not zero")
        if not check_jacobi_identity(self.base):
            raise NotAJacobiAlgebroid("the base bracket violates the Jacobi identity")

    @classmethod
    def unchecked(cls, base: AlgebroidDef, phi0: CoSec) -> "JacobiAlgebroid":
        """Skip the closedness and Jacobi checks (for converse experiments)."""
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_skip_checks", True)
        object.__setattr__(obj, "base", base)
        object.__setattr__(obj, "phi0", phi0)
        obj.__post_init__()
        return obj

    @classmethod
    def trivial(cls, base: AlgebroidDef) -> "JacobiAlgebroid":
        return cls(base, CoSec.zero(base.chart, base.rank, 1))

    @property
    def chart(self):
        return self.base.chart

    @property
    def rank(self) -> int:
        return self.base.rank


def standard_oplus(A: AlgebroidDef) -> JacobiAlgebroid:
    """``(A + R, (0, 1))``."""
    B = build_oplus(A)
    return JacobiAlgebroid(B, CoSec.basis(B.chart, B.rank, B.rank - 1))


# ---------------------------------------------------------------------------
# twisted calculus

def phi_schouten(J: JacobiAlgebroid, D1: MultiVec, D2: MultiVec) -> MultiVec:
    """``[D1,D2]_A + (a1-1) D1 ^ i(phi0) D2 - (-1)^(a1+1) (a2-1) i(phi0) D1 ^ D2``.

    Contraction of a degree-0 element is taken to be zero.
    """
    A, p = J.base, J.phi0
    a1, a2 = D1.degree, D2.degree
    deg = a1 + a2 - 1
    out = schouten(A, D1, D2)
    if deg < 0:
        return MultiVec.zero(A.chart, A.rank, deg)
    out = _with_degree(out, deg)
    if a1 != 1 and a2 >= 1:
        t = wedge(D1, contract(p, D2))
        if not t.is_zero():
            out = out + t.scale(a1 - 1)
    if a2 != 1 and a1 >= 1:
        t = wedge(contract(p, D1), D2)
        if not t.is_zero():
            c = -(a2 - 1) if (a1 + 1) % 2 == 0 else (a2 - 1)
            out = out + t.scale(c)
    return out


def phi_differential(J: JacobiAlgebroid, w: CoSec) -> CoSec:
    """``d_A w + phi0 ^ w``."""
    return differential(J.base, w) + wedge(J.phi0, w)


def phi_differential_alternating(J: JacobiAlgebroid, w: CoSec) -> CoSec:
    """The same operator from the alternating sum with the twisted anchor.

    The twisted anchor acts by ``rho(X) f + <phi0, X> f`` and the i-th term
    carries the sign ``(-1)^i`` (0-based), as in the untwisted differential.
    """
    A, p = J.base, J.phi0
    k = w.degree
    base = differential(A, w)
    if k + 1 > A.rank:
        return base
    extra = {}
    for K in combinations(range(A.rank), k + 1):
        s: Fn = A.zero
        for i, a in enumerate(K):
            pa = p[(a,)]
            if pa.is_zero():
                continue
            val = w[K[:i] + K[i + 1:]]
            if not val.is_zero():
                s = s + (pa * val if i % 2 == 0 else -(pa * val))
        if not s.is_zero():
            extra[K] = s
    return base + CoSec(A.chart, A.rank, k + 1, extra)


def phi_lie_derivative(J: JacobiAlgebroid, X: MultiVec, w: CoSec) -> CoSec:
    """Cartan form ``i_X d_phi + d_phi i_X``."""
    first = contract(X, phi_differential(J, w))
    if w.degree == 0:
        return first
    return first + phi_differential(J, contract(X, w))


def phi_lie_derivative_additive(J: JacobiAlgebroid, X: MultiVec, w: CoSec) -> CoSec:
    """``L_X w + <phi0, X> w``."""
    return lie_derivative(J.base, X, w) + w.scale(pairing(J.phi0, X))


def sharp(pi: MultiVec, xi: CoSec) -> MultiVec:
    """``pi^#`` with ``<pi^# xi, eta> = pi(xi, eta)``."""
    if pi.degree != 2 or xi.degree != 1:
        raise ValueError("sharp takes a 2-section and a 1-cosection")
    return contract(xi, pi)


def is_jacobi(J: JacobiAlgebroid, pi: MultiVec) -> CheckResult:
    res = phi_schouten(J, pi, pi)
    return CheckResult(res.is_zero(), {"[pi,pi]": res} if not res.is_zero() else {})


def induced_bracket(J: JacobiAlgebroid, pi: MultiVec, xi: CoSec, eta: CoSec) -> CoSec:
    """``L^phi_{pi# xi} eta - L^phi_{pi# eta} xi - d_phi pi(xi, eta)``."""
    A = J.base
    f = evaluate(pi, xi, eta)
    out = (phi_lie_derivative(J, sharp(pi, xi), eta)
           - phi_lie_derivative(J, sharp(pi, eta), xi))
    return out - phi_differential(J, CoSec.scalar(A.chart, A.rank, f))


# ---------------------------------------------------------------------------
# induced dual algebroid

def to_dual_section(w: CoSec) -> MultiVec:
    """A 1-cosection of ``A`` read as a section of the dual algebroid."""
    return MultiVec._raw(w.chart, w.rank, w.degree, dict(w.coeffs))


def from_dual_section(X: MultiVec) -> CoSec:
    return CoSec._raw(X.chart, X.rank, X.degree, dict(X.coeffs))


@dataclass(frozen=True)
class InducedDual:
    """The skew algebroid ``(A*, [.,.]_{pi,phi0}, rho_A o pi#)`` and ``X0 = -pi# phi0``."""

    jacobi: JacobiAlgebroid
    pi: MultiVec
    dual: AlgebroidDef
    X0: MultiVec

    def pair(self, check: bool = True) -> JacobiAlgebroid:
        """``(A*_{pi,phi0}, X0)``; ``check=False`` skips the Jacobi-algebroid validation."""
        phi = from_dual_section(self.X0)
        phi = CoSec._raw(self.dual.chart, self.dual.rank, 1, phi.coeffs)
        if check:
            return JacobiAlgebroid(self.dual, phi)
        return JacobiAlgebroid.unchecked(self.dual, phi)

    def bracket(self, xi: CoSec, eta: CoSec) -> CoSec:
        """Bracket of the realized dual algebroid (Leibniz-extended from coframe values)."""
        return from_dual_section(bracket(self.dual, to_dual_section(xi), to_dual_section(eta)))


def build_induced_dual(J: JacobiAlgebroid, pi: MultiVec) -> InducedDual:
    A = J.base
    r = A.rank
    cof = [CoSec.basis(A.chart, r, a) for a in range(r)]
    structure = {}
    for a in range(r):
        for b in range(a + 1, r):
            br = induced_bracket(J, pi, cof[a], cof[b])
            if not br.is_zero():
                structure[(a, b)] = br.components()
    anchor = [anchor_vector(A, sharp(pi, cof[a])) for a in range(r)]
    dual = AlgebroidDef(A.chart, r, anchor, structure, labels=[f"e^{a + 1}" for a in range(r)])
    X0 = -sharp(pi, J.phi0)
    return InducedDual(J, pi, dual, X0)


def check_induced_bracket(ID: InducedDual, samples: Iterable[Tuple[CoSec, CoSec]]) -> CheckResult:
    """Realized dual bracket versus ``induced_bracket`` on sampled cosection pairs."""
    res = {}
    for n, (xi, eta) in enumerate(samples):
        d = ID.bracket(xi, eta) - induced_bracket(ID.jacobi, ID.pi, xi, eta)
        if not d.is_zero():
            res[n] = d
    return CheckResult(not res, res)


def check_bracket_identity(J: JacobiAlgebroid, pi: MultiVec,
                           samples: Iterable[Tuple[CoSec, CoSec]]) -> CheckResult:
    """``1/2 [pi,pi]_phi(xi, eta, .) = [pi# xi, pi# eta]_A - pi# [xi, eta]_{pi,phi0}``."""
    A = J.base
    P = phi_schouten(J, pi, pi)
    res = {}
    for n, (xi, eta) in enumerate(samples):
        lhs = contract(eta, contract(xi, P)).scale(Fraction(1, 2))
        rhs = bracket(A, sharp(pi, xi), sharp(pi, eta)) - sharp(pi, induced_bracket(J, pi, xi, eta))
        d = lhs - rhs
        if not d.is_zero():
            res[n] = d
    return CheckResult(not res, res)


def dual_is_lie(ID: InducedDual) -> CheckResult:
    jac = check_jacobi_identity(ID.dual)
    anc = check_anchor_morphism(ID.dual)
    res = {("jacobiator",) + k: v for k, v in jac.residuals.items()}
    res.update({("anchor",) + k: v for k, v in anc.residuals.items()})
    return CheckResult(jac.ok and anc.ok, res)
