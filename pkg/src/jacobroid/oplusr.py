"""The bundle ``A + R`` and contact forms.

Sections of the k-th exterior power of ``A + R`` are handled as pairs
``(P, Q)`` of degrees ``(k, k-1)`` over ``A``.  In the frame of
:func:`build_oplus` the extra frame element ``e_r`` spans the trivial line,
and the pair corresponds to ``P + e_r ^ Q`` (likewise ``alpha + e^r ^ beta``
for cosections), which is what the evaluation formulas below reduce to.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .algebroid import AlgebroidDef, tangent
from .calculus import differential
from .exterior import CoSec, MultiVec, _Alternating, evaluate, wedge, wedge_all
from .symfun import Expr, SingularMatrix, invert


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class _Pair:
    first: _Alternating
    second: _Alternating

    def __post_init__(self):
        if type(self.first) is not type(self.second):
            raise TypeError("both halves of a pair have the same kind")
        if self.first.degree != self.second.degree + 1:
            raise ValueError("pair degrees must differ by exactly one")

    @property
    def degree(self) -> int:
        return self.first.degree

    def __add__(self, other):
        return type(self)(self.first + other.first, self.second + other.second)

    def __neg__(self):
        return type(self)(-self.first, -self.second)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        return type(self)(self.first.scale(f), self.second.scale(f))

    def is_zero(self) -> bool:
        return self.first.is_zero() and self.second.is_zero()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.first == other.first and self.second == other.second

    __hash__ = None


class PairVec(_Pair):
    """``(P, Q)`` with P a k-multivector and Q a (k-1)-multivector of ``A``."""


class PairCoSec(_Pair):
    """``(alpha, beta)`` with alpha a k-cosection and beta a (k-1)-cosection."""


def _pair_type(elem_type):
    return PairVec if elem_type is MultiVec else PairCoSec


def _degree_zero(cls, chart, rank):
    return cls.zero(chart, rank, -1)


def make_pair(first: _Alternating, second: _Alternating | None = None):
    """Pair with the second half defaulting to zero of the right degree."""
    if second is None:
        second = type(first).zero(first.chart, first.rank, first.degree - 1)
    return _pair_type(type(first))(first, second)


def function_pair(chart, rank, f, kind=CoSec):
    """Degree-1 pair ``(0, f)``; ``(0, 1)`` is the standard 1-cosection."""
    return _pair_type(kind)(kind.zero(chart, rank, 1), kind.scalar(chart, rank, f))


# ---------------------------------------------------------------------------

def build_oplus(A: AlgebroidDef) -> AlgebroidDef:
    """``A + R`` with ``[(X,f),(Y,g)] = ([X,Y], rho(X)g - rho(Y)f)`` and anchor ``rho o pr1``.

    The extra frame element has zero anchor, and the displayed bracket gives
    it vanishing brackets with every frame element.
    """
    r = A.rank
    anchor = [list(row) for row in A.anchor] + [[A.zero] * A.chart.dim]
    structure = {k: list(v) + [A.zero] for k, v in A.structure_dict().items()}
    return AlgebroidDef(A.chart, r + 1, anchor, structure, A.labels + ("1",))


def to_oplus(pair: _Pair) -> _Alternating:
    """The element of the rank-(r+1) exterior algebra that ``pair`` stands for."""
    P, Q = pair.first, pair.second
    k = P.degree
    r = P.rank
    cls = type(P)
    coeffs = {}
    for I, f in P.coeffs.items():
        coeffs[I] = f
    sign = 1 if (k + 1) % 2 == 0 else -1
    for J, g in Q.coeffs.items():
        coeffs[J + (r,)] = g if sign > 0 else -g
    return cls._raw(P.chart, r + 1, k, coeffs)


def from_oplus(elem: _Alternating):
    r = elem.rank - 1
    k = elem.degree
    cls = type(elem)
    P, Q = {}, {}
    sign = 1 if (k + 1) % 2 == 0 else -1
    for I, f in elem.coeffs.items():
        if I and I[-1] == r:
            Q[I[:-1]] = f if sign > 0 else -f
        else:
            P[I] = f
    return _pair_type(cls)(cls._raw(elem.chart, r, k, P), cls._raw(elem.chart, r, k - 1, Q))


def pair_eval(pair: _Pair, args: Sequence[_Pair]):
    """Evaluate ``(P,Q)`` on degree-1 pairs ``(alpha_i, f_i)`` (or the dual).

    ``P(a_1..a_k) + sum_i (-1)^(i+1) f_i Q(a_1..^a_i..a_k)`` with 1-based i.
    """
    k = pair.degree
    if len(args) != k:
        raise ValueError(f"arity {len(args)} does not match degree {k}")
    for a in args:
        if a.degree != 1 or type(a.first) is type(pair.first):
            raise TypeError("arguments are degree-1 pairs of the dual kind")
    P, Q = pair.first, pair.second
    total = evaluate(P, *(a.first for a in args))
    for i, a in enumerate(args):
        f = a.second.function
        if f.is_zero():
            continue
        rest = [b.first for j, b in enumerate(args) if j != i]
        term = f * evaluate(Q, *rest)
        total = total + (term if i % 2 == 0 else -term)
    return total


def pair_wedge(u: _Pair, v: _Pair) -> _Pair:
    """``(P1,Q1) ^ (P2,Q2) = (P1^P2, Q1^P2 + (-1)^a1 P1^Q2)``."""
    first = wedge(u.first, v.first)
    s2 = wedge(u.first, v.second)
    if u.degree % 2:
        s2 = -s2
    second = wedge(u.second, v.first) + s2
    return type(u)(first, second)


def oplus_differential(A: AlgebroidDef, w: PairCoSec) -> PairCoSec:
    """``d(alpha, beta) = (d alpha, -d beta)``."""
    second = differential(A, w.second) if w.second.degree >= 0 else \
        CoSec.zero(A.chart, A.rank, 0)
    return PairCoSec(differential(A, w.first), -second)


# ---------------------------------------------------------------------------
# contact forms

def contact_volume(beta: CoSec) -> CoSec:
    """``beta ^ (d beta)^n`` on ``TM`` of a ``(2n+1)``-dimensional chart."""
    chart = beta.chart
    if chart.dim % 2 == 0:
        raise DimensionMismatch("contact forms need an odd-dimensional chart")
    if beta.degree != 1 or beta.rank != chart.dim:
        raise DimensionMismatch("beta must be a 1-form on the tangent bundle")
    n = (chart.dim - 1) // 2
    db = differential(tangent(chart), beta)
    return wedge_all([beta] + [db] * n)


def contact_check(beta: CoSec, n: int | None = None) -> bool:
    if n is not None and beta.chart.dim != 2 * n + 1:
        raise DimensionMismatch(f"chart dimension {beta.chart.dim} is not 2*{n}+1")
    return not contact_volume(beta).is_zero()


def eta_flat_matrix(eta: CoSec):
    """Matrix of ``X -> iota_X d eta + <eta, X> eta``; column j is the image of ``d/dx_j``."""
    chart = eta.chart
    T = tangent(chart)
    deta = differential(T, eta)
    m = chart.dim
    M = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            M[i][j] = deta[(j, i)] + eta[(j,)] * eta[(i,)]
    return M


def _apply(M, v):
    chart = v[0].chart
    out = []
    for row in M:
        s = Expr.zero(chart)
        for a, b in zip(row, v):
            if not a.is_zero() and not b.is_zero():
                s = s + a * b
        out.append(s)
    return out


def reeb_field(eta: CoSec) -> MultiVec:
    """The Reeb field: solves ``iota_xi d eta = 0`` and ``<eta, xi> = 1``.

    Both conditions together say ``eta_flat(xi) = eta``.
    """
    if not contact_check(eta):
        raise ValueError("eta is not a contact form")
    inv = invert(eta_flat_matrix(eta))
    comps = _apply(inv, eta.components())
    return MultiVec.from_components(eta.chart, eta.chart.dim, comps)


def contact_to_jacobi(eta: CoSec) -> PairVec:
    """Jacobi pair ``(Lambda, E)`` of a contact form, with ``E`` the Reeb field.

    ``Lambda(alpha, beta) = d eta(flat^-1 alpha, flat^-1 beta)``.  With the
    bracket convention of :mod:`jacobroid.calculus` the pair satisfies
    ``[Lambda, Lambda] = -2 E ^ Lambda`` and ``[E, Lambda] = 0``, which is
    what the twisted bracket on ``(TM + R, (0, 1))`` requires.
    """
    chart = eta.chart
    if not contact_check(eta):
        raise ValueError("eta is not a contact form")
    try:
        inv = invert(eta_flat_matrix(eta))
    except SingularMatrix as exc:
        raise ValueError("eta_flat is not invertible") from exc
    T = tangent(chart)
    deta = differential(T, eta)
    m = chart.dim
    cols = [MultiVec.from_components(chart, m, [inv[i][a] for i in range(m)]) for a in range(m)]
    coeffs = {}
    for a, b in combinations(range(m), 2):
        coeffs[(a, b)] = evaluate(deta, cols[a], cols[b])
    Lam = MultiVec(chart, m, 2, coeffs)
    E = MultiVec.from_components(chart, m, _apply(inv, eta.components()))
    return PairVec(Lam, E)
