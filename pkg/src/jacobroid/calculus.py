"""Schouten bracket, algebroid differential and Lie derivative.

Sign convention: ``[D1, D2] = -(-1)^((a1-1)(a2-1)) [D2, D1]`` and
``[D1, D2 ^ D3] = [D1, D2] ^ D3 + (-1)^((a1+1) a2) D2 ^ [D1, D3]``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Dict, Iterable, Tuple

from .algebroid import AlgebroidDef, CheckResult, frame_anchor_apply
from .exterior import (CoSec, MultiVec, Section, _Alternating, contract, contract_or_zero,
                       evaluate, pairing, perm_sign, wedge)
from .symfun import Expr, Fn

__all__ = ["wedge", "contract", "schouten", "differential", "lie_derivative",
           "check_d_squared", "evaluate", "pairing"]


def _check_on(A: AlgebroidDef, *items: _Alternating):
    for it in items:
        if it.chart != A.chart or it.rank != A.rank:
            raise ValueError("element does not live on this algebroid")


def _unit(A: AlgebroidDef, idx: Tuple[int, ...]) -> MultiVec:
    return MultiVec._raw(A.chart, A.rank, len(idx), {tuple(sorted(idx)): Expr.const(A.chart, perm_sign(idx))} if idx else {(): Expr.const(A.chart, 1)})


class _Schouten:
    """Bracket ``[D1, .]`` for a fixed left argument, expanded by the rules."""

    def __init__(self, A: AlgebroidDef, D1: MultiVec):
        self.A = A
        self.D1 = D1
        self.k = D1.degree
        self._with_frame: Dict[int, MultiVec] = {}
        self._with_blade: Dict[Tuple[int, ...], MultiVec] = {}

    def frame_left(self, j: int) -> MultiVec:
        """``[e_j, D1]``: a degree-0 derivation of the exterior algebra."""
        A, D1 = self.A, self.D1
        out = MultiVec.zero(A.chart, A.rank, self.k)
        for I, f in D1.coeffs.items():
            rf = frame_anchor_apply(A, j, f)
            if not rf.is_zero():
                out = out + _unit(A, I).scale(rf)
            for p, a in enumerate(I):
                if a == j:
                    continue
                comps = A._c[j][a]
                for c, s in enumerate(comps):
                    if s.is_zero() or c in I[:p] + I[p + 1:]:
                        continue
                    idx = I[:p] + (c,) + I[p + 1:]
                    out = out + _unit(A, idx).scale(f * s)
        return out

    def with_frame(self, j: int) -> MultiVec:
        """``[D1, e_j] = -[e_j, D1]``."""
        if j not in self._with_frame:
            self._with_frame[j] = -self.frame_left(j)
        return self._with_frame[j]

    def with_function(self, g: Fn) -> MultiVec:
        """``[D1, g] = (-1)^k [g, D1]`` with ``[g, e_I] = sum_p (-1)^(p+1) (rho(e_ip) g) e_I\\ip``."""
        A, D1 = self.A, self.D1
        if self.k == 0:
            return MultiVec.zero(A.chart, A.rank, -1)
        out = MultiVec.zero(A.chart, A.rank, self.k - 1)
        for I, f in D1.coeffs.items():
            for p, a in enumerate(I):
                rg = frame_anchor_apply(A, a, g)
                if rg.is_zero():
                    continue
                sign = -1 if p % 2 == 0 else 1
                out = out + _unit(A, I[:p] + I[p + 1:]).scale(f * rg * sign)
        if self.k % 2:
            out = -out
        return out

    def with_blade(self, J: Tuple[int, ...]) -> MultiVec:
        """``[D1, e_j1 ^ ... ^ e_jl]`` by the right Leibniz rule."""
        if J in self._with_blade:
            return self._with_blade[J]
        A = self.A
        if not J:
            res = MultiVec.zero(A.chart, A.rank, self.k - 1)
        else:
            j, rest = J[0], J[1:]
            first = wedge(self.with_frame(j), _unit(A, rest))
            second = wedge(_unit(A, (j,)), self.with_blade(rest))
            if (self.k + 1) % 2 == 0:
                res = first + second
            else:
                res = first - second
        self._with_blade[J] = res
        return res

    def apply(self, D2: MultiVec) -> MultiVec:
        A = self.A
        deg = self.k + D2.degree - 1
        if self.k < 0 or D2.degree < 0:
            return MultiVec.zero(A.chart, A.rank, -1)
        out = MultiVec.zero(A.chart, A.rank, deg)
        if deg < 0 or deg > A.rank:
            return out
        for J, g in D2.coeffs.items():
            # [D1, g ^ e_J] = [D1, g] ^ e_J + g [D1, e_J]
            term1 = self.with_function(g)
            if not term1.is_zero():
                out = out + wedge(term1, _unit(A, J))
            blade = self.with_blade(J)
            if not blade.is_zero():
                out = out + blade.scale(g)
        if out.degree != deg:
            out = MultiVec._raw(A.chart, A.rank, deg, out.coeffs)
        return out


def schouten(A: AlgebroidDef, D1: MultiVec, D2: MultiVec) -> MultiVec:
    """Schouten bracket ``[D1, D2]_A`` of degree ``a1 + a2 - 1``."""
    if not isinstance(D1, MultiVec) or not isinstance(D2, MultiVec):
        raise TypeError("schouten bracket takes multivectors")
    _check_on(A, D1, D2)
    return _Schouten(A, D1).apply(D2)


def differential(A: AlgebroidDef, w: CoSec) -> CoSec:
    """``d_A w`` from the alternating-sum formula on frame tuples."""
    if not isinstance(w, CoSec):
        raise TypeError("differential takes a cosection")
    _check_on(A, w)
    k = w.degree
    out = {}
    if k + 1 > A.rank:
        return CoSec.zero(A.chart, A.rank, k + 1)
    for K in combinations(range(A.rank), k + 1):
        s: Fn = A.zero
        for i, a in enumerate(K):
            rest = K[:i] + K[i + 1:]
            val = w[rest]
            if not val.is_zero():
                r = frame_anchor_apply(A, a, val)
                if not r.is_zero():
                    s = s + (r if i % 2 == 0 else -r)
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                comps = A._c[K[i]][K[j]]
                rest = K[:i] + K[i + 1:j] + K[j + 1:]
                for c, f in enumerate(comps):
                    if f.is_zero():
                        continue
                    val = w[(c,) + rest]
                    if val.is_zero():
                        continue
                    t = f * val
                    s = s + (t if (i + j) % 2 == 0 else -t)
        if not s.is_zero():
            out[K] = s
    return CoSec._raw(A.chart, A.rank, k + 1, out)


def lie_derivative(A: AlgebroidDef, X: Section, target: _Alternating) -> _Alternating:
    """Cartan formula on cosections, ``[X, D]_A`` on multivectors."""
    if isinstance(target, MultiVec):
        return schouten(A, X, target)
    first = differential(A, contract_or_zero(X, target)) if target.degree > 0 else \
        CoSec.zero(A.chart, A.rank, target.degree)
    return first + contract(X, differential(A, target))


def check_d_squared(A: AlgebroidDef, samples: Iterable[CoSec]) -> CheckResult:
    res = {}
    for n, w in enumerate(samples):
        dd = differential(A, differential(A, w))
        if not dd.is_zero():
            res[n] = dd
    return CheckResult(not res, res)


def graded_antisymmetry_residual(A: AlgebroidDef, D1: MultiVec, D2: MultiVec) -> MultiVec:
    a1, a2 = D1.degree, D2.degree
    sign = -1 if ((a1 - 1) * (a2 - 1)) % 2 == 0 else 1
    return schouten(A, D1, D2) - schouten(A, D2, D1).scale(sign)


def graded_leibniz_residual(A: AlgebroidDef, D1: MultiVec, D2: MultiVec, D3: MultiVec) -> MultiVec:
    a1, a2 = D1.degree, D2.degree
    sign = 1 if ((a1 + 1) * a2) % 2 == 0 else -1
    lhs = schouten(A, D1, wedge(D2, D3))
    rhs = wedge(schouten(A, D1, D2), D3) + wedge(D2, schouten(A, D1, D3)).scale(sign)
    return lhs - rhs
