"""Seeded random functions and sections for property checks.

Coefficients come from a bounded pool: monomials of total degree at most 2,
exponential weights ``-t, 0, t`` along an optional time coordinate, and
coefficients in ``{1, -1, 2, -2, 1/2}``.  The pool keeps every identity
exact while bounding term growth.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import List, Sequence

from .exterior import CoSec, MultiVec
from .symfun import Chart, Expr

COEFFS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2))


def monomials(chart: Chart, max_degree: int = 2) -> List[tuple]:
    out = []
    for d in range(max_degree + 1):
        for combo in combinations_with_replacement(range(chart.dim), d):
            m = [0] * chart.dim
            for i in combo:
                m[i] += 1
            out.append(tuple(m))
    return out


class Pool:
    """Draws bounded random Exprs and alternating elements from one ``random.Random``."""

    def __init__(self, chart: Chart, seed: int = 0, time_name: str | None = None,
                 max_terms: int = 3, max_degree: int = 2):
        self.chart = chart
        self.rng = random.Random(seed)
        self.max_terms = max_terms
        self.monos = monomials(chart, max_degree)
        zero = (Fraction(0),) * chart.dim
        self.weights = [zero]
        if time_name is not None and time_name in chart.names:
            ti = chart.index(time_name)
            for s in (-1, 1):
                w = list(zero)
                w[ti] = Fraction(s)
                self.weights.append(tuple(w))

    def expr(self, allow_zero: bool = True) -> Expr:
        rng = self.rng
        n = rng.randint(0 if allow_zero else 1, self.max_terms)
        e = Expr.zero(self.chart)
        for _ in range(n):
            e = e + Expr.term(self.chart, rng.choice(COEFFS), rng.choice(self.monos),
                              rng.choice(self.weights))
        if not allow_zero and e.is_zero():
            return self.expr(allow_zero)
        return e

    def _alternating(self, cls, rank: int, degree: int, density: float):
        """Nonzero whenever ``0 <= degree <= rank``; ``density`` thins the components."""
        keys = list(combinations(range(rank), degree)) if 0 <= degree <= rank else []
        coeffs = {idx: self.expr(allow_zero=False) for idx in keys if self.rng.random() < density}
        if keys and not coeffs:
            coeffs[self.rng.choice(keys)] = self.expr(allow_zero=False)
        return cls(self.chart, rank, degree, coeffs)

    def multivec(self, rank: int, degree: int, density: float = 0.6) -> MultiVec:
        return self._alternating(MultiVec, rank, degree, density)

    def cosec(self, rank: int, degree: int, density: float = 0.6) -> CoSec:
        return self._alternating(CoSec, rank, degree, density)

    def two_section(self, rank: int) -> MultiVec:
        return self.multivec(rank, 2)

    def degrees(self, k: int, lo: int = 0, hi: int = 3) -> Sequence[int]:
        return [self.rng.randint(lo, hi) for _ in range(k)]
