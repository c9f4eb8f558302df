"""Anchored bundles with a bracket on a fixed global frame.

The bracket of frame sections is given by structure functions
``[e_a, e_b] = sum_c c^c_ab e_c`` and extended to arbitrary sections through
the Leibniz rule with respect to the anchor, so every :class:`AlgebroidDef`
is a skew algebroid by construction.  Whether it is a Lie algebroid is a
property to be checked (:func:`jacobiator`, :func:`check_anchor_morphism`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from .exterior import MultiVec, Section, frame
from .symfun import Chart, Expr, Fn, as_fn


class ShapeMismatch(ValueError):
    pass


class AlgebroidDef:
    """Rank-r skew algebroid over a chart.

    ``anchor[a][i]`` is the i-th coordinate component of ``rho(e_a)``;
    ``structure`` maps ``(a, b)`` with ``a < b`` to the r components of
    ``[e_a, e_b]``.  Indices are 0-based.
    """

    def __init__(self, chart: Chart, rank: int, anchor: Sequence[Sequence] | None = None,
                 structure: Mapping[Tuple[int, int], Sequence] | None = None,
                 labels: Sequence[str] | None = None):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.chart = chart
        self.rank = rank
        self.labels = tuple(labels) if labels else tuple(f"e{a + 1}" for a in range(rank))
        zero = Expr.zero(chart)
        if anchor is None:
            anchor = [[zero] * chart.dim for _ in range(rank)]
        if len(anchor) != rank or any(len(row) != chart.dim for row in anchor):
            raise ShapeMismatch(f"anchor must be {rank}x{chart.dim}")
        self.anchor: Tuple[Tuple[Fn, ...], ...] = tuple(
            tuple(as_fn(v, chart) for v in row) for row in anchor)
        c: List[List[Tuple[Fn, ...]]] = [[(zero,) * rank for _ in range(rank)] for _ in range(rank)]
        for (a, b), comps in (structure or {}).items():
            if a == b:
                raise ValueError(f"structure entry on the diagonal ({a + 1},{b + 1})")
            if not (0 <= a < rank and 0 <= b < rank):
                raise IndexError(f"structure index ({a + 1},{b + 1}) out of range")
            if len(comps) != rank:
                raise ShapeMismatch("structure vectors must have rank components")
            comps = tuple(as_fn(v, chart) for v in comps)
            if a > b:
                a, b = b, a
                comps = tuple(-v for v in comps)
            c[a][b] = comps
            c[b][a] = tuple(-v for v in comps)
        self._c = tuple(tuple(row) for row in c)

    # basic data -------------------------------------------------------
    def structure_fn(self, a: int, b: int, c: int) -> Fn:
        return self._c[a][b][c]

    def frame_bracket(self, a: int, b: int) -> Section:
        return MultiVec.from_components(self.chart, self.rank, self._c[a][b])

    def structure_dict(self) -> Dict[Tuple[int, int], Tuple[Fn, ...]]:
        return {(a, b): self._c[a][b] for a in range(self.rank) for b in range(a + 1, self.rank)
                if any(not v.is_zero() for v in self._c[a][b])}

    @property
    def zero(self) -> Expr:
        return Expr.zero(self.chart)

    def frame(self):
        return frame(self.chart, self.rank)

    def section(self, comps: Sequence) -> Section:
        return MultiVec.from_components(self.chart, self.rank, comps)

    def extend(self, chart: Chart) -> "AlgebroidDef":
        """Same algebroid with coefficient functions allowed to depend on new coordinates.

        The anchor gets zero components along the new coordinates.
        """
        pos = [chart.index(n) for n in self.chart.names]
        anchor = []
        for row in self.anchor:
            new = [Expr.zero(chart)] * chart.dim
            for j, p in enumerate(pos):
                new[p] = row[j].extend(chart)
            anchor.append(new)
        structure = {k: [v.extend(chart) for v in comps] for k, comps in self.structure_dict().items()}
        return AlgebroidDef(chart, self.rank, anchor, structure, self.labels)

    def same_as(self, other: "AlgebroidDef") -> bool:
        if self.chart != other.chart or self.rank != other.rank:
            return False
        for r1, r2 in zip(self.anchor, other.anchor):
            if any(not (u - v).is_zero() for u, v in zip(r1, r2)):
                return False
        for a in range(self.rank):
            for b in range(self.rank):
                if any(not (u - v).is_zero() for u, v in zip(self._c[a][b], other._c[a][b])):
                    return False
        return True

    def _check_section(self, X):
        if not isinstance(X, MultiVec) or X.degree != 1:
            raise ShapeMismatch("expected a section (degree-1 MultiVec)")
        if X.chart != self.chart or X.rank != self.rank:
            raise ShapeMismatch("section does not live on this algebroid")

    def __repr__(self):
        return f"AlgebroidDef(rank={self.rank}, chart={self.chart})"


def anchor_vector(A: AlgebroidDef, X: Section) -> List[Fn]:
    """Coordinate components of the vector field ``rho(X)``."""
    A._check_section(X)
    out = [A.zero] * A.chart.dim
    for (a,), f in X.coeffs.items():
        row = A.anchor[a]
        for i in range(A.chart.dim):
            if not row[i].is_zero():
                out[i] = out[i] + f * row[i]
    return out


def apply_vector_field(chart: Chart, v: Sequence[Fn], f: Fn) -> Fn:
    s: Fn = Expr.zero(chart)
    for i, vi in enumerate(v):
        if not vi.is_zero():
            d = f.diff(i)
            if not d.is_zero():
                s = s + vi * d
    return s


def anchor_apply(A: AlgebroidDef, X: Section, f) -> Fn:
    """``rho(X) f``."""
    f = as_fn(f, A.chart)
    return apply_vector_field(A.chart, anchor_vector(A, X), f)


def frame_anchor_apply(A: AlgebroidDef, a: int, f: Fn) -> Fn:
    return apply_vector_field(A.chart, A.anchor[a], f)


def bracket(A: AlgebroidDef, X: Section, Y: Section) -> Section:
    """``[X, Y]_A`` via structure functions and the Leibniz rule."""
    A._check_section(X)
    A._check_section(Y)
    comps: List[Fn] = [A.zero] * A.rank
    for (a,), xa in X.coeffs.items():
        for (b,), yb in Y.coeffs.items():
            if a == b:
                continue
            cab = A._c[a][b]
            p = xa * yb
            for c in range(A.rank):
                if not cab[c].is_zero():
                    comps[c] = comps[c] + p * cab[c]
    rx = anchor_vector(A, X)
    ry = anchor_vector(A, Y)
    for (b,), yb in Y.coeffs.items():
        comps[b] = comps[b] + apply_vector_field(A.chart, rx, yb)
    for (a,), xa in X.coeffs.items():
        comps[a] = comps[a] - apply_vector_field(A.chart, ry, xa)
    return A.section(comps)


def jacobiator(A: AlgebroidDef, X: Section, Y: Section, Z: Section) -> Section:
    return (bracket(A, bracket(A, X, Y), Z) + bracket(A, bracket(A, Y, Z), X)
            + bracket(A, bracket(A, Z, X), Y))


def vector_field_bracket(chart: Chart, u: Sequence[Fn], v: Sequence[Fn]) -> List[Fn]:
    return [apply_vector_field(chart, u, v[i]) - apply_vector_field(chart, v, u[i])
            for i in range(chart.dim)]


@dataclass
class CheckResult:
    """Verdict plus the nonzero residuals that decided it."""

    ok: bool
    residuals: Dict[object, object] = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_jacobi_identity(A: AlgebroidDef) -> CheckResult:
    """Jacobiator on all frame triples ``a < b < c``.

    The Jacobiator of a skew algebroid is C-infinity trilinear once the
    anchor is a bracket morphism, and it vanishes whenever two arguments
    coincide, so frame triples with distinct sorted indices suffice for it.
    """
    E = A.frame()
    res = {}
    for a in range(A.rank):
        for b in range(a + 1, A.rank):
            for c in range(b + 1, A.rank):
                J = jacobiator(A, E[a], E[b], E[c])
                if not J.is_zero():
                    res[(a, b, c)] = J
    return CheckResult(not res, res)


def check_anchor_morphism(A: AlgebroidDef) -> CheckResult:
    """``rho([e_a, e_b]) - [rho(e_a), rho(e_b)]`` on all frame pairs."""
    res = {}
    for a in range(A.rank):
        for b in range(a + 1, A.rank):
            lhs = anchor_vector(A, A.frame_bracket(a, b))
            rhs = vector_field_bracket(A.chart, A.anchor[a], A.anchor[b])
            diff = [u - v for u, v in zip(lhs, rhs)]
            if any(not d.is_zero() for d in diff):
                res[(a, b)] = diff
    return CheckResult(not res, res)


def is_lie(A: AlgebroidDef) -> bool:
    return bool(check_jacobi_identity(A)) and bool(check_anchor_morphism(A))


# standard examples ----------------------------------------------------

def tangent(chart: Chart) -> AlgebroidDef:
    """``TM`` with the coordinate frame."""
    one, zero = Expr.const(chart, 1), Expr.zero(chart)
    anchor = [[one if i == j else zero for j in range(chart.dim)] for i in range(chart.dim)]
    return AlgebroidDef(chart, chart.dim, anchor, {}, labels=[f"d{n}" for n in chart.names])


def lie_algebra(constants: Mapping[Tuple[int, int], Sequence], rank: int,
                chart: Chart | None = None) -> AlgebroidDef:
    """A Lie algebra as a zero-anchor algebroid over a one-coordinate dummy chart."""
    chart = chart or Chart(("s",))
    return AlgebroidDef(chart, rank, None, constants)
