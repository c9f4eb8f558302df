"""Pseudo-Riemannian (co)metrics, Levi-Civita connections and compatibility.

Connections are stored by their Christoffel functions on the frame,
``nabla_{e_a} e_b = sum_c Gamma[a][b][c] e_c``, and act on arbitrary sections
through the connection axioms.  For a metric on the dual bundle the bundle
is a dual algebroid whose sections are represented as degree-1
:class:`MultiVec` over that algebroid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .algebroid import AlgebroidDef, CheckResult, anchor_vector, apply_vector_field, bracket, frame_anchor_apply
from .calculus import differential, schouten
from .exterior import CoSec, MultiVec, _Alternating, pairing, wedge
from .jacobi import JacobiAlgebroid, build_induced_dual, is_jacobi, phi_differential, to_dual_section
from .poissonization import build_bar, exp_t, poissonize
from .symfun import Chart, Expr, Fn, SingularMatrix, as_fn, det, fn_eval_float, invert

HALF = Fraction(1, 2)

Key3 = Tuple[int, int, int]


class NotSymmetric(ValueError):
    pass


class Degenerate(ValueError):
    pass


def _zero(chart):
    return Expr.zero(chart)


@dataclass(frozen=True)
class Metric:
    """Symmetric nondegenerate gram matrix on a frame; ``carrier`` is ``"A"`` or ``"Adual"``."""

    carrier: str
    gram: Tuple[Tuple[Fn, ...], ...]
    _inverse: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if self.carrier not in ("A", "Adual"):
            raise ValueError("carrier must be 'A' or 'Adual'")
        g = self.gram
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise ValueError("gram must be a nonempty square matrix")
        for i in range(n):
            for j in range(i + 1, n):
                if not (g[i][j] - g[j][i]).is_zero():
                    raise NotSymmetric(f"gram entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ")
        if det(g).is_zero():
            raise Degenerate("gram determinant is zero")

    @classmethod
    def from_rows(cls, chart: Chart, rows: Sequence[Sequence], carrier: str = "A") -> "Metric":
        return cls(carrier, tuple(tuple(as_fn(v, chart) for v in row) for row in rows))

    @classmethod
    def identity(cls, chart: Chart, n: int, carrier: str = "A") -> "Metric":
        return cls.from_rows(chart, [[1 if i == j else 0 for j in range(n)] for i in range(n)], carrier)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def chart(self) -> Chart:
        return self.gram[0][0].chart

    def inverse(self):
        if not self._inverse:
            try:
                self._inverse.append(tuple(tuple(r) for r in invert(self.gram)))
            except SingularMatrix as exc:
                raise Degenerate("gram is not invertible over the fraction field") from exc
        return self._inverse[0]

    def __call__(self, u: _Alternating, v: _Alternating) -> Fn:
        s: Fn = _zero(self.chart)
        for (a,), f in u.coeffs.items():
            row = self.gram[a]
            for (b,), h in v.coeffs.items():
                if not row[b].is_zero():
                    s = s + f * h * row[b]
        return s

    def scale(self, f) -> "Metric":
        return Metric(self.carrier, tuple(tuple(v * f for v in row) for row in self.gram))

    def extend(self, chart: Chart) -> "Metric":
        return Metric(self.carrier, tuple(tuple(v.extend(chart) for v in row) for row in self.gram))

    def equals(self, other: "Metric") -> bool:
        return self.carrier == other.carrier and all(
            (u - v).is_zero() for r1, r2 in zip(self.gram, other.gram) for u, v in zip(r1, r2))


def dual_metric(g: Metric) -> Metric:
    """Musical dual: the inverse gram on the dual coframe."""
    return Metric("Adual" if g.carrier == "A" else "A", g.inverse())


# ---------------------------------------------------------------------------
# connections

@dataclass(frozen=True)
class Connection:
    algebroid: AlgebroidDef
    christoffel: Tuple[Tuple[Tuple[Fn, ...], ...], ...]

    def frame_derivative(self, a: int, b: int) -> MultiVec:
        A = self.algebroid
        return MultiVec.from_components(A.chart, A.rank, self.christoffel[a][b])

    def covariant(self, X: MultiVec, Y: MultiVec) -> MultiVec:
        """``nabla_X Y`` from the Christoffel functions and the connection axioms."""
        A = self.algebroid
        comps: List[Fn] = [A.zero] * A.rank
        for (a,), xa in X.coeffs.items():
            for c in range(A.rank):
                s: Fn = frame_anchor_apply(A, a, Y[(c,)])
                for (b,), yb in Y.coeffs.items():
                    g = self.christoffel[a][b][c]
                    if not g.is_zero():
                        s = s + yb * g
                if not s.is_zero():
                    comps[c] = comps[c] + xa * s
        return A.section(comps)

    def extend(self, chart: Chart) -> "Connection":
        return Connection(self.algebroid.extend(chart), tuple(
            tuple(tuple(v.extend(chart) for v in cs) for cs in row) for row in self.christoffel))


def koszul(A: AlgebroidDef, g: Metric) -> Connection:
    """Levi-Civita connection of ``g`` from the Koszul formula on frame triples."""
    r = A.rank
    if g.rank != r:
        raise ValueError("metric rank does not match the algebroid")
    G = g.gram
    ginv = g.inverse()

    def gb(a, b, c):  # g([e_a, e_b], e_c)
        s = A.zero
        for d, f in enumerate(A._c[a][b]):
            if not f.is_zero() and not G[d][c].is_zero():
                s = s + f * G[d][c]
        return s

    K = [[[None] * r for _ in range(r)] for _ in range(r)]
    for a, b, c in product(range(r), repeat=3):
        v = (frame_anchor_apply(A, a, G[b][c]) + frame_anchor_apply(A, b, G[a][c])
             - frame_anchor_apply(A, c, G[a][b]) - gb(b, c, a) - gb(a, c, b) + gb(a, b, c))
        K[a][b][c] = v * HALF
    chris = []
    for a in range(r):
        row = []
        for b in range(r):
            comps = []
            for d in range(r):
                s = A.zero
                for c in range(r):
                    if not K[a][b][c].is_zero() and not ginv[c][d].is_zero():
                        s = s + K[a][b][c] * ginv[c][d]
                comps.append(s)
            row.append(tuple(comps))
        chris.append(tuple(row))
    return Connection(A, tuple(chris))


def torsion_residual(D: Connection, X: MultiVec, Y: MultiVec) -> MultiVec:
    return D.covariant(X, Y) - D.covariant(Y, X) - bracket(D.algebroid, X, Y)


def metric_compat_residual(D: Connection, g: Metric, X: MultiVec, Y: MultiVec, Z: MultiVec) -> Fn:
    A = D.algebroid
    lhs = apply_vector_field(A.chart, anchor_vector(A, X), g(Y, Z))
    return lhs - g(D.covariant(X, Y), Z) - g(Y, D.covariant(X, Z))


def check_levi_civita(D: Connection, g: Metric, samples: Iterable[MultiVec] | None = None) -> CheckResult:
    """Torsion-freeness and metric compatibility on the frame and on extra samples."""
    A = D.algebroid
    secs = list(A.frame()) + list(samples or [])
    res = {}
    for i, X in enumerate(secs):
        for j, Y in enumerate(secs):
            if j <= i:
                continue
            T = torsion_residual(D, X, Y)
            if not T.is_zero():
                res[("torsion", i, j)] = T
    for i, X in enumerate(secs):
        for j, Y in enumerate(secs):
            for k, Z in enumerate(secs):
                if k < j:
                    continue
                m = metric_compat_residual(D, g, X, Y, Z)
                if not m.is_zero():
                    res[("metric", i, j, k)] = m
    return CheckResult(not res, res)


def permute_algebroid(A: AlgebroidDef, perm: Sequence[int]) -> AlgebroidDef:
    """Same algebroid on the reordered frame ``f_i = e_perm[i]``."""
    r = A.rank
    anchor = [A.anchor[perm[i]] for i in range(r)]
    structure = {}
    for i in range(r):
        for j in range(i + 1, r):
            comps = A._c[perm[i]][perm[j]]
            structure[(i, j)] = [comps[perm[k]] for k in range(r)]
    return AlgebroidDef(A.chart, r, anchor, structure)


def koszul_permuted(A: AlgebroidDef, g: Metric, perm: Sequence[int]) -> Connection:
    """Solve the Koszul system on a reordered frame and map the result back."""
    r = A.rank
    Ap = permute_algebroid(A, perm)
    gp = Metric(g.carrier, tuple(tuple(g.gram[perm[i]][perm[j]] for j in range(r)) for i in range(r)))
    Dp = koszul(Ap, gp)
    pos = {p: i for i, p in enumerate(perm)}
    chris = tuple(tuple(tuple(Dp.christoffel[pos[a]][pos[b]][pos[c]] for c in range(r))
                        for b in range(r)) for a in range(r))
    return Connection(A, chris)


def same_connection(D1: Connection, D2: Connection) -> bool:
    return all((u - v).is_zero() for r1, r2 in zip(D1.christoffel, D2.christoffel)
               for c1, c2 in zip(r1, r2) for u, v in zip(c1, c2))


# ---------------------------------------------------------------------------
# residual tensors

@dataclass
class Residual:
    """Function-valued tensor on frame index tuples; only nonzero entries are kept."""

    chart: Chart
    entries: Dict[tuple, Fn] = field(default_factory=dict)

    @classmethod
    def collect(cls, chart: Chart, items: Iterable[Tuple[tuple, Fn]]) -> "Residual":
        return cls(chart, {k: v for k, v in items if not v.is_zero()})

    def is_zero(self) -> bool:
        return not self.entries

    def nonzero_entries(self) -> int:
        return len(self.entries)

    def __getitem__(self, key) -> Fn:
        return self.entries.get(tuple(key), _zero(self.chart))

    def map(self, fn) -> "Residual":
        return Residual.collect(self.chart, ((k, fn(v)) for k, v in self.entries.items()))

    def extend(self, chart: Chart) -> "Residual":
        return Residual(chart, {k: v.extend(chart) for k, v in self.entries.items()})

    def __sub__(self, other: "Residual") -> "Residual":
        keys = set(self.entries) | set(other.entries)
        return Residual.collect(self.chart, ((k, self[k] - other[k]) for k in sorted(keys)))

    def __add__(self, other: "Residual") -> "Residual":
        keys = set(self.entries) | set(other.entries)
        return Residual.collect(self.chart, ((k, self[k] + other[k]) for k in sorted(keys)))

    def max_abs_sample(self, points: Sequence[Mapping[str, Fraction]]) -> float:
        best = 0.0
        for v in self.entries.values():
            for p in points:
                best = max(best, abs(fn_eval_float(v, p)))
        return best


def _pi_matrix(pi: MultiVec):
    r = pi.rank
    return [[pi[(a, b)] for b in range(r)] for a in range(r)]


def _dpi_terms(dual: AlgebroidDef, D: Connection, P) -> Dict[Key3, Fn]:
    """``(D_{e^a} pi)(e^b, e^c)`` for all a and ``b < c``."""
    r = dual.rank
    out = {}
    for a in range(r):
        Ga = D.christoffel[a]
        for b in range(r):
            for c in range(b + 1, r):
                s: Fn = frame_anchor_apply(dual, a, P[b][c])
                for d in range(r):
                    if not Ga[b][d].is_zero() and not P[d][c].is_zero():
                        s = s - Ga[b][d] * P[d][c]
                    if not Ga[c][d].is_zero() and not P[b][d].is_zero():
                        s = s - Ga[c][d] * P[b][d]
                out[(a, b, c)] = s
    return out


def _check_cometric(A: AlgebroidDef, gstar: Metric):
    if gstar.rank != A.rank:
        raise ValueError("cometric rank does not match the algebroid")


def levi_civita_dual(J: JacobiAlgebroid, pi: MultiVec, gstar: Metric):
    ID = build_induced_dual(J, pi)
    return ID, koszul(ID.dual, gstar)


def compat_residual_poisson(A: AlgebroidDef, pi: MultiVec, gstar: Metric) -> Residual:
    """``rho_pi(a) pi(b,c) - pi(D_a b, c) - pi(b, D_a c)`` on coframe triples."""
    _check_cometric(A, gstar)
    J = JacobiAlgebroid.unchecked(A, CoSec.zero(A.chart, A.rank, 1))
    ID, D = levi_civita_dual(J, pi, gstar)
    return Residual.collect(A.chart, _dpi_terms(ID.dual, D, _pi_matrix(pi)).items())


def metric_dual_of(gstar: Metric, X: MultiVec) -> List[Fn]:
    """Components of the cosection ``theta`` with ``g*(theta, .) = X``."""
    g = gstar.inverse()
    r = gstar.rank
    out = []
    for a in range(r):
        s = _zero(gstar.chart)
        for (b,), xb in X.coeffs.items():
            if not g[a][b].is_zero():
                s = s + g[a][b] * xb
        out.append(s)
    return out


def jacobi_compat_rhs(pi: MultiVec, gstar: Metric, X0: MultiVec) -> Dict[Key3, Fn]:
    """``-1/2 (<b,X0> pi(c,a) + <c,X0> pi(a,b) + g*(a,b) pi(theta,c) - g*(a,c) pi(theta,b))``."""
    r = pi.rank
    P = _pi_matrix(pi)
    G = gstar.gram
    theta = metric_dual_of(gstar, X0)
    x0 = [X0[(a,)] for a in range(r)]
    pt = []
    for c in range(r):
        s = _zero(pi.chart)
        for d in range(r):
            if not theta[d].is_zero() and not P[d][c].is_zero():
                s = s + theta[d] * P[d][c]
        pt.append(s)
    out = {}
    for a in range(r):
        for b in range(r):
            for c in range(b + 1, r):
                s = x0[b] * P[c][a] + x0[c] * P[a][b] + G[a][b] * pt[c] - G[a][c] * pt[b]
                out[(a, b, c)] = -(s * HALF)
    return out


def compat_residual_jacobi(J: JacobiAlgebroid, pi: MultiVec, gstar: Metric) -> Residual:
    """Left side minus right side of the Jacobi compatibility condition on coframe triples."""
    _check_cometric(J.base, gstar)
    ID, D = levi_civita_dual(J, pi, gstar)
    lhs = _dpi_terms(ID.dual, D, _pi_matrix(pi))
    rhs = jacobi_compat_rhs(pi, gstar, ID.X0)
    return Residual.collect(J.chart, ((k, lhs[k] - rhs[k]) for k in sorted(lhs)))


def dpi_tensor(J: JacobiAlgebroid, pi: MultiVec, gstar: Metric) -> Residual:
    """``(D_a pi)(b, c)`` for the Levi-Civita connection of ``g*`` on the induced dual."""
    ID, D = levi_civita_dual(J, pi, gstar)
    return Residual.collect(J.chart, _dpi_terms(ID.dual, D, _pi_matrix(pi)).items())


def cyclic_identity_residual(J: JacobiAlgebroid, pi: MultiVec, gstar: Metric) -> Residual:
    """``[pi,pi]_A(a,b,c) - sum_cycl (D_a pi)(b,c) - 3 (X0 ^ pi)(a,b,c)`` for ``a < b < c``."""
    ID, D = levi_civita_dual(J, pi, gstar)
    dp = _dpi_terms(ID.dual, D, _pi_matrix(pi))
    S = schouten(J.base, pi, pi)
    W = wedge(ID.X0, pi).scale(3)
    r = pi.rank

    def dpv(a, b, c):
        if b < c:
            return dp[(a, b, c)]
        return -dp[(a, c, b)]

    items = []
    for a in range(r):
        for b in range(a + 1, r):
            for c in range(b + 1, r):
                cyc = dpv(a, b, c) + dpv(b, c, a) + dpv(c, a, b)
                items.append(((a, b, c), S[(a, b, c)] - cyc - W[(a, b, c)]))
    return Residual.collect(J.chart, items)


# ---------------------------------------------------------------------------
# Poissonized compatibility

@dataclass
class Theorem37Report:
    r1: Residual
    r2: Residual
    identity: Residual
    jacobi: bool

    @property
    def equivalent(self) -> bool:
        return self.identity.is_zero()

    @property
    def verdict(self) -> str:
        if not self.equivalent:
            return "not equivalent"
        both = "both hold" if self.r1.is_zero() else "both fail"
        return f"equivalent, {both}"


def poissonized_cometric(J: JacobiAlgebroid, gstar: Metric, chart: Chart) -> Metric:
    return gstar.extend(chart).scale(exp_t(chart, -1, chart.names[-1]))


def theorem37_check(J: JacobiAlgebroid, pi: MultiVec, gstar: Metric, require_jacobi: bool = True
                    ) -> Theorem37Report:
    """Compare the Jacobi residual of ``(pi, g*)`` with the Poisson residual of its Poissonization.

    ``R2 = e^-2t R1`` is the identity the equivalence rests on.
    """
    jac = bool(is_jacobi(J, pi))
    if require_jacobi and not jac:
        raise ValueError("pi is not a Jacobi structure")
    r1 = compat_residual_jacobi(J, pi, gstar)
    bar = build_bar(J)
    ch = bar.chart
    r2 = compat_residual_poisson(bar.realized, poissonize(J, pi, ch.names[-1]),
                                 poissonized_cometric(J, gstar, ch))
    w = exp_t(ch, -2, ch.names[-1])
    ident = r2 - r1.extend(ch).map(lambda v: v * w)
    return Theorem37Report(r1, r2, ident, jac)


def explicit_levi_civita_check(J: JacobiAlgebroid, pi: MultiVec, gstar: Metric,
                               samples: Iterable[Tuple[CoSec, CoSec]] | None = None) -> CheckResult:
    """Closed-form Levi-Civita connection of ``e^-t g*`` on the Poissonized dual versus Koszul.

    ``D~_a b = e^-t (D_a b + <X0,a>(db/dt - b/2) + <X0,b> a/2 - g*(a,b) theta/2)``
    where ``theta`` is metrically dual to ``X0``.  Samples are pairs of
    1-cosections over the time-extended chart; the default is all coframe pairs.
    """
    bar = build_bar(J)
    ch = bar.chart
    ti = ch.dim - 1
    pt = poissonize(J, pi, ch.names[-1])
    Jt = JacobiAlgebroid.unchecked(bar.realized, CoSec.zero(ch, J.rank, 1))
    IDt = build_induced_dual(Jt, pt)
    Dt = koszul(IDt.dual, poissonized_cometric(J, gstar, ch))
    ID, D = levi_civita_dual(J, pi, gstar)
    De = D.extend(ch)
    X0 = ID.X0.extend(ch)
    ge = gstar.extend(ch)
    theta = MultiVec.from_components(ch, J.rank, [v.extend(ch) for v in metric_dual_of(gstar, ID.X0)])
    w = exp_t(ch, -1, ch.names[-1])
    if samples is None:
        cof = [CoSec.basis(ch, J.rank, a) for a in range(J.rank)]
        samples = [(a, b) for a in cof for b in cof]
    res = {}
    for n, (al, be) in enumerate(samples):
        A_, B_ = to_dual_section(al), to_dual_section(be)
        lhs = Dt.covariant(A_, B_)
        x_a = pairing(al, X0)
        x_b = pairing(be, X0)
        closed = De.covariant(A_, B_)
        closed = closed + (B_.diff(ti) - B_.scale(HALF)).scale(x_a)
        closed = closed + A_.scale(x_b * HALF)
        closed = closed - theta.scale(ge(al, be) * HALF)
        d = lhs - closed.scale(w)
        if not d.is_zero():
            res[n] = d
    return CheckResult(not res, res)


# ---------------------------------------------------------------------------
# symplectic correspondence

def symplectic_correspondence(A_or_J, pi: MultiVec) -> Tuple[CoSec, CheckResult]:
    """``omega_pi`` with ``omega^flat = -(pi^#)^-1`` and its (twisted) closedness check."""
    if isinstance(A_or_J, JacobiAlgebroid):
        J = A_or_J
        d = lambda w: phi_differential(J, w)
        A = J.base
    else:
        A = A_or_J
        d = lambda w: differential(A, w)
    r = A.rank
    P = _pi_matrix(pi)
    try:
        Pinv = invert(P)
    except SingularMatrix as exc:
        raise Degenerate("pi is degenerate") from exc
    coeffs = {}
    for a in range(r):
        for b in range(a + 1, r):
            coeffs[(a, b)] = -Pinv[a][b]
    omega = CoSec(A.chart, r, 2, coeffs)
    dw = d(omega)
    return omega, CheckResult(dw.is_zero(), {} if dw.is_zero() else {"d omega": dw})
