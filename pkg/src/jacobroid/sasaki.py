"""Almost contact, contact pseudo-metric and Sasakian structures on a chart.

Tensors are matrices in the coordinate frame: ``phi[i][j]`` is the i-th
component of ``phi(d/dx_j)``.  The metric ``g`` is a :class:`Metric` on the
tangent bundle.  ``M x R`` gets the extra coordinate ``t`` appended last.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .algebroid import CheckResult, apply_vector_field, tangent, vector_field_bracket
from .calculus import differential
from .exterior import CoSec, MultiVec, evaluate, pairing
from .jacobi import standard_oplus
from .metric import Connection, Metric, Residual, compat_residual_jacobi, dual_metric, koszul
from .oplusr import contact_check, contact_to_jacobi, reeb_field, to_oplus
from .poissonization import exp_t, time_chart
from .symfun import Chart, Expr, Fn, as_fn, invert, matmul, transpose

HALF = Fraction(1, 2)


class PreconditionFailed(ValueError):
    pass


def _mat(chart, rows):
    return tuple(tuple(as_fn(v, chart) for v in row) for row in rows)


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


@dataclass(frozen=True)
class AlmostContactTuple:
    phi: Tuple[Tuple[Fn, ...], ...]
    xi: MultiVec
    eta: CoSec
    g: Metric
    q: int = 0
    epsilon: int = 1

    def __post_init__(self):
        m = self.chart.dim
        if m % 2 == 0:
            raise ValueError("almost contact structures need an odd-dimensional chart")
        if len(self.phi) != m or any(len(r) != m for r in self.phi):
            raise ValueError("phi must be a square matrix of the chart dimension")
        if self.g.rank != m:
            raise ValueError("metric rank must equal the chart dimension")
        if self.q < 0:
            raise ValueError("signature index q is nonnegative")
        if self.epsilon != (-1) ** self.q:
            raise ValueError("epsilon must equal (-1)^q")

    @classmethod
    def build(cls, chart: Chart, phi, xi, eta, g, q: int = 0) -> "AlmostContactTuple":
        m = chart.dim
        return cls(_mat(chart, phi), MultiVec.from_components(chart, m, xi),
                   CoSec.from_components(chart, m, eta), Metric.from_rows(chart, g), q, (-1) ** q)

    @property
    def chart(self) -> Chart:
        return self.xi.chart

    @property
    def dim(self) -> int:
        return self.chart.dim

    def phi_of(self, X: MultiVec) -> MultiVec:
        return MultiVec.from_components(self.chart, self.dim, _apply(self.phi, X.components()))

    def with_metric(self, g: Metric) -> "AlmostContactTuple":
        return AlmostContactTuple(self.phi, self.xi, self.eta, g, self.q, self.epsilon)

    def with_eta(self, eta: CoSec) -> "AlmostContactTuple":
        return AlmostContactTuple(self.phi, self.xi, eta, self.g, self.q, self.epsilon)


def almost_contact_check(T: AlmostContactTuple) -> CheckResult:
    """``phi^2 = -id + eta (x) xi`` and ``<eta, xi> = 1``."""
    m = T.dim
    P2 = matmul(T.phi, T.phi)
    res = {}
    for i in range(m):
        for j in range(m):
            v = P2[i][j] + (1 if i == j else 0) - T.xi[(i,)] * T.eta[(j,)]
            if not v.is_zero():
                res[("phi^2", i, j)] = v
    n = pairing(T.eta, T.xi) - 1
    if not n.is_zero():
        res[("eta(xi)",)] = n
    return CheckResult(not res, res)


def contact_pseudo_metric_check(T: AlmostContactTuple, require: bool = True) -> CheckResult:
    """``g(phi X, phi Y) = g(X,Y) - eps eta(X) eta(Y)``, ``g(phi X, Y) = d eta(X, Y)``, eta contact."""
    ac = almost_contact_check(T)
    if require and not ac:
        raise PreconditionFailed("not an almost contact structure")
    res = dict(ac.residuals)
    E = tangent(T.chart).frame()
    deta = differential(tangent(T.chart), T.eta)
    pE = [T.phi_of(X) for X in E]
    m = T.dim
    for i in range(m):
        for j in range(m):
            v = T.g(pE[i], pE[j]) - T.g(E[i], E[j]) + T.epsilon * (T.eta[(i,)] * T.eta[(j,)])
            if not v.is_zero():
                res[("compatible", i, j)] = v
            w = T.g(pE[i], E[j]) - deta[(i, j)]
            if not w.is_zero():
                res[("d eta", i, j)] = w
    if not contact_check(T.eta):
        res[("contact",)] = T.eta
    return CheckResult(not res, res)


def levi_civita(T: AlmostContactTuple) -> Connection:
    return koszul(tangent(T.chart), T.g)


def sasakian_residual(T: AlmostContactTuple, D: Connection | None = None) -> Residual:
    """``(nabla_Xi phi) Xj + g(Xi,Xj) xi / 2 - eps <eta,Xj> Xi / 2``, component k at key ``(i,j,k)``."""
    D = D or levi_civita(T)
    E = tangent(T.chart).frame()
    m = T.dim
    items = []
    for i in range(m):
        for j in range(m):
            v = D.covariant(E[i], T.phi_of(E[j])) - T.phi_of(D.covariant(E[i], E[j]))
            v = v + T.xi.scale(T.g.gram[i][j] * HALF) - E[i].scale(T.eta[(j,)] * (T.epsilon * HALF))
            items.extend(((i, j, k), v[(k,)]) for k in range(m))
    return Residual.collect(T.chart, items)


def reeb_derivative_residual(T: AlmostContactTuple, D: Connection | None = None) -> Residual:
    """``nabla_Xi xi - eps phi(Xi) / 2``."""
    D = D or levi_civita(T)
    E = tangent(T.chart).frame()
    items = []
    for i in range(T.dim):
        v = D.covariant(E[i], T.xi) - T.phi_of(E[i]).scale(T.epsilon * HALF)
        items.extend(((i, k), v[(k,)]) for k in range(T.dim))
    return Residual.collect(T.chart, items)


def lie_xi_g(T: AlmostContactTuple) -> Residual:
    """``(L_xi g)(d_i, d_j)``."""
    m = T.dim
    chart = T.chart
    xi = T.xi.components()
    G = T.g.gram
    items = []
    for i in range(m):
        for j in range(i, m):
            v = apply_vector_field(chart, xi, G[i][j])
            for k in range(m):
                if not G[k][j].is_zero():
                    v = v + G[k][j] * xi[k].diff(i)
                if not G[i][k].is_zero():
                    v = v + G[i][k] * xi[k].diff(j)
            items.append(((i, j), v))
    return Residual.collect(chart, items)


# ---------------------------------------------------------------------------
# the contact-metric / compatibility equivalence

def big_metric(T: AlmostContactTuple) -> Metric:
    """``G((X,f),(Y,h)) = g(X,Y) + eps f h`` on ``TM + R``."""
    m = T.dim
    rows = [list(T.g.gram[i]) + [0] for i in range(m)] + [[0] * m + [T.epsilon]]
    return Metric.from_rows(T.chart, rows)


@dataclass
class Theorem38Report:
    compat: Residual
    sasakian: Residual
    reeb: Residual
    lie_g: Residual
    combined: Dict[Tuple[int, int], Residual]
    combined_base_ok: bool

    @property
    def compatible(self) -> bool:
        return self.compat.is_zero()

    @property
    def sasakian_side(self) -> bool:
        return self.sasakian.is_zero() and self.reeb.is_zero() and self.lie_g.is_zero()

    @property
    def combined_zero(self) -> bool:
        return all(r.is_zero() for r in self.combined.values())

    @property
    def equivalent(self) -> bool:
        return self.compatible == self.sasakian_side

    @property
    def consistent(self) -> bool:
        """Combined condition vanishes iff compatibility holds, and its (0,0) case is the first term."""
        return self.combined_base_ok and self.combined_zero == self.compatible

    @property
    def verdict(self) -> str:
        if not self.equivalent:
            return "not equivalent"
        return "equivalent, both hold" if self.compatible else "equivalent, both fail"


H_CHOICES = ((0, 0), (1, 0), (0, 1))


def combined_condition(T: AlmostContactTuple, h2, h3, S: Residual, R: Residual, L: Residual) -> Residual:
    """``eps g(S(Xi,Xj), Xk) + h2 g(R(Xi), Xk) - eps h3 (L_xi g)(Xi,Xj) / 2`` on frame triples."""
    m = T.dim
    G = T.g.gram
    items = []
    for i in range(m):
        for j in range(m):
            lg = L[(min(i, j), max(i, j))]
            for k in range(m):
                v = Expr.zero(T.chart)
                for c in range(m):
                    if not G[c][k].is_zero():
                        v = v + S[(i, j, c)] * G[c][k] * T.epsilon + (R[(i, c)] * G[c][k]) * h2
                v = v - lg * (Fraction(T.epsilon * h3, 2))
                items.append(((i, j, k), v))
    return Residual.collect(T.chart, items)


def theorem38_harness(T: AlmostContactTuple, require: bool = True) -> Theorem38Report:
    """Compatibility of ``((Lambda,E), G*)`` next to the Sasakian conditions.

    ``(Lambda, E)`` is the Jacobi pair of ``eps * eta`` and ``G*`` the inverse
    of ``G = g + eps``.  ``require=False`` skips the contact-metric precondition.
    """
    if require and not contact_pseudo_metric_check(T):
        raise PreconditionFailed("not a contact pseudo-metric structure")
    pair = contact_to_jacobi(T.eta.scale(T.epsilon))
    J = standard_oplus(tangent(T.chart))
    Gs = dual_metric(big_metric(T))
    Rc = compat_residual_jacobi(J, to_oplus(pair), Gs)
    D = levi_civita(T)
    S = sasakian_residual(T, D)
    R = reeb_derivative_residual(T, D)
    L = lie_xi_g(T)
    comb = {h: combined_condition(T, h[0], h[1], S, R, L) for h in H_CHOICES}
    base = combined_condition(T, 0, 0, S, Residual(T.chart), Residual(T.chart))
    base_ok = (comb[(0, 0)] - base).is_zero()
    return Theorem38Report(Rc, S, R, L, comb, base_ok)


# ---------------------------------------------------------------------------
# the almost complex structure on M x R

def build_J(T: AlmostContactTuple, time_name: str = "t"):
    """Matrix of ``J(X + f d/dt) = phi X + f xi - <eta, X> d/dt`` on the frame of ``T(M x R)``."""
    ct = time_chart(T.chart, time_name)
    m = T.dim
    zero = Expr.zero(ct)
    rows = []
    for i in range(m):
        rows.append([T.phi[i][j].extend(ct) for j in range(m)] + [T.xi[(i,)].extend(ct)])
    rows.append([-T.eta[(j,)].extend(ct) for j in range(m)] + [zero])
    return tuple(tuple(r) for r in rows)


def j_squared_residual(Jm) -> Residual:
    n = len(Jm)
    chart = Jm[0][0].chart
    J2 = matmul(Jm, Jm)
    return Residual.collect(chart, (((i, j), J2[i][j] + (1 if i == j else 0))
                                    for i in range(n) for j in range(n)))


def nijenhuis(Jm) -> Residual:
    """``[JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]`` on coordinate frame pairs ``a < b``."""
    n = len(Jm)
    chart = Jm[0][0].chart
    cols = [[Jm[i][a] for i in range(n)] for a in range(n)]
    zero = Expr.zero(chart)
    unit = [[Expr.const(chart, 1) if i == a else zero for i in range(n)] for a in range(n)]
    items = []
    for a in range(n):
        for b in range(a + 1, n):
            t1 = vector_field_bracket(chart, cols[a], cols[b])
            t2 = _apply(Jm, vector_field_bracket(chart, cols[a], unit[b]))
            t3 = _apply(Jm, vector_field_bracket(chart, unit[a], cols[b]))
            items.extend(((a, b, c), t1[c] - t2[c] - t3[c]) for c in range(n))
    return Residual.collect(chart, items)


def nijenhuis_J(T: AlmostContactTuple) -> Residual:
    return nijenhuis(build_J(T))


@dataclass
class KahlerReport:
    closed: Residual
    hermitian: Residual
    fundamental: Residual
    parallel: Residual

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in (self.closed, self.hermitian, self.fundamental, self.parallel))

    def failed(self) -> List[str]:
        names = ("closed", "hermitian", "fundamental", "parallel")
        return [n for n in names if not getattr(self, n).is_zero()]


def kahler_check(omega: CoSec, Jm, h: Metric) -> KahlerReport:
    """``d omega = 0``, ``h(J.,J.) = h``, ``omega(X,Y) = h(JX,Y)`` and ``nabla^h J = 0``."""
    chart = omega.chart
    n = chart.dim
    TT = tangent(chart)
    dw = differential(TT, omega)
    closed = Residual.collect(chart, dw.coeffs.items())
    H = h.gram
    JtHJ = matmul(matmul(transpose(Jm), H), Jm)
    herm = Residual.collect(chart, (((i, j), JtHJ[i][j] - H[i][j]) for i in range(n) for j in range(i, n)))
    HJ = matmul(transpose(Jm), H)   # (J^T H)[a][b] = h(J d_a, d_b)
    fund = Residual.collect(chart, (((a, b), omega[(a, b)] - HJ[a][b])
                                    for a in range(n) for b in range(n)))
    D = koszul(TT, h)
    E = TT.frame()
    cols = [MultiVec.from_components(chart, n, [Jm[i][b] for i in range(n)]) for b in range(n)]

    def Jv(X):
        return MultiVec.from_components(chart, n, _apply(Jm, X.components()))

    items = []
    for a in range(n):
        for b in range(n):
            v = D.covariant(E[a], cols[b]) - Jv(D.covariant(E[a], E[b]))
            items.extend(((a, b, c), v[(c,)]) for c in range(n))
    par = Residual.collect(chart, items)
    return KahlerReport(closed, herm, fund, par)


def kahler_data(T: AlmostContactTuple, time_name: str = "t"):
    """``(d(e^t eta), J, e^t G)`` on ``M x R`` with ``G = g + eps dt^2``."""
    ct = time_chart(T.chart, time_name)
    n = ct.dim
    et = exp_t(ct, 1, time_name)
    eta_t = CoSec(ct, n, 1, {(i,): T.eta[(i,)].extend(ct) * et for i in range(T.dim)})
    omega = differential(tangent(ct), eta_t)
    G = big_metric(T).extend(ct)
    return omega, build_J(T, time_name), G.scale(et)


def corollary39_check(T: AlmostContactTuple) -> KahlerReport:
    return kahler_check(*kahler_data(T))


# ---------------------------------------------------------------------------
# derived fixtures on R^3

R3 = Chart(("x", "y", "z"))


def contact_metric_from_plane(eta: CoSec, plane_frame: Sequence[MultiVec], plane_gram,
                              q: int = 0) -> AlmostContactTuple:
    """Contact metric tuple with ``g = eps eta^2 + h`` and ``phi`` solving ``g(phi X, Y) = d eta(X, Y)``.

    ``plane_frame`` spans the kernel of ``eta`` and ``plane_gram`` is the gram
    of ``h`` on it; the structure is almost contact iff ``h`` is suitably
    normalized against ``d eta``, which the caller verifies.
    """
    chart = eta.chart
    m = chart.dim
    eps = (-1) ** q
    xi = reeb_field(eta)
    T_ = tangent(chart)
    deta = differential(T_, eta)
    k = len(plane_frame)
    h = _mat(chart, plane_gram)
    om = [[evaluate(deta, plane_frame[i], plane_frame[j]) for j in range(k)] for i in range(k)]
    Phi = matmul(invert(h), transpose(_mat(chart, om)))
    P = [[plane_frame[j][(i,)] for j in range(k)] + [xi[(i,)]] for i in range(m)]
    Pinv = invert(P)
    zero = Expr.zero(chart)
    Phi_hat = [[Phi[i][j] if i < k and j < k else zero for j in range(m)] for i in range(m)]
    phi = matmul(matmul(P, Phi_hat), Pinv)
    G_hat = [[h[i][j] if i < k and j < k else zero for j in range(m)] for i in range(m)]
    G_hat[m - 1][m - 1] = Expr.const(chart, eps)
    g = matmul(matmul(transpose(Pinv), G_hat), Pinv)
    return AlmostContactTuple(tuple(tuple(r) for r in phi), xi, eta,
                              Metric("A", tuple(tuple(r) for r in g)), q, eps)


def _heisenberg_plane(a, chart=R3):
    y = Expr.coord(chart, "y")
    eta = CoSec.from_components(chart, 3, [-y * a, 0, a])
    E1 = MultiVec.from_components(chart, 3, [1, 0, y])
    E2 = MultiVec.from_components(chart, 3, [0, 1, 0])
    return eta, [E1, E2]


def derive_heisenberg_tuple(a=1) -> AlmostContactTuple:
    """Sasakian tuple for ``eta = a (dz - y dx)`` from the ansatz ``h = b * id`` on the contact plane.

    ``phi^2 = -id`` on the plane forces ``b = a`` (for ``a > 0``); the result
    is then checked against every axiom before it is returned.
    """
    a = Fraction(a)
    if a <= 0:
        raise ValueError("a must be positive")
    eta, frame = _heisenberg_plane(a)
    b = a
    T = contact_metric_from_plane(eta, frame, [[b, 0], [0, b]])
    if not contact_pseudo_metric_check(T):
        raise AssertionError("derived tuple violates the contact metric axioms")
    if not sasakian_residual(T).is_zero():
        raise AssertionError("derived tuple is not Sasakian")
    return T


def squashed_heisenberg_tuple() -> AlmostContactTuple:
    """Contact metric, not Sasakian: plane gram ``[[1+z^2, z], [z, 1]]`` (determinant 1)."""
    eta, frame = _heisenberg_plane(1)
    z = Expr.coord(R3, "z")
    T = contact_metric_from_plane(eta, frame, [[1 + z * z, z], [z, 1]])
    return T


def perturbed_metric_tuple(T: AlmostContactTuple, slot: int = 1, coord: str = "x") -> AlmostContactTuple:
    """``T`` with ``g(d_slot, d_slot)`` multiplied by ``1 + coord^2`` (phi, xi, eta unchanged)."""
    u = Expr.coord(T.chart, coord)
    rows = [list(r) for r in T.g.gram]
    rows[slot][slot] = rows[slot][slot] * (1 + u * u)
    return T.with_metric(Metric("A", tuple(tuple(r) for r in rows)))
