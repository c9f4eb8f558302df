"""Time-dependent sections over ``M x R`` and the Poissonization of 2-sections.

Sections of ``A x R`` are sections of ``A`` whose coefficients may depend on
an extra coordinate ``t`` (appended last to the chart).  Two Lie algebroid
structures are realized on the unchanged frame:

* ``bar``: structure functions of ``A``, anchor ``rho_A(e_a) + phi0_a d/dt``;
* ``hat``: ``e^-t (c_ab - phi0_a e_b + phi0_b e_a)`` and anchor
  ``e^-t (rho_A(e_a) + phi0_a d/dt)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebroid import AlgebroidDef, CheckResult, check_anchor_morphism, check_jacobi_identity, tangent
from .calculus import differential, schouten
from .exterior import CoSec, MultiVec, _Alternating, wedge
from .jacobi import JacobiAlgebroid, is_jacobi, phi_differential, phi_schouten, standard_oplus
from .oplusr import PairVec, to_oplus
from .symfun import Chart, Expr

TIME = "t"


class NotJacobi(ValueError):
    pass


def time_chart(chart: Chart, name: str = TIME) -> Chart:
    """``chart`` with the time coordinate appended; a name collision raises."""
    return chart.extended(name)


def exp_t(chart: Chart, weight=-1, name: str = TIME) -> Expr:
    return Expr.exp(chart, {name: weight})


@dataclass(frozen=True)
class TildeAlgebroid:
    base: JacobiAlgebroid
    chart: Chart
    variant: str
    realized: AlgebroidDef

    @property
    def t_index(self) -> int:
        return self.chart.dim - 1

    def lift(self, elem: _Alternating) -> _Alternating:
        """View a t-independent element of the base as one over ``M x R``."""
        return elem.extend(self.chart)

    def is_lie(self) -> CheckResult:
        jac = check_jacobi_identity(self.realized)
        anc = check_anchor_morphism(self.realized)
        res = {("jacobiator",) + k: v for k, v in jac.residuals.items()}
        res.update({("anchor",) + k: v for k, v in anc.residuals.items()})
        return CheckResult(jac.ok and anc.ok, res)


def _extended_base(J: JacobiAlgebroid, chart: Chart) -> AlgebroidDef:
    return J.base.extend(chart)


def build_bar(J: JacobiAlgebroid, time_name: str = TIME) -> TildeAlgebroid:
    chart = time_chart(J.chart, time_name)
    B = _extended_base(J, chart)
    ti = chart.dim - 1
    phi = [J.phi0[(a,)].extend(chart) for a in range(J.rank)]
    anchor = []
    for a, row in enumerate(B.anchor):
        row = list(row)
        row[ti] = phi[a]
        anchor.append(row)
    R = AlgebroidDef(chart, J.rank, anchor, B.structure_dict(), J.base.labels)
    return TildeAlgebroid(J, chart, "bar", R)


def build_hat(J: JacobiAlgebroid, time_name: str = TIME) -> TildeAlgebroid:
    chart = time_chart(J.chart, time_name)
    B = _extended_base(J, chart)
    ti = chart.dim - 1
    w = exp_t(chart, -1, time_name)
    r = J.rank
    phi = [J.phi0[(a,)].extend(chart) for a in range(r)]
    anchor = []
    for a, row in enumerate(B.anchor):
        row = list(row)
        row[ti] = phi[a]
        anchor.append([v * w for v in row])
    structure = {}
    for a in range(r):
        for b in range(a + 1, r):
            comps = [B.structure_fn(a, b, c) for c in range(r)]
            comps[b] = comps[b] - phi[a]
            comps[a] = comps[a] + phi[b]
            comps = [v * w for v in comps]
            if any(not v.is_zero() for v in comps):
                structure[(a, b)] = comps
    R = AlgebroidDef(chart, r, anchor, structure, J.base.labels)
    return TildeAlgebroid(J, chart, "hat", R)


def tilde_differential(T: TildeAlgebroid, w: CoSec) -> CoSec:
    return differential(T.realized, w)


def tilde_differential_closed_form(T: TildeAlgebroid, w: CoSec) -> CoSec:
    """Closed-form differential of a function or a 1-cosection over ``M x R``.

    bar: ``d_A f + (df/dt) phi0`` and ``d_A w + phi0 ^ dw/dt``;
    hat: the same with ``d_A w`` replaced by ``d_{A,phi0} w``, times ``e^-t``.
    """
    if w.degree > 1:
        raise ValueError("closed forms are available for degree 0 and 1 only")
    J = T.base
    B = _extended_base(J, T.chart)
    phi = J.phi0.extend(T.chart)
    ti = T.t_index
    dt = w.diff(ti)
    if w.degree == 0:
        out = differential(B, w) + phi.scale(dt.function)
    elif T.variant == "bar":
        out = differential(B, w) + wedge(phi, dt)
    else:
        out = phi_differential(JacobiAlgebroid.unchecked(B, phi), w) + wedge(phi, dt)
    if T.variant == "hat":
        out = out.scale(exp_t(T.chart, -1, T.chart.names[ti]))
    return out


def poissonize(J: JacobiAlgebroid, pi: MultiVec, time_name: str = TIME) -> MultiVec:
    """``e^-t pi`` over the time-extended chart."""
    chart = time_chart(J.chart, time_name)
    return pi.extend(chart).scale(exp_t(chart, -1, time_name))


def poissonization_identity_residual(J: JacobiAlgebroid, pi: MultiVec,
                                     bar: TildeAlgebroid | None = None) -> MultiVec:
    """``[pi~, pi~]_bar - e^-2t [pi, pi]_{A,phi0}``; zero for every 2-section."""
    bar = bar or build_bar(J)
    pt = poissonize(J, pi, bar.chart.names[-1])
    lhs = schouten(bar.realized, pt, pt)
    rhs = phi_schouten(J, pi, pi).extend(bar.chart).scale(exp_t(bar.chart, -2, bar.chart.names[-1]))
    return lhs - rhs


def check_tangent_isomorphism(T: TildeAlgebroid) -> CheckResult:
    """For ``(TM + R, (0,1))`` the bar realization is ``T(M x R)`` on the frame ``(d/dx_i, d/dt)``."""
    target = tangent(T.chart)
    ok = T.realized.same_as(target)
    return CheckResult(ok, {} if ok else {"realized": T.realized})


def manifold_poissonization(Lambda: MultiVec, E: MultiVec, time_name: str = TIME,
                            check: bool = True) -> MultiVec:
    """``e^-t (Lambda + d/dt ^ E)`` on ``T(M x R)``."""
    chart = Lambda.chart
    if check:
        J = standard_oplus(tangent(chart))
        if not is_jacobi(J, to_oplus(PairVec(Lambda, E))):
            raise NotJacobi("(Lambda, E) is not a Jacobi pair")
    ct = time_chart(chart, time_name)
    m = ct.dim
    L = MultiVec._raw(ct, m, 2, {k: v.extend(ct) for k, v in Lambda.coeffs.items()})
    Et = MultiVec._raw(ct, m, 1, {k: v.extend(ct) for k, v in E.coeffs.items()})
    dt = MultiVec.basis(ct, m, m - 1)
    return (L + wedge(dt, Et)).scale(exp_t(ct, -1, time_name))
