"""Check suites over a parsed definition file and their reports."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional

from ..algebroid import CheckResult, check_anchor_morphism, check_jacobi_identity, tangent
from ..calculus import differential, graded_antisymmetry_residual, graded_leibniz_residual, schouten
from ..exterior import CoSec, _Alternating
from ..jacobi import (JacobiAlgebroid, build_induced_dual, check_bracket_identity, dual_is_lie, is_jacobi,
                      phi_differential, phi_differential_alternating, phi_schouten, standard_oplus)
from ..metric import (Metric, Residual, check_levi_civita, compat_residual_jacobi, cyclic_identity_residual,
                      dual_metric, explicit_levi_civita_check, koszul, theorem37_check)
from ..oplusr import contact_check, contact_to_jacobi, to_oplus
from ..poissonization import (build_bar, build_hat, poissonization_identity_residual, poissonize,
                              tilde_differential, tilde_differential_closed_form)
from ..randgen import Pool
from ..sasaki import (almost_contact_check, contact_pseudo_metric_check, corollary39_check, lie_xi_g,
                      nijenhuis_J, reeb_derivative_residual, sasakian_residual, theorem38_harness)
from ..symfun import Chart, Expr, Frac, fn_eval_float
from .deffile import DefinitionFile

# Fixed registry of topic tags; every check carries exactly one.
TOPICS: Dict[str, str] = {
    "algebroid-axioms": "skew and Lie algebroid axioms on a frame",
    "schouten-calculus": "Schouten bracket and algebroid differential",
    "jacobi-algebroid": "closed 1-cosection and the twisted calculus",
    "jacobi-structure": "Jacobi condition on a 2-section",
    "induced-dual": "dual algebroid induced by a 2-section",
    "contact-jacobi": "contact forms and their Jacobi pairs",
    "poissonization": "time-extended algebroids and Poissonized 2-sections",
    "koszul-connection": "Levi-Civita connection from the Koszul formula",
    "metric-compatibility": "compatibility of a 2-section with a cometric",
    "poissonized-compatibility": "compatibility before and after Poissonization",
    "contact-metric": "almost contact and contact pseudo-metric axioms",
    "sasakian-criterion": "Sasakian characterization and its consequences",
    "sasakian-compatibility": "Sasakian structures as compatible Jacobi pairs",
    "cone-kahler": "Kähler structure on the time-extended manifold",
}

SUITES = ("lie", "jacobi", "compat", "poissonize", "theorem37", "sasaki", "theorem38", "corollary39")

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


# ---------------------------------------------------------------------------
# residual summaries

def _values(obj) -> Iterable:
    if obj is None:
        return
    if isinstance(obj, (Expr, Frac)):
        if not obj.is_zero():
            yield obj
    elif isinstance(obj, Residual):
        yield from obj.entries.values()
    elif isinstance(obj, _Alternating):
        yield from obj.coeffs.values()
    elif isinstance(obj, CheckResult):
        yield from _values(obj.residuals)
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _values(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            yield from _values(v)


def sample_points(chart: Chart, seed: int, n: int = 3) -> List[Dict[str, Fraction]]:
    rng = random.Random(f"{seed}:{','.join(chart.names)}")
    values = [Fraction(k, 4) for k in range(-6, 7) if k]
    return [{name: rng.choice(values) for name in chart.names} for _ in range(n)]


@dataclass
class CheckRecord:
    name: str
    verdict: str
    topic: str
    nonzero_entries: int = 0
    max_abs_sample: Optional[float] = None
    reason: str = ""

    def as_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "paper_ref": self.topic,
                "residual_nonzero_entries": self.nonzero_entries,
                "max_abs_sample": self.max_abs_sample, "reason": self.reason or None}


@dataclass
class CheckReport:
    suite: str
    seed: int
    checks: List[CheckRecord] = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def failed(self) -> bool:
        return any(c.verdict == FAIL for c in self.checks)

    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def as_json(self) -> dict:
        return {"suite": self.suite, "checks": [c.as_json() for c in self.checks],
                "seed": self.seed, "elapsed_ms": round(self.elapsed_ms, 3)}

    def to_json(self) -> str:
        return json.dumps(self.as_json(), indent=2, sort_keys=False)

    def to_table(self) -> str:
        header = ("check", "verdict", "topic", "nonzero", "max|sample|")
        rows = []
        for c in self.checks:
            sample = "" if c.max_abs_sample is None else f"{c.max_abs_sample:.3g}"
            verdict = c.verdict if not c.reason else f"{c.verdict} ({c.reason})"
            rows.append((c.name, verdict, c.topic, str(c.nonzero_entries), sample))
        widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        out = [f"suite {self.suite} (seed {self.seed})", fmt.format(*header),
               fmt.format(*("-" * w for w in widths))]
        out += [fmt.format(*r) for r in rows]
        npass = sum(c.verdict == PASS for c in self.checks)
        nfail = sum(c.verdict == FAIL for c in self.checks)
        nskip = sum(c.verdict == SKIPPED for c in self.checks)
        out.append(f"{npass} passed, {nfail} failed, {nskip} skipped in {self.elapsed_ms:.0f} ms")
        return "\n".join(out)


class _Run:
    """Collects records for one suite invocation."""

    def __init__(self, d: DefinitionFile, seed: int, numeric: bool, tol: float):
        self.d = d
        self.seed = seed
        self.numeric = numeric
        self.tol = tol
        self.records: List[CheckRecord] = []

    def pool(self, chart: Chart, salt: str, time_name: Optional[str] = None) -> Pool:
        return Pool(chart, seed=hash_seed(self.seed, salt), time_name=time_name, max_terms=2)

    def residual(self, name: str, topic: str, obj, expect_zero: bool = True):
        """Record a residual; ``expect_zero=False`` records a check that must be nonzero."""
        vals = list(_values(obj))
        best = 0.0
        for v in vals:
            for p in sample_points(v.chart, self.seed):
                best = max(best, abs(fn_eval_float(v, p)))
        zero = best <= self.tol if self.numeric else not vals
        ok = zero if expect_zero else not zero
        self.records.append(CheckRecord(name, PASS if ok else FAIL, topic, len(vals), best))
        return zero

    def flag(self, name: str, topic: str, ok: bool, obj=None, reason: str = ""):
        vals = list(_values(obj))
        self.records.append(CheckRecord(name, PASS if ok else FAIL, topic, len(vals), None, reason))
        return ok

    def skip(self, name: str, topic: str, reason: str):
        self.records.append(CheckRecord(name, SKIPPED, topic, 0, None, reason))


def hash_seed(seed: int, salt: str) -> int:
    return random.Random(f"{seed}/{salt}").getrandbits(32)


def _phi(d: DefinitionFile) -> CoSec:
    if d.phi0 is not None:
        return d.phi0
    return CoSec.zero(d.chart, d.algebroid.rank, 1)


def _cometric(d: DefinitionFile) -> Metric:
    g = d.metric
    return g if g.carrier == "Adual" else dual_metric(g)


def _combined(*results: CheckResult) -> CheckResult:
    res = {}
    for n, r in enumerate(results):
        res.update({(n,) + (k if isinstance(k, tuple) else (k,)): v for k, v in r.residuals.items()})
    return CheckResult(all(results), res)


# ---------------------------------------------------------------------------
# suites

def suite_lie(R: _Run):
    d = R.d
    if d.algebroid is None:
        return R.skip("lie", "algebroid-axioms", "no [algebroid] block")
    A = d.algebroid
    R.residual("jacobiator", "algebroid-axioms", check_jacobi_identity(A))
    R.residual("anchor-morphism", "algebroid-axioms", check_anchor_morphism(A))
    P = R.pool(A.chart, "lie")
    samples = [CoSec.scalar(A.chart, A.rank, Expr.coord(A.chart, n)) for n in A.chart.names]
    samples += [P.cosec(A.rank, k) for k in (0, 1, 1, 2) if k <= A.rank]
    dd = [differential(A, differential(A, w)) for w in samples]
    R.residual("d-squared", "schouten-calculus", dd)
    anti, leib = [], []
    for _ in range(3):
        a, b, c = (min(k, A.rank) for k in P.degrees(3, 0, 2))
        D1, D2, D3 = P.multivec(A.rank, a), P.multivec(A.rank, b), P.multivec(A.rank, c)
        anti.append(graded_antisymmetry_residual(A, D1, D2))
        leib.append(graded_leibniz_residual(A, D1, D2, D3))
    R.residual("graded-antisymmetry", "schouten-calculus", anti)
    R.residual("graded-leibniz", "schouten-calculus", leib)


def suite_jacobi(R: _Run):
    d = R.d
    ran = False
    if d.has_jacobi:
        ran = True
        A, phi = d.algebroid, _phi(d)
        J = d.jacobi_algebroid()
        closed = R.residual("phi0-closed", "jacobi-algebroid", differential(A, phi))
        lie = R.residual("base-lie", "jacobi-algebroid",
                         _combined(check_jacobi_identity(A), check_anchor_morphism(A)))
        P = R.pool(A.chart, "jacobi")
        ws = [P.cosec(A.rank, k) for k in (0, 1, 2) if k <= A.rank]
        R.residual("twisted-differential-forms-agree", "jacobi-algebroid",
                   [phi_differential(J, w) - phi_differential_alternating(J, w) for w in ws])
        R.residual("twisted-d-squared", "jacobi-algebroid",
                   [phi_differential(J, phi_differential(J, w)) for w in ws])
        if d.pi is not None:
            pi = d.pi
            jac = R.residual("jacobi-structure", "jacobi-structure", phi_schouten(J, pi, pi))
            cof = [CoSec.basis(A.chart, A.rank, a) for a in range(A.rank)]
            pairs = [(cof[a], cof[b]) for a in range(A.rank) for b in range(a + 1, A.rank)]
            if lie:
                R.residual("bracket-identity", "induced-dual", check_bracket_identity(J, pi, pairs))
            else:
                R.skip("bracket-identity", "induced-dual", "base bracket is not Lie")
            if closed and lie:
                ID = build_induced_dual(J, pi)
                dual_lie = dual_is_lie(ID)
                R.flag("dual-lie-iff-jacobi", "induced-dual", bool(dual_lie) == jac, dual_lie)
                if jac:
                    X0_closed = differential(ID.dual, CoSec(ID.dual.chart, A.rank, 1,
                                                            dict(ID.X0.coeffs)))
                    R.residual("induced-phi0-closed", "induced-dual", X0_closed)
            else:
                R.skip("dual-lie-iff-jacobi", "induced-dual", "(A, phi0) is not a Jacobi algebroid")
    if d.contact is not None:
        ran = True
        eta = d.contact
        try:
            ok = contact_check(eta)
        except ValueError as exc:
            ok = False
            R.flag("contact-form", "contact-jacobi", False, reason=str(exc))
        else:
            R.flag("contact-form", "contact-jacobi", ok)
        if ok:
            pair = contact_to_jacobi(eta)
            Jt = standard_oplus(tangent(eta.chart))
            R.residual("contact-pair-jacobi", "contact-jacobi", is_jacobi(Jt, to_oplus(pair)))
            R.residual("reeb-preserves-lambda", "contact-jacobi",
                       schouten(tangent(eta.chart), pair.second, pair.first))
    if not ran:
        R.skip("jacobi", "jacobi-algebroid", "no [jacobi] or [contact] block")


def _compat_inputs(R: _Run, name: str, topic: str):
    d = R.d
    missing = [b for b, ok in (("[algebroid]", d.algebroid is not None), ("[jacobi] pi", d.pi is not None),
                               ("[metric]", d.metric is not None)) if not ok]
    if missing:
        R.skip(name, topic, "missing " + ", ".join(missing))
        return None
    if d.metric.rank != d.algebroid.rank:
        R.skip(name, topic, "metric rank differs from algebroid rank")
        return None
    return d.jacobi_algebroid(), d.pi, _cometric(d)


def _is_jacobi_algebroid(J: JacobiAlgebroid) -> bool:
    return differential(J.base, J.phi0).is_zero() and bool(check_jacobi_identity(J.base)) \
        and bool(check_anchor_morphism(J.base))


def suite_compat(R: _Run, poissonized: bool = False):
    inputs = _compat_inputs(R, "compat", "metric-compatibility")
    if inputs is None:
        return
    J, pi, gstar = inputs
    if not _is_jacobi_algebroid(J):
        return R.skip("compat", "metric-compatibility", "(A, phi0) is not a Jacobi algebroid")
    ID = build_induced_dual(J, pi)
    D = koszul(ID.dual, gstar)
    R.residual("levi-civita", "koszul-connection", check_levi_civita(D, gstar))
    r1 = compat_residual_jacobi(J, pi, gstar)
    compatible = R.residual("compatibility", "metric-compatibility", r1)
    bracket = phi_schouten(J, pi, pi)
    R.flag("compatible-implies-jacobi", "metric-compatibility", (not compatible) or bracket.is_zero(),
           bracket if compatible else None)
    R.residual("cyclic-identity", "metric-compatibility", cyclic_identity_residual(J, pi, gstar))
    if poissonized:
        rep = theorem37_check(J, pi, gstar, require_jacobi=False)
        R.residual("poissonized-compatibility", "poissonized-compatibility", rep.r2)
        R.residual("poissonized-identity", "poissonized-compatibility", rep.identity)


def suite_poissonize(R: _Run):
    d = R.d
    if not d.has_jacobi:
        return R.skip("poissonize", "poissonization", "no [algebroid] with a [jacobi] block")
    J = d.jacobi_algebroid()
    jalg = _is_jacobi_algebroid(J)
    bar, hat = build_bar(J), build_hat(J)
    R.flag("bar-lie-iff-jacobi-algebroid", "poissonization", bool(bar.is_lie()) == jalg, bar.is_lie())
    R.flag("hat-lie-iff-jacobi-algebroid", "poissonization", bool(hat.is_lie()) == jalg, hat.is_lie())
    if not jalg:
        return R.skip("poissonization-identity", "poissonization", "(A, phi0) is not a Jacobi algebroid")
    P = R.pool(bar.chart, "poissonize", time_name=bar.chart.names[-1])
    diffs = []
    for T in (bar, hat):
        for k in (0, 1):
            w = P.cosec(J.rank, k)
            diffs.append(tilde_differential(T, w) - tilde_differential_closed_form(T, w))
    R.residual("closed-form-differentials", "poissonization", diffs)
    Pb = R.pool(J.chart, "poissonize-pi")
    sections = [P_ for P_ in ([d.pi] if d.pi is not None else [])] + [Pb.two_section(J.rank) for _ in range(3)]
    R.residual("poissonization-identity", "poissonization",
               [poissonization_identity_residual(J, pi, bar) for pi in sections])
    if d.pi is not None:
        pt = poissonize(J, d.pi, bar.chart.names[-1])
        poisson = schouten(bar.realized, pt, pt).is_zero()
        jac = phi_schouten(J, d.pi, d.pi).is_zero()
        R.flag("poisson-iff-jacobi", "poissonization", poisson == jac)


def suite_theorem37(R: _Run):
    inputs = _compat_inputs(R, "theorem37", "poissonized-compatibility")
    if inputs is None:
        return
    J, pi, gstar = inputs
    if not _is_jacobi_algebroid(J):
        return R.skip("theorem37", "poissonized-compatibility", "(A, phi0) is not a Jacobi algebroid")
    rep = theorem37_check(J, pi, gstar, require_jacobi=False)
    R.residual("rescaling-identity", "poissonized-compatibility", rep.identity)
    R.flag("equivalence", "poissonized-compatibility", rep.equivalent, reason=rep.verdict)
    R.residual("explicit-levi-civita", "poissonized-compatibility", explicit_levi_civita_check(J, pi, gstar))


def _sasaki_tuple(R: _Run, name: str, topic: str):
    if R.d.sasaki is None:
        R.skip(name, topic, "no [sasaki] block")
        return None
    return R.d.sasaki


def suite_sasaki(R: _Run):
    T = _sasaki_tuple(R, "sasaki", "contact-metric")
    if T is None:
        return
    R.residual("almost-contact", "contact-metric", almost_contact_check(T))
    cm = R.residual("contact-metric", "contact-metric", contact_pseudo_metric_check(T, require=False))
    S = sasakian_residual(T)
    N = nijenhuis_J(T)
    R.residual("sasakian", "sasakian-criterion", S)
    R.residual("reeb-derivative", "sasakian-criterion", reeb_derivative_residual(T))
    R.residual("reeb-killing", "sasakian-criterion", lie_xi_g(T))
    R.residual("normal", "sasakian-criterion", N)
    if cm:
        R.flag("sasakian-iff-normal", "sasakian-criterion", S.is_zero() == N.is_zero())
    else:
        R.skip("sasakian-iff-normal", "sasakian-criterion", "not a contact pseudo-metric structure")


def suite_theorem38(R: _Run):
    T = _sasaki_tuple(R, "theorem38", "sasakian-compatibility")
    if T is None:
        return
    R.residual("contact-metric", "contact-metric", contact_pseudo_metric_check(T, require=False))
    rep = theorem38_harness(T, require=False)
    R.residual("compatibility", "sasakian-compatibility", rep.compat)
    R.residual("sasakian-side", "sasakian-compatibility", [rep.sasakian, rep.reeb, rep.lie_g])
    R.flag("equivalence", "sasakian-compatibility", rep.equivalent, reason=rep.verdict)
    R.flag("combined-condition-consistent", "sasakian-compatibility", rep.consistent,
           list(rep.combined.values()))


def suite_corollary39(R: _Run):
    T = _sasaki_tuple(R, "corollary39", "cone-kahler")
    if T is None:
        return
    rep = corollary39_check(T)
    R.residual("omega-closed", "cone-kahler", rep.closed)
    R.residual("hermitian", "cone-kahler", rep.hermitian)
    R.residual("fundamental-form", "cone-kahler", rep.fundamental)
    R.residual("parallel-J", "cone-kahler", rep.parallel)
    R.flag("kahler-iff-sasakian", "cone-kahler", rep.ok == sasakian_residual(T).is_zero())


_RUNNERS: Dict[str, Callable[[_Run], None]] = {
    "lie": suite_lie, "jacobi": suite_jacobi, "compat": suite_compat, "poissonize": suite_poissonize,
    "theorem37": suite_theorem37, "sasaki": suite_sasaki, "theorem38": suite_theorem38,
    "corollary39": suite_corollary39,
}


def run_suite(d: DefinitionFile, suite: str, seed: int = 0, numeric_fallback: bool = False,
              tol: float = 1e-9, poissonized: bool = False) -> CheckReport:
    if suite != "all" and suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}")
    start = time.perf_counter()
    R = _Run(d, seed, numeric_fallback, tol)
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        before = len(R.records)
        if name == "compat":
            suite_compat(R, poissonized=poissonized or suite == "all")
        else:
            _RUNNERS[name](R)
        if suite == "all":
            for rec in R.records[before:]:
                if not rec.name.startswith(name + "/") and rec.name != name:
                    rec.name = f"{name}/{rec.name}"
    report = CheckReport(suite, seed, R.records)
    report.elapsed_ms = (time.perf_counter() - start) * 1000
    return report
