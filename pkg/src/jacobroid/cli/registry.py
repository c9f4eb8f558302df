"""Built-in examples, stored as definition-file text."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List

from ..algebroid import AlgebroidDef, lie_algebra, tangent
from ..exterior import CoSec, MultiVec
from ..jacobi import standard_oplus
from ..metric import Metric, dual_metric
from ..oplusr import contact_to_jacobi, to_oplus
from ..sasaki import (AlmostContactTuple, big_metric, derive_heisenberg_tuple, perturbed_metric_tuple,
                      squashed_heisenberg_tuple)
from ..symfun import Chart, Expr
from .deffile import DefinitionFile, emit, parse


@dataclass(frozen=True)
class Example:
    name: str
    description: str
    suite: str
    expect: str          # "pass" or "fail" for the default suite
    build: Callable[[], DefinitionFile]

    @property
    def text(self) -> str:
        return _text(self.name)

    def load(self) -> DefinitionFile:
        return parse(self.text)


def _meta(ex_name: str) -> Dict[str, str]:
    ex = REGISTRY[ex_name]
    return {"name": ex.name, "description": ex.description, "suite": ex.suite, "expect": ex.expect}


def _trivial_abelian() -> DefinitionFile:
    A = lie_algebra({}, 2)
    phi0 = CoSec.basis(A.chart, 2, 0)
    pi = MultiVec.basis(A.chart, 2, 0, 1)
    return DefinitionFile(A.chart, A, phi0, pi, meta=_meta("trivial-abelian"))


def _aff1_point() -> DefinitionFile:
    A = lie_algebra({(0, 1): [0, 1]}, 2)
    phi0 = CoSec.basis(A.chart, 2, 0)
    return DefinitionFile(A.chart, A, phi0, None, meta=_meta("aff1-point"))


def _tm_r2_flat_poisson() -> DefinitionFile:
    C = Chart(("x", "y"))
    A = tangent(C)
    d = DefinitionFile(C, A, CoSec.zero(C, 2, 1), MultiVec.basis(C, 2, 0, 1),
                       metric=Metric.identity(C, 2, "Adual"), meta=_meta("tm-r2-flat-poisson"))
    return d


def _heisenberg_eta(C: Chart) -> CoSec:
    return CoSec.from_components(C, 3, [-Expr.coord(C, "y"), 0, 1])


def _contact_blocks(eta: CoSec):
    """Algebroid ``TM + R``, ``phi0 = (0, 1)`` and the Jacobi pair of ``eta`` on it."""
    J = standard_oplus(tangent(eta.chart))
    return J.base, J.phi0, to_oplus(contact_to_jacobi(eta))


def _contact_r3() -> DefinitionFile:
    C = Chart(("x", "y", "z"))
    eta = _heisenberg_eta(C)
    A, phi0, pi = _contact_blocks(eta)
    return DefinitionFile(C, A, phi0, pi, contact=eta, meta=_meta("contact-r3"))


def _sasaki_definition(T: AlmostContactTuple, name: str) -> DefinitionFile:
    eta_eps = T.eta.scale(T.epsilon)
    A, phi0, pi = _contact_blocks(eta_eps)
    return DefinitionFile(T.chart, A, phi0, pi, contact=T.eta, metric=dual_metric(big_metric(T)),
                          sasaki=T, meta=_meta(name))


def _heisenberg_sasaki() -> DefinitionFile:
    return _sasaki_definition(derive_heisenberg_tuple(1), "heisenberg-sasaki")


def _heisenberg_perturbed() -> DefinitionFile:
    return _sasaki_definition(perturbed_metric_tuple(derive_heisenberg_tuple(1)), "heisenberg-perturbed")


def _heisenberg_squashed() -> DefinitionFile:
    return _sasaki_definition(squashed_heisenberg_tuple(), "heisenberg-squashed")


def _broken_jacobiator() -> DefinitionFile:
    C = Chart(("x",))
    x = Expr.coord(C, "x")
    anchor = [[0], [0], [1]]
    A = AlgebroidDef(C, 3, anchor, {(0, 1): [0, 0, x], (0, 2): [0, 1, 0]})
    return DefinitionFile(C, A, meta=_meta("broken-jacobiator"))


def _nonjacobi_phi0() -> DefinitionFile:
    C = Chart(("x", "y"))
    A = tangent(C)
    phi0 = CoSec.from_components(C, 2, [Expr.coord(C, "y"), 0])
    return DefinitionFile(C, A, phi0, MultiVec.basis(C, 2, 0, 1), meta=_meta("nonjacobi-phi0"))


_ENTRIES: List[Example] = [
    Example("trivial-abelian", "rank-2 abelian Lie algebra over a point-like chart; every check holds",
            "lie", "pass", _trivial_abelian),
    Example("aff1-point", "the affine Lie algebra [e1, e2] = e2 with the closed cosection e^1",
            "lie", "pass", _aff1_point),
    Example("tm-r2-flat-poisson", "TR^2 with the constant Poisson bivector and the Euclidean cometric",
            "compat", "pass", _tm_r2_flat_poisson),
    Example("contact-r3", "R^3 with eta = dz - y dx and its Jacobi pair on TM + R",
            "jacobi", "pass", _contact_r3),
    Example("heisenberg-sasaki", "Sasakian structure on the Heisenberg contact form of R^3",
            "theorem38", "pass", _heisenberg_sasaki),
    Example("heisenberg-perturbed", "Heisenberg tuple with g_yy scaled by 1 + x^2; compatibility and "
            "the Sasakian conditions fail together", "theorem38", "fail", _heisenberg_perturbed),
    Example("heisenberg-squashed", "contact metric but not Sasakian (squashed plane metric); "
            "the Sasakian and normality checks fail together", "sasaki", "fail", _heisenberg_squashed),
    Example("broken-jacobiator", "rank-3 skew algebroid with [e1,e2] = x e3, [e1,e3] = e2, "
            "rho(e3) = d/dx; the Jacobi identity fails", "lie", "fail", _broken_jacobiator),
    Example("nonjacobi-phi0", "TR^2 with phi0 = y dx, which is not closed", "jacobi", "fail",
            _nonjacobi_phi0),
]

REGISTRY: Dict[str, Example] = {e.name: e for e in _ENTRIES}


@lru_cache(maxsize=None)
def _text(name: str) -> str:
    return emit(REGISTRY[name].build())


def list_examples() -> List[Example]:
    return list(_ENTRIES)


def get(name: str) -> Example:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(REGISTRY)}") from None
