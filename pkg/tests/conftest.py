from fractions import Fraction

import pytest
from hypothesis import strategies as st

from jacobroid.algebroid import tangent
from jacobroid.exterior import CoSec, MultiVec
from jacobroid.jacobi import standard_oplus
from jacobroid.oplusr import contact_to_jacobi, to_oplus
from jacobroid.symfun import Chart, Expr

R2 = Chart(("x", "y"))
R3 = Chart(("x", "y", "z"))
R2T = Chart(("x", "y", "t"))

COEFFS = [Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(3)]


def terms_strategy(chart: Chart, time_name=None, max_degree=2):
    weights = [(0,) * chart.dim]
    if time_name is not None:
        ti = chart.index(time_name)
        for s in (-1, 1):
            w = [0] * chart.dim
            w[ti] = s
            weights.append(tuple(w))
    def spread(slots):
        m = [0] * chart.dim
        for i in slots:
            m[i] += 1
        return m
    mono = st.lists(st.integers(0, chart.dim - 1), max_size=max_degree).map(spread)
    return st.tuples(st.sampled_from(COEFFS), mono, st.sampled_from(weights))


def exprs(chart: Chart, time_name=None, max_terms=3):
    def build(terms):
        e = Expr.zero(chart)
        for c, m, w in terms:
            e = e + Expr.term(chart, c, m, w)
        return e
    return st.lists(terms_strategy(chart, time_name), max_size=max_terms).map(build)


def alternating(cls, chart: Chart, rank: int, degree: int, time_name=None):
    from itertools import combinations
    keys = list(combinations(range(rank), degree))
    return st.lists(exprs(chart, time_name, 2), min_size=len(keys), max_size=len(keys)).map(
        lambda vals: cls(chart, rank, degree, dict(zip(keys, vals))))


def multivecs(chart, rank, degree, time_name=None):
    return alternating(MultiVec, chart, rank, degree, time_name)


def cosecs(chart, rank, degree, time_name=None):
    return alternating(CoSec, chart, rank, degree, time_name)


def heisenberg_eta(chart=R3) -> CoSec:
    return CoSec.from_components(chart, 3, [-Expr.coord(chart, "y"), 0, 1])


@pytest.fixture
def contact_jacobi():
    """``(TM + R, (0,1))`` over R^3 with the Jacobi pair of ``dz - y dx``."""
    J = standard_oplus(tangent(R3))
    pair = contact_to_jacobi(heisenberg_eta())
    return J, pair, to_oplus(pair)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n][1])
