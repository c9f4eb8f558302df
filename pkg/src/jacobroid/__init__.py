"""Exact calculus on skew, Lie and Jacobi algebroids over a coordinate chart."""

from .symfun import Chart, Expr, Frac
from .exterior import CoSec, MultiVec, evaluate, wedge
from .algebroid import AlgebroidDef, bracket, tangent
from .calculus import differential, schouten

__all__ = ["Chart", "Expr", "Frac", "CoSec", "MultiVec", "evaluate", "wedge",
           "AlgebroidDef", "bracket", "tangent", "differential", "schouten"]
