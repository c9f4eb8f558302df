"""Exact coefficient functions over a coordinate chart.

An :class:`Expr` is a finite sum of terms ``c * x^m * exp(w . x)`` with a
rational coefficient ``c``, a nonnegative integer exponent vector ``m`` and a
rational weight vector ``w``.  Terms are kept merged with zero coefficients
dropped, so two Exprs are equal as functions iff their term dictionaries are
equal.  The class is closed under ``+``, ``*`` and partial derivatives.

Quotients that do not divide exactly are represented by :class:`Frac`, a
numerator/denominator pair without gcd reduction.  Zero testing of a Frac is
zero testing of its numerator, so exactness is kept everywhere.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Key = Tuple[Tuple[Fraction, ...], Tuple[int, ...]]
Number = Union[int, Fraction]

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_RESERVED = {"exp"}


class ChartMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names of a single chart."""

    names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n) or n in _RESERVED:
                raise ValueError(f"invalid coordinate name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, coord: Union[str, int]) -> int:
        if isinstance(coord, int):
            if not 0 <= coord < self.dim:
                raise KeyError(f"coordinate index {coord} out of range")
            return coord
        try:
            return self.names.index(coord)
        except ValueError:
            raise KeyError(f"unknown coordinate {coord!r}") from None

    def extended(self, *new: str) -> "Chart":
        for n in new:
            if n in self.names:
                raise ValueError(f"coordinate {n!r} already in chart {self.names}")
        return Chart(self.names + tuple(new))

    def is_subchart_of(self, other: "Chart") -> bool:
        return set(self.names) <= set(other.names)

    def __str__(self):
        return "(" + ",".join(self.names) + ")"


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


@dataclass(frozen=True)
class EvalValue:
    """Value of a function at a rational point.

    ``exact`` lists ``(coefficient, q)`` pairs meaning ``sum coefficient*exp(q)``
    (``None`` when not available, e.g. for a quotient with exponentials);
    ``approx`` is a double-precision value.
    """

    exact: Tuple[Tuple[Fraction, Fraction], ...] | None
    approx: float

    @property
    def rational(self) -> Fraction | None:
        if self.exact is None:
            return None
        if all(q == 0 for _, q in self.exact):
            return sum((c for c, _ in self.exact), Fraction(0))
        return None


class Expr:
    """Immutable polynomial-times-exponential function on a chart."""

    __slots__ = ("chart", "_terms", "_hash")

    def __init__(self, chart: Chart, terms: Mapping[Key, Fraction] | None = None):
        self.chart = chart
        self._terms: Dict[Key, Fraction] = dict(terms) if terms else {}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def _raw(cls, chart: Chart, terms: Dict[Key, Fraction]) -> "Expr":
        e = cls.__new__(cls)
        e.chart = chart
        e._terms = terms
        e._hash = None
        return e

    @staticmethod
    def _zero_w(chart: Chart) -> Tuple[Fraction, ...]:
        return (Fraction(0),) * chart.dim

    @classmethod
    def zero(cls, chart: Chart) -> "Expr":
        return cls._raw(chart, {})

    @classmethod
    def const(cls, chart: Chart, c: Number) -> "Expr":
        c = _as_fraction(c)
        if c == 0:
            return cls.zero(chart)
        return cls._raw(chart, {(cls._zero_w(chart), (0,) * chart.dim): c})

    @classmethod
    def coord(cls, chart: Chart, name: Union[str, int]) -> "Expr":
        i = chart.index(name)
        m = [0] * chart.dim
        m[i] = 1
        return cls._raw(chart, {(cls._zero_w(chart), tuple(m)): Fraction(1)})

    @classmethod
    def term(cls, chart: Chart, coeff: Number, monomial: Sequence[int] | None = None,
             weight: Sequence[Number] | None = None) -> "Expr":
        coeff = _as_fraction(coeff)
        m = tuple(monomial) if monomial is not None else (0,) * chart.dim
        w = tuple(_as_fraction(q) for q in weight) if weight is not None else cls._zero_w(chart)
        if len(m) != chart.dim or len(w) != chart.dim:
            raise ValueError("monomial/weight length does not match chart")
        if any((not isinstance(k, int)) or k < 0 for k in m):
            raise ValueError("monomial exponents must be nonnegative integers")
        if coeff == 0:
            return cls.zero(chart)
        return cls._raw(chart, {(w, m): coeff})

    @classmethod
    def exp(cls, chart: Chart, weight: Union[Sequence[Number], Mapping[str, Number]]) -> "Expr":
        """``exp(sum weight_i * x_i)``."""
        if isinstance(weight, Mapping):
            w = [Fraction(0)] * chart.dim
            for k, v in weight.items():
                w[chart.index(k)] = _as_fraction(v)
        else:
            w = list(weight)
        return cls.term(chart, 1, None, w)

    # inspection -------------------------------------------------------
    def terms(self):
        """Canonically ordered ``(coeff, monomial, weight)`` triples."""
        return [(self._terms[k], k[1], k[0]) for k in sorted(self._terms)]

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        if not self._terms:
            return True
        if len(self._terms) != 1:
            return False
        (w, m), = self._terms
        return not any(w) and not any(m)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return next(iter(self._terms.values()), Fraction(0))

    def is_unit(self) -> bool:
        """Single term with no polynomial part, i.e. ``c*exp(w.x)``."""
        if len(self._terms) != 1:
            return False
        (w, m), = self._terms
        return not any(m)

    def __len__(self):
        return len(self._terms)

    def free_coords(self) -> set:
        used = set()
        for w, m in self._terms:
            for i in range(self.chart.dim):
                if m[i] or w[i]:
                    used.add(self.chart.names[i])
        return used

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Expr | None":
        if isinstance(other, Expr):
            if other.chart != self.chart:
                raise ChartMismatch(f"chart {self.chart} vs {other.chart}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Expr.const(self.chart, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        out = dict(self._terms)
        for k, c in o._terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v += c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Expr._raw(self.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return Expr._raw(self.chart, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self._terms or not o._terms:
            return Expr.zero(self.chart)
        if o.is_constant():
            c = o.constant_value()
            if c == 1:
                return self
            return Expr._raw(self.chart, {k: v * c for k, v in self._terms.items()})
        if self.is_constant():
            return o * self
        out: Dict[Key, Fraction] = {}
        for (w1, m1), c1 in self._terms.items():
            w1z = not any(w1)
            for (w2, m2), c2 in o._terms.items():
                if w1z:
                    w = w2
                elif not any(w2):
                    w = w1
                else:
                    w = tuple(a + b for a, b in zip(w1, w2))
                k = (w, tuple(a + b for a, b in zip(m1, m2)))
                v = out.get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Expr._raw(self.chart, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = Expr.const(self.chart, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * Expr.const(self.chart, Fraction(1) / _as_fraction(other))
        if isinstance(other, Expr):
            return make_frac(self, other)
        if isinstance(other, Frac):
            return make_frac(self * other.den, other.num)
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make_frac(o, self)

    def scale(self, c: Number) -> "Expr":
        return self * Expr.const(self.chart, c)

    # calculus ---------------------------------------------------------
    def diff(self, coord: Union[str, int]) -> "Expr":
        i = self.chart.index(coord)
        out: Dict[Key, Fraction] = {}
        for (w, m), c in self._terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                k = (w, tuple(mm))
                v = out.get(k, 0) + c * m[i]
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
            if w[i]:
                k = (w, m)
                v = out.get(k, 0) + c * w[i]
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Expr._raw(self.chart, out)

    def extend(self, newchart: Chart) -> "Expr":
        """The same function viewed on a chart with more coordinates."""
        if newchart == self.chart:
            return self
        if not self.chart.is_subchart_of(newchart):
            raise ChartMismatch(f"{newchart} does not contain {self.chart}")
        pos = [newchart.index(n) for n in self.chart.names]
        out = {}
        for (w, m), c in self._terms.items():
            ww = [Fraction(0)] * newchart.dim
            mm = [0] * newchart.dim
            for j, p in enumerate(pos):
                ww[p] = w[j]
                mm[p] = m[j]
            out[(tuple(ww), tuple(mm))] = c
        return Expr._raw(newchart, out)

    def restrict(self, newchart: Chart) -> "Expr":
        """Inverse of :meth:`extend`; fails if a dropped coordinate is used."""
        if newchart == self.chart:
            return self
        if not newchart.is_subchart_of(self.chart):
            raise ChartMismatch(f"{newchart} is not a subchart of {self.chart}")
        dropped = set(self.chart.names) - set(newchart.names)
        if self.free_coords() & dropped:
            raise ChartMismatch(f"function depends on {sorted(self.free_coords() & dropped)}")
        pos = [self.chart.index(n) for n in newchart.names]
        return Expr._raw(newchart, {(tuple(w[p] for p in pos), tuple(m[p] for p in pos)): c
                                    for (w, m), c in self._terms.items()})

    def eval(self, point: Mapping[str, Number]) -> EvalValue:
        missing = [n for n in self.chart.names if n not in point]
        if missing:
            raise KeyError(f"point misses coordinates {missing}")
        vals = [_as_fraction(point[n]) for n in self.chart.names]
        grouped: Dict[Fraction, Fraction] = {}
        for (w, m), c in self._terms.items():
            v = c
            for x, k in zip(vals, m):
                if k:
                    v *= x ** k
            q = sum((a * x for a, x in zip(w, vals)), Fraction(0))
            grouped[q] = grouped.get(q, Fraction(0)) + v
        exact = tuple(sorted((c, q) for q, c in grouped.items() if c))
        approx = math.fsum(float(c) * math.exp(float(q)) for c, q in exact)
        return EvalValue(exact, approx)

    # comparison / display --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Expr):
            return self.chart == other.chart and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == Expr.const(self.chart, other)._terms
        if isinstance(other, Frac):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, frozenset(self._terms.items())))
        return self._hash

    def to_str(self) -> str:
        """Render in the definition-file expression grammar."""
        if not self._terms:
            return "0"
        parts = []
        for c, m, w in self.terms():
            factors = []
            for n, k in zip(self.chart.names, m):
                if k == 1:
                    factors.append(n)
                elif k > 1:
                    factors.append(f"{n}^{k}")
            if any(w):
                lin = []
                for n, q in zip(self.chart.names, w):
                    if q:
                        lin.append(_fmt_coeff_times(q, n))
                factors.append("exp(" + _join_signed(lin) + ")")
            mag = abs(c)
            body = "*".join(factors)
            if not factors:
                txt = _fmt_rational(mag)
            elif mag == 1:
                txt = body
            else:
                txt = f"{_fmt_rational(mag)}*{body}"
            parts.append(("-" if c < 0 else "+", txt))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for s, t in parts[1:]:
            out += f" {s} {t}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Expr({self.to_str()!r} on {self.chart})"


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_coeff_times(q: Fraction, name: str) -> str:
    if q == 1:
        return name
    if q == -1:
        return "-" + name
    if q < 0:
        return f"-{_fmt_rational(-q)}*{name}"
    return f"{_fmt_rational(q)}*{name}"


def _join_signed(items: Sequence[str]) -> str:
    out = items[0]
    for it in items[1:]:
        out += f" - {it[1:]}" if it.startswith("-") else f" + {it}"
    return out


# ----------------------------------------------------------------------
# exact division and the fraction field

_DIV_LIMIT = 4000


def _leading(e: Expr) -> Key:
    return max(e._terms)


def exact_div(a: Expr, b: Expr) -> Expr | None:
    """Return ``q`` with ``q*b == a`` exactly, or ``None`` if there is none.

    Long division with respect to the lexicographic order on
    ``(weight, monomial)``, which is compatible with multiplication.  The
    quotient's terms are bounded below by ``min(a)/min(b)``; a candidate
    falling below that bound proves non-divisibility.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero function")
    if a.is_zero():
        return Expr.zero(a.chart)
    if a.chart != b.chart:
        raise ChartMismatch(f"chart {a.chart} vs {b.chart}")
    if b.is_unit():
        (wb, _), cb = next(iter(b._terms.items()))
        inv = Expr._raw(b.chart, {(tuple(-q for q in wb), (0,) * b.chart.dim): 1 / cb})
        return a * inv
    lb_w, lb_m = _leading(b)
    cb = b._terms[(lb_w, lb_m)]
    tw_a, tm_a = min(a._terms)
    tw_b, tm_b = min(b._terms)
    lower = (tuple(x - y for x, y in zip(tw_a, tw_b)), tuple(x - y for x, y in zip(tm_a, tm_b)))
    quotient: Dict[Key, Fraction] = {}
    rem = a
    steps = 0
    while not rem.is_zero():
        steps += 1
        if steps > _DIV_LIMIT:
            return None
        lw, lm = _leading(rem)
        qm = tuple(x - y for x, y in zip(lm, lb_m))
        if any(k < 0 for k in qm):
            return None
        qw = tuple(x - y for x, y in zip(lw, lb_w))
        if (qw, qm) < lower:
            return None
        qc = rem._terms[(lw, lm)] / cb
        quotient[(qw, qm)] = quotient.get((qw, qm), 0) + qc
        rem = rem - Expr._raw(a.chart, {(qw, qm): qc}) * b
    return Expr._raw(a.chart, {k: v for k, v in quotient.items() if v})


class Frac:
    """Quotient ``num/den`` of two Exprs with a non-unit denominator.

    Instances are produced by :func:`make_frac`, which returns a plain Expr
    whenever the quotient is exact.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        self.num = num
        self.den = den

    @property
    def chart(self) -> Chart:
        return self.num.chart

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return False

    def _coerce(self, other):
        if isinstance(other, Frac):
            if other.chart != self.chart:
                raise ChartMismatch(f"chart {self.chart} vs {other.chart}")
            return other
        if isinstance(other, Expr):
            if other.chart != self.chart:
                raise ChartMismatch(f"chart {self.chart} vs {other.chart}")
            return Frac(other, Expr.const(self.chart, 1))
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Frac(Expr.const(self.chart, other), Expr.const(self.chart, 1))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return self
        if o.den == self.den:
            return make_frac(self.num + o.num, self.den)
        if o.den.is_constant():
            return make_frac(self.num + o.num * self.den / o.den.constant_value(), self.den)
        q = exact_div(o.den, self.den)
        if q is not None:
            return make_frac(self.num * q + o.num, o.den)
        q = exact_div(self.den, o.den)
        if q is not None:
            return make_frac(self.num + o.num * q, self.den)
        return make_frac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Frac(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return Expr.zero(self.chart)
        if o.den.is_constant():
            return make_frac(self.num * o.num, self.den * o.den)
        # cancel crosswise before multiplying out
        n1, d2 = _cancel(self.num, o.den)
        n2, d1 = _cancel(o.num, self.den)
        return make_frac(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return self * make_frac(o.den, o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        return make_frac(self.num ** n, self.den ** n)

    def diff(self, coord) -> "Expr | Frac":
        dn = self.num.diff(coord)
        dd = self.den.diff(coord)
        if dd.is_zero():
            return make_frac(dn, self.den)
        return make_frac(dn * self.den - self.num * dd, self.den * self.den)

    def extend(self, newchart: Chart):
        return Frac(self.num.extend(newchart), self.den.extend(newchart))

    def restrict(self, newchart: Chart):
        return Frac(self.num.restrict(newchart), self.den.restrict(newchart))

    def free_coords(self) -> set:
        return self.num.free_coords() | self.den.free_coords()

    def eval(self, point: Mapping[str, Number]) -> EvalValue:
        n = self.num.eval(point)
        d = self.den.eval(point)
        if d.approx == 0 and d.rational == 0:
            raise ZeroDivisionError("denominator vanishes at the sample point")
        exact = None
        if n.rational is not None and d.rational is not None:
            r = n.rational / d.rational
            exact = ((r, Fraction(0)),) if r else ()
        return EvalValue(exact, n.approx / d.approx)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    __hash__ = None

    def to_str(self) -> str:
        return f"({self.num.to_str()})/({self.den.to_str()})"

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Frac({self.to_str()!r} on {self.chart})"


Fn = Union[Expr, Frac]


def _cancel(n: Expr, d: Expr):
    if d.is_constant() or n.is_zero():
        return n, d
    q = exact_div(n, d)
    if q is not None:
        return q, Expr.const(d.chart, 1)
    return n, d


def make_frac(num: Expr, den: Expr) -> Fn:
    """Normalized quotient: an Expr when exact, otherwise a Frac."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero function")
    if num.is_zero():
        return Expr.zero(num.chart)
    q = exact_div(num, den)
    if q is not None:
        return q
    lead = den._terms[_leading(den)]
    if lead != 1:
        inv = Expr.const(den.chart, 1 / lead)
        num, den = num * inv, den * inv
    return Frac(num, den)


def as_fn(value, chart: Chart) -> Fn:
    if isinstance(value, (Expr, Frac)):
        if value.chart != chart:
            raise ChartMismatch(f"chart {value.chart} vs {chart}")
        return value
    return Expr.const(chart, _as_fraction(value))


def is_zero(f) -> bool:
    if isinstance(f, (Expr, Frac)):
        return f.is_zero()
    return f == 0


def fn_extend(f: Fn, chart: Chart) -> Fn:
    return f.extend(chart)


def fn_eval_float(f: Fn, point: Mapping[str, Number]) -> float:
    return f.eval(point).approx


# ----------------------------------------------------------------------
# linear algebra over the fraction field

class SingularMatrix(ValueError):
    pass


def identity(chart: Chart, n: int):
    one, zero = Expr.const(chart, 1), Expr.zero(chart)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    chart = a[0][0].chart
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            s = Expr.zero(chart)
            for k in range(m):
                if not a[i][k].is_zero() and not b[k][j].is_zero():
                    s = s + a[i][k] * b[k][j]
            row.append(s)
        out.append(row)
    return out


def transpose(a):
    return [list(r) for r in zip(*a)]


def _pivot_cost(f: Fn) -> int:
    if isinstance(f, Frac):
        return 1000 + len(f.num) + len(f.den)
    if f.is_constant():
        return 0
    if f.is_unit():
        return 1
    return 10 + len(f)


def invert(matrix: Sequence[Sequence[Fn]]):
    """Exact inverse by Gauss-Jordan elimination over the fraction field.

    The result is checked by multiplying back; any failure to reproduce the
    identity exactly raises :class:`SingularMatrix`.
    """
    n = len(matrix)
    if n == 0 or any(len(r) != n for r in matrix):
        raise ValueError("square matrix expected")
    chart = matrix[0][0].chart
    a = [list(r) + e for r, e in zip(matrix, identity(chart, n))]
    for col in range(n):
        cands = [(i, _pivot_cost(a[i][col])) for i in range(col, n) if not a[i][col].is_zero()]
        if not cands:
            raise SingularMatrix("matrix is singular over the function field")
        piv = min(cands, key=lambda t: t[1])[0]
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        inv_p = 1 / p if not isinstance(p, Expr) else make_frac(Expr.const(chart, 1), p)
        a[col] = [x * inv_p if not x.is_zero() else x for x in a[col]]
        for i in range(n):
            if i != col and not a[i][col].is_zero():
                f = a[i][col]
                a[i] = [x - f * y if not y.is_zero() else x for x, y in zip(a[i], a[col])]
    inv = [r[n:] for r in a]
    check = matmul([list(r) for r in matrix], inv)
    for i in range(n):
        for j in range(n):
            target = 1 if i == j else 0
            if not (check[i][j] - target).is_zero():
                raise SingularMatrix("back-substitution check failed")
    return inv


def det(matrix: Sequence[Sequence[Fn]]) -> Fn:
    """Determinant by fraction-field elimination."""
    n = len(matrix)
    chart = matrix[0][0].chart
    a = [list(r) for r in matrix]
    result: Fn = Expr.const(chart, 1)
    for col in range(n):
        cands = [(i, _pivot_cost(a[i][col])) for i in range(col, n) if not a[i][col].is_zero()]
        if not cands:
            return Expr.zero(chart)
        piv = min(cands, key=lambda t: t[1])[0]
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            result = -result
        p = a[col][col]
        result = result * p
        for i in range(col + 1, n):
            if not a[i][col].is_zero():
                f = a[i][col] / p
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return result


def solve(matrix, rhs):
    """Solve ``matrix @ x = rhs`` for a column vector, exactly."""
    inv = invert(matrix)
    chart = matrix[0][0].chart
    out = []
    for row in inv:
        s = Expr.zero(chart)
        for a, b in zip(row, rhs):
            s = s + a * b
        out.append(s)
    return out


def sum_fns(items: Iterable[Fn], chart: Chart) -> Fn:
    s: Fn = Expr.zero(chart)
    for it in items:
        s = s + it
    return s
