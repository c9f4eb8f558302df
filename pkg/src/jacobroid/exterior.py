"""Sections of exterior powers of a rank-r bundle and of its dual.

Coefficients are stored on strictly increasing index tuples.  With the
``1/(k! l!)`` wedge normalization the coefficient at ``(a1<...<ak)`` is the
value of the element on the frame tuple ``(e_a1, ..., e_ak)`` (or the dual
frame), so ``e^1 ^ e^2`` evaluates to 1 on ``(e_1, e_2)``.
Frame indices are 0-based in the API.
"""

from __future__ import annotations

from itertools import permutations
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .symfun import Chart, ChartMismatch, Expr, Fn, as_fn

Index = Tuple[int, ...]


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if it has repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class KindMismatch(TypeError):
    pass


class _Alternating:
    kind = ""

    __slots__ = ("chart", "rank", "degree", "coeffs")

    def __init__(self, chart: Chart, rank: int, degree: int,
                 coeffs: Mapping[Sequence[int], object] | None = None):
        self.chart = chart
        self.rank = rank
        self.degree = degree
        store: Dict[Index, Fn] = {}
        if degree < 0:
            if coeffs and any(not as_fn(v, chart).is_zero() for v in coeffs.values()):
                raise ValueError("negative degree elements are zero")
            coeffs = None
        for idx, v in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not have length {degree}")
            if any(not 0 <= a < rank for a in idx):
                raise IndexError(f"index {idx} out of range for rank {rank}")
            s = perm_sign(idx)
            f = as_fn(v, chart)
            if s == 0 or f.is_zero():
                continue
            key = tuple(sorted(idx))
            f = f if s > 0 else -f
            prev = store.get(key)
            f = f if prev is None else prev + f
            if f.is_zero():
                store.pop(key, None)
            else:
                store[key] = f
        self.coeffs = store

    @classmethod
    def _raw(cls, chart, rank, degree, coeffs):
        obj = cls.__new__(cls)
        obj.chart = chart
        obj.rank = rank
        obj.degree = degree
        obj.coeffs = coeffs
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, rank: int, degree: int):
        return cls._raw(chart, rank, degree, {})

    @classmethod
    def scalar(cls, chart: Chart, rank: int, f):
        return cls(chart, rank, 0, {(): f})

    @classmethod
    def basis(cls, chart: Chart, rank: int, *idx: int):
        return cls(chart, rank, len(idx), {idx: 1})

    @classmethod
    def from_components(cls, chart: Chart, rank: int, comps: Sequence):
        """Degree-1 element from its ``rank`` components."""
        if len(comps) != rank:
            raise ValueError(f"expected {rank} components, got {len(comps)}")
        return cls(chart, rank, 1, {(a,): c for a, c in enumerate(comps)})

    # access -----------------------------------------------------------
    def __getitem__(self, idx) -> Fn:
        if isinstance(idx, int):
            idx = (idx,)
        idx = tuple(idx)
        s = perm_sign(idx)
        if s == 0:
            return Expr.zero(self.chart)
        f = self.coeffs.get(tuple(sorted(idx)))
        if f is None:
            return Expr.zero(self.chart)
        return f if s > 0 else -f

    def components(self):
        """The ``rank`` components of a degree-1 element."""
        if self.degree != 1:
            raise ValueError("components() is for degree-1 elements")
        return [self[(a,)] for a in range(self.rank)]

    @property
    def function(self) -> Fn:
        if self.degree != 0:
            raise ValueError("not a degree-0 element")
        return self.coeffs.get((), Expr.zero(self.chart))

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self):
        return sorted(self.coeffs.items())

    def nonzero_entries(self) -> int:
        return len(self.coeffs)

    # algebra ----------------------------------------------------------
    def _check(self, other):
        if type(other) is not type(self):
            raise KindMismatch(f"cannot combine {type(self).__name__} and {type(other).__name__}")
        if other.chart != self.chart or other.rank != self.rank:
            raise ChartMismatch("elements live on different bundles")
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError(f"degree {self.degree} vs {other.degree}")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            prev = out.get(k)
            v = v if prev is None else prev + v
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
        return self._raw(self.chart, self.rank, self.degree, out)

    __radd__ = __add__

    def __neg__(self):
        return self._raw(self.chart, self.rank, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "_Alternating":
        f = as_fn(f, self.chart)
        if f.is_zero():
            return self.zero(self.chart, self.rank, self.degree)
        out = {}
        for k, v in self.coeffs.items():
            p = v * f
            if not p.is_zero():
                out[k] = p
        return self._raw(self.chart, self.rank, self.degree, out)

    def __mul__(self, f):
        if isinstance(f, _Alternating):
            return NotImplemented
        return self.scale(f)

    __rmul__ = __mul__

    def map(self, fn) -> "_Alternating":
        out = {}
        for k, v in self.coeffs.items():
            p = fn(v)
            if not p.is_zero():
                out[k] = p
        return self._raw(self.chart, self.rank, self.degree, out)

    def diff(self, coord) -> "_Alternating":
        """Componentwise partial derivative (frame held fixed)."""
        return self.map(lambda f: f.diff(coord))

    def extend(self, chart: Chart) -> "_Alternating":
        return self._raw(chart, self.rank, self.degree,
                         {k: v.extend(chart) for k, v in self.coeffs.items()})

    def restrict(self, chart: Chart) -> "_Alternating":
        return self._raw(chart, self.rank, self.degree,
                         {k: v.restrict(chart) for k, v in self.coeffs.items()})

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if other.chart != self.chart or other.rank != self.rank:
            return False
        if self.degree != other.degree:
            return self.is_zero() and other.is_zero()
        return (self - other).is_zero()

    __hash__ = None

    def __call__(self, *args) -> Fn:
        return evaluate(self, *args)

    def __repr__(self):
        if not self.coeffs:
            return f"{type(self).__name__}(deg {self.degree}: 0)"
        body = ", ".join(f"{tuple(a + 1 for a in k)}: {v}" for k, v in self.items())
        return f"{type(self).__name__}(deg {self.degree}: {body})"


class MultiVec(_Alternating):
    """Section of the k-th exterior power of the bundle."""

    kind = "vec"
    __slots__ = ()


class CoSec(_Alternating):
    """Section of the k-th exterior power of the dual bundle."""

    kind = "form"
    __slots__ = ()


Section = MultiVec


def dual_type(obj_or_type):
    t = obj_or_type if isinstance(obj_or_type, type) else type(obj_or_type)
    return CoSec if t is MultiVec else MultiVec


def wedge(u: _Alternating, v: _Alternating) -> _Alternating:
    if type(u) is not type(v):
        raise KindMismatch("wedge needs elements of the same kind")
    if u.chart != v.chart or u.rank != v.rank:
        raise ChartMismatch("elements live on different bundles")
    cls = type(u)
    deg = u.degree + v.degree
    if u.degree < 0 or v.degree < 0:
        return cls.zero(u.chart, u.rank, -1)
    if deg > u.rank:
        return cls.zero(u.chart, u.rank, deg)
    out: Dict[Index, Fn] = {}
    for I, f in u.coeffs.items():
        sI = set(I)
        for J, g in v.coeffs.items():
            if sI.intersection(J):
                continue
            s = perm_sign(I + J)
            K = tuple(sorted(I + J))
            p = f * g
            p = p if s > 0 else -p
            prev = out.get(K)
            p = p if prev is None else prev + p
            if p.is_zero():
                out.pop(K, None)
            else:
                out[K] = p
    return cls._raw(u.chart, u.rank, deg, out)


def wedge_all(items: Iterable[_Alternating]):
    items = list(items)
    acc = items[0]
    for it in items[1:]:
        acc = wedge(acc, it)
    return acc


def contract(theta: _Alternating, D: _Alternating) -> _Alternating:
    """Interior product by a degree-1 element of the opposite kind.

    Inserts ``theta`` into the first slot: ``(iota_theta D)(...) = D(theta, ...)``.
    """
    if theta.degree != 1:
        raise ValueError("contraction needs a degree-1 element")
    if type(theta) is type(D):
        raise KindMismatch("contraction pairs a section with a cosection")
    if D.degree < 1:
        raise ValueError("cannot contract a degree-0 element")
    if theta.chart != D.chart or theta.rank != D.rank:
        raise ChartMismatch("elements live on different bundles")
    out: Dict[Index, Fn] = {}
    th = theta.coeffs
    for I, f in D.coeffs.items():
        for p, a in enumerate(I):
            c = th.get((a,))
            if c is None:
                continue
            J = I[:p] + I[p + 1:]
            term = c * f
            if p % 2:
                term = -term
            prev = out.get(J)
            term = term if prev is None else prev + term
            if term.is_zero():
                out.pop(J, None)
            else:
                out[J] = term
    return type(D)._raw(D.chart, D.rank, D.degree - 1, out)


def contract_or_zero(theta: _Alternating, D: _Alternating) -> _Alternating:
    """Like :func:`contract` but maps degree-0 elements to the zero element."""
    if D.degree < 1:
        return type(D).zero(D.chart, D.rank, D.degree - 1)
    return contract(theta, D)


def pairing(theta: _Alternating, X: _Alternating) -> Fn:
    """``<theta, X>`` for degree-1 elements of opposite kinds."""
    if theta.degree != 1 or X.degree != 1:
        raise ValueError("pairing needs degree-1 elements")
    if type(theta) is type(X):
        raise KindMismatch("pairing needs a section and a cosection")
    s: Fn = Expr.zero(theta.chart)
    for (a,), f in theta.coeffs.items():
        g = X.coeffs.get((a,))
        if g is not None:
            s = s + f * g
    return s


def evaluate(D: _Alternating, *args: _Alternating) -> Fn:
    """Value of a degree-k element on k degree-1 elements of the opposite kind."""
    if len(args) != D.degree:
        raise ValueError(f"arity {len(args)} does not match degree {D.degree}")
    if D.degree == 0:
        return D.function
    for a in args:
        if a.degree != 1 or type(a) is type(D):
            raise KindMismatch("arguments must be degree-1 elements of the dual kind")
    comps = [a.coeffs for a in args]
    total: Fn = Expr.zero(D.chart)
    k = D.degree
    for I, f in D.coeffs.items():
        acc: Fn = Expr.zero(D.chart)
        for perm in permutations(range(k)):
            prod = None
            for j, pi in enumerate(perm):
                c = comps[j].get((I[pi],))
                if c is None:
                    prod = None
                    break
                prod = c if prod is None else prod * c
            if prod is None:
                continue
            acc = acc + (prod if perm_sign(perm) > 0 else -prod)
        if not acc.is_zero():
            total = total + f * acc
    return total


def frame(chart: Chart, rank: int):
    return [MultiVec.basis(chart, rank, a) for a in range(rank)]


def coframe(chart: Chart, rank: int):
    return [CoSec.basis(chart, rank, a) for a in range(rank)]
