"""INI-like definition files.

Example::

    [chart]
    coords = x, y, z

    [algebroid]
    rank = 4
    anchor.1.1 = 1          # rho(e_1) has d/dx component 1
    structure.1.2.3 = x     # [e_1, e_2] has e_3 component x

    [jacobi]
    phi0.4 = 1
    pi.1.2 = -y

All indices are 1-based.  Blocks: ``chart`` (required), ``meta``,
``algebroid``, ``jacobi``, ``contact``, ``metric``, ``sasaki`` and named
``multivector.NAME`` / ``cosection.NAME`` blocks.  Unset entries are zero.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..algebroid import AlgebroidDef
from ..exterior import CoSec, MultiVec, _Alternating
from ..jacobi import JacobiAlgebroid
from ..metric import Degenerate, Metric, NotSymmetric
from ..sasaki import AlmostContactTuple
from ..symfun import Chart, Expr, Fn
from .exprparse import Diagnostic, ParseError, parse_expr

_SECTION = re.compile(r"^\[\s*([A-Za-z][A-Za-z0-9_]*)(?:\.([A-Za-z_][A-Za-z0-9_]*))?\s*\]$")
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z0-9_]+)*$")

BLOCKS = ("meta", "chart", "algebroid", "jacobi", "contact", "metric", "sasaki")
NAMED = ("multivector", "cosection")
META_KEYS = ("name", "description", "suite", "expect")


@dataclass
class Entry:
    value: str
    line: int
    col: int
    key_col: int = 1


@dataclass
class Section:
    name: str
    line: int
    entries: Dict[str, Entry] = field(default_factory=dict)


@dataclass
class DefinitionFile:
    chart: Chart
    algebroid: Optional[AlgebroidDef] = None
    phi0: Optional[CoSec] = None
    pi: Optional[MultiVec] = None
    contact: Optional[CoSec] = None
    metric: Optional[Metric] = None
    sasaki: Optional[AlmostContactTuple] = None
    multivectors: Dict[str, MultiVec] = field(default_factory=dict)
    cosections: Dict[str, CoSec] = field(default_factory=dict)
    meta: Dict[str, str] = field(default_factory=dict)

    @property
    def has_jacobi(self) -> bool:
        return self.algebroid is not None and self.phi0 is not None

    def jacobi_algebroid(self) -> JacobiAlgebroid:
        """The pair ``(A, phi0)`` without validation; checks report the failures."""
        return JacobiAlgebroid.unchecked(self.algebroid, self.phi0)


# ---------------------------------------------------------------------------
# reading

def _split_sections(text: str, diags: List[Diagnostic]) -> Dict[str, Section]:
    sections: Dict[str, Section] = {}
    current: Optional[Section] = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped or stripped.startswith(";"):
            continue
        indent = len(body) - len(body.lstrip())
        if stripped.startswith("["):
            m = _SECTION.match(stripped)
            if not m:
                diags.append(Diagnostic(ln, indent + 1, f"malformed section header {stripped!r}"))
                current = None
                continue
            kind, name = m.group(1), m.group(2)
            full = kind if name is None else f"{kind}.{name}"
            if (name is None and kind not in BLOCKS) or (name is not None and kind not in NAMED):
                diags.append(Diagnostic(ln, indent + 1, f"unknown block [{full}]"))
                current = None
                continue
            if full in sections:
                diags.append(Diagnostic(ln, indent + 1, f"duplicate block [{full}]"))
                current = None
                continue
            current = sections[full] = Section(full, ln)
            continue
        if "=" not in stripped:
            diags.append(Diagnostic(ln, indent + 1, "expected 'key = value'"))
            continue
        if current is None:
            diags.append(Diagnostic(ln, indent + 1, "entry outside of a known block"))
            continue
        key_part, value = body.split("=", 1)
        key = key_part.strip()
        if not _KEY.match(key):
            diags.append(Diagnostic(ln, indent + 1, f"malformed key {key!r}"))
            continue
        if key in current.entries:
            diags.append(Diagnostic(ln, indent + 1, f"duplicate key {key!r} in [{current.name}]"))
            continue
        vcol = len(key_part) + 2 + (len(value) - len(value.lstrip()))
        current.entries[key] = Entry(value.strip(), ln, vcol, indent + 1)
    return sections


class _Resolver:
    def __init__(self, sections: Dict[str, Section], diags: List[Diagnostic]):
        self.sections = sections
        self.diags = diags
        self.chart: Optional[Chart] = None

    def error(self, e: Entry, msg: str, key: bool = False):
        self.diags.append(Diagnostic(e.line, e.key_col if key else e.col, msg))

    def expr(self, e: Entry) -> Optional[Fn]:
        try:
            return parse_expr(e.value, self.chart, e.line, e.col)
        except ParseError as exc:
            self.diags.extend(exc.diagnostics)
            return None

    def integer(self, e: Entry, lo: int = 0) -> Optional[int]:
        try:
            v = int(e.value)
        except ValueError:
            self.error(e, f"expected an integer, found {e.value!r}")
            return None
        if v < lo:
            self.error(e, f"value must be at least {lo}")
            return None
        return v

    def indexed(self, sec: Section, prefix: str, bounds: Tuple[int, ...]):
        """Yield ``(indices0, Fn, entry)`` for keys ``prefix.i.j...`` within ``bounds``."""
        for key, e in sec.entries.items():
            parts = key.split(".")
            if parts[0] != prefix:
                continue
            idx = parts[1:]
            if len(idx) != len(bounds):
                self.error(e, f"{prefix} takes {len(bounds)} indices", key=True)
                continue
            out = []
            for p, bound in zip(idx, bounds):
                if not p.isdigit() or not 1 <= int(p) <= bound:
                    self.error(e, f"index {p} out of range 1..{bound} in {key!r}", key=True)
                    break
                out.append(int(p) - 1)
            else:
                v = self.expr(e)
                if v is not None:
                    yield tuple(out), v, e

    def unknown_keys(self, sec: Section, allowed_plain=(), allowed_prefix=()):
        for key, e in sec.entries.items():
            head = key.split(".")[0]
            if key in allowed_plain or (head in allowed_prefix and "." in key):
                continue
            self.error(e, f"unknown key {key!r} in [{sec.name}]", key=True)

    # blocks -----------------------------------------------------------
    def read_chart(self) -> Optional[Chart]:
        sec = self.sections.get("chart")
        if sec is None:
            self.diags.append(Diagnostic(1, 1, "missing [chart] block"))
            return None
        self.unknown_keys(sec, ("coords",))
        e = sec.entries.get("coords")
        if e is None:
            self.diags.append(Diagnostic(sec.line, 1, "[chart] needs 'coords'"))
            return None
        names = tuple(n.strip() for n in e.value.split(","))
        try:
            return Chart(names)
        except ValueError as exc:
            self.error(e, str(exc))
            return None

    def read_algebroid(self) -> Optional[AlgebroidDef]:
        sec = self.sections.get("algebroid")
        if sec is None:
            return None
        self.unknown_keys(sec, ("rank",), ("anchor", "structure"))
        e = sec.entries.get("rank")
        if e is None:
            self.diags.append(Diagnostic(sec.line, 1, "[algebroid] needs 'rank'"))
            return None
        r = self.integer(e, lo=1)
        if r is None:
            return None
        m = self.chart.dim
        zero = Expr.zero(self.chart)
        anchor = [[zero] * m for _ in range(r)]
        for (a, i), v, _ in self.indexed(sec, "anchor", (r, m)):
            anchor[a][i] = v
        structure: Dict[Tuple[int, int], List[Fn]] = {}
        seen: Dict[Tuple[int, int, int], Entry] = {}
        for (a, b, c), v, ent in self.indexed(sec, "structure", (r, r, r)):
            if a == b:
                self.error(ent, f"diagonal structure entry [e_{a + 1}, e_{a + 1}] must vanish", key=True)
                continue
            lo, hi = min(a, b), max(a, b)
            if (lo, hi, c) in seen:
                self.error(ent, f"structure component ({lo + 1},{hi + 1},{c + 1}) given twice", key=True)
                continue
            seen[(lo, hi, c)] = ent
            comps = structure.setdefault((lo, hi), [zero] * r)
            comps[c] = v if a < b else -v
        return AlgebroidDef(self.chart, r, anchor, structure)

    def _alternating(self, cls, sec: Section, prefix: str, rank: int, degree: int):
        coeffs = {}
        seen = {}
        for idx, v, ent in self.indexed(sec, prefix, (rank,) * degree):
            if len(set(idx)) != len(idx):
                if not v.is_zero():
                    self.error(ent, "repeated index on an alternating entry", key=True)
                continue
            key = tuple(sorted(idx))
            if key in seen:
                self.error(ent, f"entry {'.'.join(str(i + 1) for i in key)} given twice", key=True)
                continue
            seen[key] = ent
            coeffs[idx] = v
        return cls(self.chart, rank, degree, coeffs)

    def read_jacobi(self, A: Optional[AlgebroidDef]):
        sec = self.sections.get("jacobi")
        if sec is None:
            return None, None
        if A is None:
            self.diags.append(Diagnostic(sec.line, 1, "[jacobi] needs an [algebroid] block"))
            return None, None
        self.unknown_keys(sec, (), ("phi0", "pi"))
        phi0 = self._alternating(CoSec, sec, "phi0", A.rank, 1)
        has_pi = any(k.startswith("pi.") for k in sec.entries)
        pi = self._alternating(MultiVec, sec, "pi", A.rank, 2) if has_pi else None
        return phi0, pi

    def read_contact(self) -> Optional[CoSec]:
        sec = self.sections.get("contact")
        if sec is None:
            return None
        self.unknown_keys(sec, (), ("eta",))
        return self._alternating(CoSec, sec, "eta", self.chart.dim, 1)

    def _symmetric(self, sec: Section, prefix: str, n: int):
        zero = Expr.zero(self.chart)
        rows = [[zero] * n for _ in range(n)]
        given = {}
        for (a, b), v, ent in self.indexed(sec, prefix, (n, n)):
            given[(a, b)] = (v, ent)
        for (a, b), (v, ent) in given.items():
            rows[a][b] = v
            other = given.get((b, a))
            if other is None:
                rows[b][a] = v
            elif a < b and not (other[0] - v).is_zero():
                self.error(ent, f"non-symmetric {prefix}: entries {a + 1}.{b + 1} and {b + 1}.{a + 1} differ",
                           key=True)
        return rows

    def read_metric(self, A: Optional[AlgebroidDef]) -> Optional[Metric]:
        sec = self.sections.get("metric")
        if sec is None:
            return None
        self.unknown_keys(sec, ("carrier",), ("gram",))
        carrier = "A"
        e = sec.entries.get("carrier")
        if e is not None:
            carrier = e.value
            if carrier not in ("A", "Adual"):
                self.error(e, "carrier must be A or Adual")
                return None
        n = A.rank if A is not None else self.chart.dim
        before = len(self.diags)
        rows = self._symmetric(sec, "gram", n)
        if len(self.diags) > before:
            return None
        try:
            return Metric.from_rows(self.chart, rows, carrier)
        except (NotSymmetric, Degenerate) as exc:
            self.diags.append(Diagnostic(sec.line, 1, f"[metric] {exc}"))
            return None

    def read_sasaki(self) -> Optional[AlmostContactTuple]:
        sec = self.sections.get("sasaki")
        if sec is None:
            return None
        self.unknown_keys(sec, ("q",), ("phi", "xi", "eta", "g"))
        m = self.chart.dim
        zero = Expr.zero(self.chart)
        q = 0
        e = sec.entries.get("q")
        if e is not None:
            q = self.integer(e, lo=0)
            if q is None:
                return None
        before = len(self.diags)
        phi = [[zero] * m for _ in range(m)]
        for (i, j), v, _ in self.indexed(sec, "phi", (m, m)):
            phi[i][j] = v
        xi = [zero] * m
        for (i,), v, _ in self.indexed(sec, "xi", (m,)):
            xi[i] = v
        eta = [zero] * m
        for (i,), v, _ in self.indexed(sec, "eta", (m,)):
            eta[i] = v
        g = self._symmetric(sec, "g", m)
        if len(self.diags) > before:
            return None
        try:
            return AlmostContactTuple.build(self.chart, phi, xi, eta, g, q)
        except (NotSymmetric, Degenerate, ValueError) as exc:
            self.diags.append(Diagnostic(sec.line, 1, f"[sasaki] {exc}"))
            return None

    def read_named(self, A: Optional[AlgebroidDef]):
        mvs, cos = {}, {}
        for full, sec in self.sections.items():
            kind, _, name = full.partition(".")
            if kind not in NAMED:
                continue
            self.unknown_keys(sec, ("degree", "rank"), ("coeff",))
            rank = A.rank if A is not None else self.chart.dim
            if "rank" in sec.entries:
                rank = self.integer(sec.entries["rank"], lo=1)
            e = sec.entries.get("degree")
            if e is None:
                self.diags.append(Diagnostic(sec.line, 1, f"[{full}] needs 'degree'"))
                continue
            deg = self.integer(e, lo=0)
            if deg is None or rank is None:
                continue
            if deg > rank:
                self.error(e, f"degree {deg} exceeds rank {rank}")
                continue
            cls = MultiVec if kind == "multivector" else CoSec
            elem = self._alternating(cls, sec, "coeff", rank, deg)
            (mvs if kind == "multivector" else cos)[name] = elem
        return mvs, cos


def parse(source) -> DefinitionFile:
    """Parse definition text, or a file when ``source`` is a path object.

    Raises :class:`ParseError` carrying every positioned diagnostic.
    """
    if isinstance(source, os.PathLike):
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    if not isinstance(source, str):
        raise ParseError([Diagnostic(1, 1, "definition must be text")])
    diags: List[Diagnostic] = []
    try:
        sections = _split_sections(source, diags)
        R = _Resolver(sections, diags)
        R.chart = R.read_chart()
        if R.chart is None:
            raise ParseError(diags)
        meta = {}
        if "meta" in sections:
            R.unknown_keys(sections["meta"], META_KEYS)
            meta = {k: e.value for k, e in sections["meta"].entries.items() if k in META_KEYS}
        A = R.read_algebroid()
        phi0, pi = R.read_jacobi(A)
        d = DefinitionFile(R.chart, A, phi0, pi, R.read_contact(), R.read_metric(A), R.read_sasaki(),
                           meta=meta)
        d.multivectors, d.cosections = R.read_named(A)
    except ParseError:
        raise
    except Exception as exc:   # parsing is total: anything unexpected becomes a diagnostic
        diags.append(Diagnostic(1, 1, f"internal error while reading definition: {exc!r}"))
    if diags:
        raise ParseError(sorted(diags, key=lambda d: (d.line, d.col)))
    return d


def load(path) -> DefinitionFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# writing

def _fmt(f: Fn) -> str:
    return f.to_str()


def _emit_alternating(lines: List[str], prefix: str, elem: _Alternating):
    for idx in sorted(elem.coeffs):
        lines.append(f"{prefix}.{'.'.join(str(i + 1) for i in idx)} = {_fmt(elem.coeffs[idx])}")


def _emit_matrix(lines: List[str], prefix: str, rows, symmetric: bool = False):
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if symmetric and j < i:
                continue
            if not v.is_zero():
                lines.append(f"{prefix}.{i + 1}.{j + 1} = {_fmt(v)}")


def emit(d: DefinitionFile) -> str:
    lines: List[str] = []
    if d.meta:
        lines.append("[meta]")
        for k in META_KEYS:
            if k in d.meta:
                lines.append(f"{k} = {d.meta[k]}")
        lines.append("")
    lines += ["[chart]", f"coords = {', '.join(d.chart.names)}", ""]
    A = d.algebroid
    if A is not None:
        lines += ["[algebroid]", f"rank = {A.rank}"]
        _emit_matrix(lines, "anchor", A.anchor)
        for (a, b), comps in sorted(A.structure_dict().items()):
            for c, v in enumerate(comps):
                if not v.is_zero():
                    lines.append(f"structure.{a + 1}.{b + 1}.{c + 1} = {_fmt(v)}")
        lines.append("")
    if d.phi0 is not None:
        lines.append("[jacobi]")
        _emit_alternating(lines, "phi0", d.phi0)
        if d.pi is not None:
            if d.pi.is_zero() and d.pi.rank >= 2:
                lines.append("pi.1.2 = 0")
            _emit_alternating(lines, "pi", d.pi)
        lines.append("")
    if d.contact is not None:
        lines.append("[contact]")
        _emit_alternating(lines, "eta", d.contact)
        lines.append("")
    if d.metric is not None:
        lines += ["[metric]", f"carrier = {d.metric.carrier}"]
        _emit_matrix(lines, "gram", d.metric.gram, symmetric=True)
        lines.append("")
    T = d.sasaki
    if T is not None:
        lines += ["[sasaki]", f"q = {T.q}"]
        _emit_matrix(lines, "phi", T.phi)
        _emit_alternating(lines, "xi", T.xi)
        _emit_alternating(lines, "eta", T.eta)
        _emit_matrix(lines, "g", T.g.gram, symmetric=True)
        lines.append("")
    default_rank = A.rank if A is not None else d.chart.dim
    for kind, store in (("multivector", d.multivectors), ("cosection", d.cosections)):
        for name in sorted(store):
            elem = store[name]
            lines += [f"[{kind}.{name}]", f"degree = {elem.degree}"]
            if elem.rank != default_rank:
                lines.append(f"rank = {elem.rank}")
            _emit_alternating(lines, "coeff", elem)
            lines.append("")
    return "\n".join(lines).rstrip() + "\n"


# ---------------------------------------------------------------------------
# semantic comparison

def _same_elem(u, v) -> bool:
    if u is None or v is None:
        return u is v
    return (u.degree == v.degree and u.rank == v.rank and u.chart == v.chart and (u - v).is_zero())


def _same_matrix(P, Q) -> bool:
    return len(P) == len(Q) and all((a - b).is_zero() for r, s in zip(P, Q) for a, b in zip(r, s))


def same_definition(d1: DefinitionFile, d2: DefinitionFile) -> bool:
    if d1.chart != d2.chart or d1.meta != d2.meta:
        return False
    if (d1.algebroid is None) != (d2.algebroid is None):
        return False
    if d1.algebroid is not None and not d1.algebroid.same_as(d2.algebroid):
        return False
    if not (_same_elem(d1.phi0, d2.phi0) and _same_elem(d1.pi, d2.pi) and _same_elem(d1.contact, d2.contact)):
        return False
    if (d1.metric is None) != (d2.metric is None):
        return False
    if d1.metric is not None and not d1.metric.equals(d2.metric):
        return False
    T1, T2 = d1.sasaki, d2.sasaki
    if (T1 is None) != (T2 is None):
        return False
    if T1 is not None:
        if T1.q != T2.q or not _same_matrix(T1.phi, T2.phi) or not T1.g.equals(T2.g):
            return False
        if not (_same_elem(T1.xi, T2.xi) and _same_elem(T1.eta, T2.eta)):
            return False
    for a, b in ((d1.multivectors, d2.multivectors), (d1.cosections, d2.cosections)):
        if set(a) != set(b) or any(not _same_elem(a[k], b[k]) for k in a):
            return False
    return True
