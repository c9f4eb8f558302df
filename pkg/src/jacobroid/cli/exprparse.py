"""Parser for coefficient expressions.

Grammar (whitespace-insensitive)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' INT)?
    atom    := INT | IDENT | 'exp' '(' sum ')' | '(' sum ')'

``p/q`` is ordinary division, so rationals need no token of their own.  The
argument of ``exp`` must be a rational-linear form without constant term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from ..symfun import Chart, Expr, Fn

MAX_POWER = 64
MAX_DEPTH = 200

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Token:
    kind: str   # "int", "ident", "op", "end"
    text: str
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1) -> List[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            out.append(Token("int", m.group(1), col0 + start))
        elif m.group(2) is not None:
            out.append(Token("ident", m.group(2), col0 + start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError([Diagnostic(line, col0 + start, f"unexpected character {ch!r}")])
            out.append(Token("op", ch, col0 + start))
        pos = m.end()
    out.append(Token("end", "", col0 + len(text)))
    return out


class _Parser:
    def __init__(self, chart: Chart, tokens: List[Token], line: int):
        self.chart = chart
        self.toks = tokens
        self.i = 0
        self.line = line
        self.depth = 0

    def fail(self, tok: Token, msg: str):
        raise ParseError([Diagnostic(self.line, tok.col, msg)])

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            self.fail(self.tok, f"expected {op!r}" + (f", found {self.tok.text!r}" if self.tok.text else " before end of input"))

    def parse(self) -> Fn:
        if self.tok.kind == "end":
            self.fail(self.tok, "empty expression")
        v = self.sum()
        if self.tok.kind != "end":
            self.fail(self.tok, f"unexpected {self.tok.text!r}")
        return v

    def sum(self) -> Fn:
        v = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            w = self.product()
            v = v + w if op == "+" else v - w
        return v

    def product(self) -> Fn:
        v = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take()
            w = self.unary()
            if op.text == "*":
                v = v * w
            else:
                if w.is_zero():
                    self.fail(op, "division by zero")
                v = v / w
        return v

    def unary(self) -> Fn:
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            self.depth += 1
            if self.depth > MAX_DEPTH:
                self.fail(self.tok, "expression nested too deeply")
            v = self.unary()
            self.depth -= 1
            return -v if op == "-" else v
        return self.power()

    def power(self) -> Fn:
        v = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            t = self.tok
            if t.kind != "int":
                self.fail(t, "exponent must be a nonnegative integer")
            self.take()
            n = int(t.text)
            if n > MAX_POWER:
                self.fail(t, f"exponent larger than {MAX_POWER}")
            v = v ** n
            if self.tok.kind == "op" and self.tok.text == "^":
                self.fail(self.tok, "chained exponents need parentheses")
        return v

    def atom(self) -> Fn:
        t = self.tok
        if t.kind == "int":
            self.take()
            return Expr.const(self.chart, int(t.text))
        if t.kind == "ident":
            self.take()
            if t.text == "exp":
                self.expect("(")
                arg_tok = self.tok
                arg = self.nested()
                self.expect(")")
                return Expr.exp(self.chart, self.linear_weights(arg, arg_tok))
            if t.text not in self.chart.names:
                self.fail(t, f"unbound name {t.text!r} (coordinates: {', '.join(self.chart.names)})")
            return Expr.coord(self.chart, t.text)
        if self.accept("("):
            v = self.nested()
            self.expect(")")
            return v
        if t.kind == "end":
            self.fail(t, "unexpected end of input")
        self.fail(t, f"unexpected {t.text!r}")

    def nested(self) -> Fn:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail(self.tok, "expression nested too deeply")
        v = self.sum()
        self.depth -= 1
        return v

    def linear_weights(self, arg: Fn, tok: Token) -> Tuple[Fraction, ...]:
        if not isinstance(arg, Expr):
            self.fail(tok, "exp argument must be a rational-linear form")
        w = [Fraction(0)] * self.chart.dim
        for coeff, mono, weight in arg.terms():
            if any(weight) or sum(mono) != 1:
                self.fail(tok, "exp argument must be a rational-linear form without constant term")
            w[mono.index(1)] += coeff
        return tuple(w)


def parse_expr(text: str, chart: Chart, line: int = 1, col: int = 1) -> Fn:
    """Parse ``text`` on ``chart``; every failure is a :class:`ParseError` with positions."""
    try:
        toks = tokenize(text, line, col)
        return _Parser(chart, toks, line).parse()
    except ParseError:
        raise
    except (RecursionError, OverflowError, ZeroDivisionError, ValueError, MemoryError) as exc:
        raise ParseError([Diagnostic(line, col, f"cannot evaluate expression: {exc}")]) from None
