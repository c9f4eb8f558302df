"""Command line interface: ``jacobroid check|poissonize|contactify|examples``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage
or parse errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from ..exterior import CoSec
from ..jacobi import standard_oplus
from ..metric import dual_metric, poissonized_cometric
from ..algebroid import tangent
from ..oplusr import DimensionMismatch, contact_check, contact_to_jacobi, to_oplus
from ..poissonization import build_bar, poissonize
from .deffile import DefinitionFile, emit, load, parse
from .exprparse import Diagnostic, ParseError
from .registry import REGISTRY, list_examples
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

__all__ = ["main", "parse", "emit", "run_suite", "list_examples", "DefinitionFile", "ParseError"]


class UsageError(Exception):
    pass


def read_definition(source: str) -> DefinitionFile:
    """A file path, or the name of a built-in example."""
    if os.path.exists(source):
        return load(source)
    if source in REGISTRY:
        return REGISTRY[source].load()
    raise UsageError(f"no such file or built-in example: {source}")


def _write(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def poissonized_definition(d: DefinitionFile) -> DefinitionFile:
    """Bar realization over ``M x R`` with ``e^-t pi`` and ``e^-t g*`` as a Poisson definition."""
    if not d.has_jacobi:
        raise UsageError("poissonize needs [algebroid] and [jacobi] blocks")
    J = d.jacobi_algebroid()
    bar = build_bar(J)
    ch = bar.chart
    pi = poissonize(J, d.pi, ch.names[-1]) if d.pi is not None else None
    metric = None
    if d.metric is not None and d.metric.rank == J.rank:
        gstar = d.metric if d.metric.carrier == "Adual" else dual_metric(d.metric)
        metric = poissonized_cometric(J, gstar, ch)
    meta = {"name": f"{d.meta.get('name', 'definition')}-poissonized",
            "description": "Poissonization over the time-extended chart", "suite": "compat"}
    return DefinitionFile(ch, bar.realized, CoSec.zero(ch, J.rank, 1), pi, metric=metric, meta=meta)


def contactified_definition(d: DefinitionFile) -> DefinitionFile:
    """Jacobi pair of ``[contact] eta`` on ``TM + R`` together with ``Lambda`` and ``E`` blocks."""
    if d.contact is None:
        raise UsageError("contactify needs a [contact] block")
    try:
        if not contact_check(d.contact):
            raise UsageError("[contact] eta is not a contact form")
    except DimensionMismatch as exc:
        raise UsageError(str(exc)) from None
    pair = contact_to_jacobi(d.contact)
    J = standard_oplus(tangent(d.chart))
    meta = {"name": f"{d.meta.get('name', 'definition')}-jacobi",
            "description": "Jacobi pair of the contact form", "suite": "jacobi"}
    out = DefinitionFile(d.chart, J.base, J.phi0, to_oplus(pair), contact=d.contact, meta=meta)
    out.multivectors = {"Lambda": pair.first, "E": pair.second}
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jacobroid", description="Exact checks for Lie and Jacobi algebroids.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run a check suite on a definition file or built-in example")
    c.add_argument("suite", choices=SUITES + ("all",))
    c.add_argument("file")
    c.add_argument("--json", action="store_true", help="machine-readable report")
    c.add_argument("--seed", type=int, default=0, help="seed of the randomized samples (default 0)")
    c.add_argument("--numeric-fallback", action="store_true",
                   help="decide residual checks by sampled magnitude instead of exact zero")
    c.add_argument("--tol", type=float, default=1e-9, help="tolerance of the numeric fallback")
    c.add_argument("--poissonized", action="store_true",
                   help="compat: also compare with the Poissonized compatibility residual")

    s = sub.add_parser("poissonize", help="emit the Poissonization of a Jacobi definition")
    s.add_argument("file")
    s.add_argument("-o", "--output", default="-")

    k = sub.add_parser("contactify", help="emit the Jacobi pair of a contact form")
    k.add_argument("file")
    k.add_argument("-o", "--output", default="-")

    e = sub.add_parser("examples", help="list built-in examples")
    e.add_argument("--show", metavar="NAME", help="print the definition text of one example")
    return p


def _report_diagnostics(diags: List[Diagnostic], source: str):
    for dg in diags:
        print(f"{source}:{dg}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "examples":
            if args.show:
                if args.show not in REGISTRY:
                    raise UsageError(f"unknown example {args.show!r}")
                sys.stdout.write(REGISTRY[args.show].text)
                return EXIT_OK
            for ex in list_examples():
                print(f"{ex.name:<22} [{ex.suite}, expect {ex.expect}] {ex.description}")
            return EXIT_OK
        d = read_definition(args.file)
        if args.command == "check":
            report = run_suite(d, args.suite, seed=args.seed, numeric_fallback=args.numeric_fallback,
                               tol=args.tol, poissonized=args.poissonized)
            print(report.to_json() if args.json else report.to_table())
            return report.exit_code()
        if args.command == "poissonize":
            _write(emit(poissonized_definition(d)), args.output)
        else:
            _write(emit(contactified_definition(d)), args.output)
        return EXIT_OK
    except ParseError as exc:
        _report_diagnostics(exc.diagnostics, getattr(args, "file", "<input>"))
        return EXIT_USAGE
    except (UsageError, OSError) as exc:
        print(f"jacobroid: {exc}", file=sys.stderr)
        return EXIT_USAGE
