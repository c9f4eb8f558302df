import json

import pytest
from hypothesis import given, settings, strategies as st

from jacobroid.cli import contactified_definition, main, poissonized_definition
from jacobroid.cli.deffile import emit, parse, same_definition
from jacobroid.cli.exprparse import ParseError, parse_expr
from jacobroid.cli.registry import REGISTRY, get, list_examples
from jacobroid.cli.suites import SKIPPED, TOPICS, run_suite
from jacobroid.symfun import Expr

from conftest import R2T, R3

MINIMAL = """\
[chart]
coords = x, y

[algebroid]
rank = 2
anchor.1.1 = 1
anchor.2.2 = 1

[jacobi]
pi.1.2 = 1
"""

BAD = """\
[chart]
coords = x, y, z

[algebroid]
rank = 3
structure.1.1.2 = 1
anchor.4.1 = 1
anchor.1.1 = x * * y
anchor.2.2 = q
[metric]
gram.1.2 = 1
"""


def codes(text):
    with pytest.raises(ParseError) as exc:
        parse(text)
    return [(d.line, d.col) for d in exc.value.diagnostics], [d.message for d in exc.value.diagnostics]


class TestExpressions:
    def test_canonical_values(self):
        x = Expr.coord(R3, "x")
        assert parse_expr("2*x + 3*x", R3) == 5 * x
        assert parse_expr("(x + 1)^2 - x^2", R3) == 2 * x + 1
        assert parse_expr("exp(t) * exp(-t)", R2T) == 1
        assert str(parse_expr("exp(2/3*x - t)", R2T)) == "exp(2/3*x - t)"

    def test_exp_needs_linear_form(self):
        for text in ("exp(x*y)", "exp(1 + x)", "exp(x^2)"):
            with pytest.raises(ParseError):
                parse_expr(text, R3)

    def test_positions(self):
        with pytest.raises(ParseError) as exc:
            parse_expr("x + w", R3, line=4, col=10)
        d = exc.value.diagnostics[0]
        assert (d.line, d.col) == (4, 14)
        assert "w" in d.message

    def test_division(self):
        x = Expr.coord(R3, "x")
        assert parse_expr("(x^2 - 1)/(x - 1)", R3) == x + 1
        with pytest.raises(ParseError):
            parse_expr("x/0", R3)

    @settings(max_examples=200, deadline=None)
    @given(st.text(alphabet="xyz0123456789+-*/^()exp ,.", max_size=30))
    def test_parse_is_total(self, text):
        try:
            parse_expr(text, R3)
        except ParseError as exc:
            assert exc.diagnostics

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(["x", "y*z", "exp(-y)", "1/2", "x^3"]),
           st.sampled_from(["x", "2", "exp(z - x)", "y^2"]))
    def test_printed_form_reparses(self, a, b):
        e = parse_expr(f"({a})*({b}) - {b}", R3)
        assert parse_expr(str(e), R3) == e


class TestDefinitionFiles:
    def test_minimal(self):
        d = parse(MINIMAL)
        assert d.chart.names == ("x", "y")
        assert d.algebroid.rank == 2
        assert d.has_jacobi
        assert d.phi0.is_zero()
        assert same_definition(parse(emit(d)), d)

    def test_positioned_errors(self):
        where, messages = codes(BAD)
        assert where == sorted(where)
        lines = {ln for ln, _ in where}
        assert {6, 7, 8, 9, 10} <= lines
        assert any("diagonal" in m for m in messages)
        assert any("'q'" in m for m in messages)

    def test_unknown_block_and_key(self):
        _, messages = codes(MINIMAL + "\n[nonsense]\nk = 1\n")
        assert any("nonsense" in m for m in messages)
        _, messages = codes(MINIMAL.replace("rank = 2", "rank = 2\nrnak = 3"))
        assert any("rnak" in m for m in messages)

    def test_duplicate_key(self):
        codes(MINIMAL.replace("anchor.2.2 = 1", "anchor.2.2 = 1\nanchor.2.2 = 2"))

    def test_comments(self):
        d = parse(MINIMAL.replace("pi.1.2 = 1", "pi.1.2 = x  # a comment\n; full-line comment"))
        assert d.pi[(0, 1)] == Expr.coord(d.chart, "x")

    def test_file_path(self, tmp_path):
        p = tmp_path / "min.def"
        p.write_text(MINIMAL)
        assert same_definition(parse(p), parse(MINIMAL))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from(MINIMAL.splitlines() + ["[metric]", "gram.1.1 = x", "= 3", "[", "rank"]),
                    max_size=14))
    def test_parse_never_crashes(self, lines):
        try:
            parse("\n".join(lines))
        except ParseError as exc:
            assert all(dg.line >= 1 for dg in exc.diagnostics)


class TestRegistry:
    @pytest.mark.parametrize("name", list(REGISTRY))
    def test_round_trip(self, name):
        ex = get(name)
        d = ex.load()
        assert same_definition(parse(emit(d)), d)
        assert same_definition(d, ex.build())

    @pytest.mark.parametrize("name", list(REGISTRY))
    def test_expected_outcome(self, name):
        ex = get(name)
        report = run_suite(ex.load(), ex.suite)
        assert report.failed == (ex.expect == "fail")

    def test_unknown(self):
        with pytest.raises(KeyError):
            get("nope")
        assert [e.name for e in list_examples()] == list(REGISTRY)


class TestReports:
    def stable(self, report):
        out = report.as_json()
        out.pop("elapsed_ms")
        return out

    @pytest.mark.parametrize("name", ["trivial-abelian", "contact-r3", "nonjacobi-phi0"])
    def test_deterministic(self, name):
        d = REGISTRY[name].load()
        assert self.stable(run_suite(d, "all", seed=3)) == self.stable(run_suite(d, "all", seed=3))

    def test_json_shape_and_topics(self):
        rep = run_suite(REGISTRY["heisenberg-sasaki"].load(), "theorem38", seed=1).as_json()
        assert set(rep) == {"suite", "checks", "seed", "elapsed_ms"}
        for c in rep["checks"]:
            assert set(c) >= {"name", "verdict", "paper_ref", "residual_nonzero_entries", "max_abs_sample"}
            assert c["paper_ref"] in TOPICS

    def test_skipped_with_reason(self):
        rep = run_suite(REGISTRY["broken-jacobiator"].load(), "sasaki")
        assert [c.verdict for c in rep.checks] == [SKIPPED]
        assert rep.checks[0].reason
        assert not rep.failed

    def test_numeric_fallback_agrees(self):
        d = REGISTRY["heisenberg-perturbed"].load()
        exact = run_suite(d, "sasaki")
        numeric = run_suite(d, "sasaki", numeric_fallback=True, tol=1e-9)
        assert [c.verdict for c in exact.checks] == [c.verdict for c in numeric.checks]


class TestMain:
    def test_exit_codes(self, capsys, tmp_path):
        assert main(["check", "lie", "trivial-abelian"]) == 0
        assert main(["check", "lie", "broken-jacobiator"]) == 1
        assert main(["check", "sasaki", "broken-jacobiator"]) == 0
        assert main(["check", "lie", str(tmp_path / "missing.def")]) == 2
        assert main(["frobnicate"]) == 2
        bad = tmp_path / "bad.def"
        bad.write_text(BAD)
        assert main(["check", "lie", str(bad)]) == 2
        err = capsys.readouterr().err
        assert f"{bad}:6:" in err

    def test_json_output(self, capsys):
        assert main(["check", "jacobi", "contact-r3", "--json", "--seed", "5"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["seed"] == 5 and out["suite"] == "jacobi"

    def test_examples_listing(self, capsys):
        assert main(["examples"]) == 0
        assert "heisenberg-sasaki" in capsys.readouterr().out
        assert main(["examples", "--show", "contact-r3"]) == 0
        assert "[contact]" in capsys.readouterr().out
        assert main(["examples", "--show", "nope"]) == 2

    def test_contactify(self, tmp_path, capsys):
        out = tmp_path / "c.def"
        assert main(["contactify", "heisenberg-sasaki", "-o", str(out)]) == 0
        d = parse(out)
        assert set(d.multivectors) == {"Lambda", "E"}
        assert not run_suite(d, "jacobi").failed
        assert main(["contactify", "trivial-abelian"]) == 2

    def test_poissonize(self, tmp_path):
        out = tmp_path / "p.def"
        assert main(["poissonize", "heisenberg-sasaki", "-o", str(out)]) == 0
        d = parse(out)
        assert d.chart.names[-1] == "t"
        assert not run_suite(d, "compat").failed
        assert main(["poissonize", "broken-jacobiator"]) == 2

    def test_helpers_round_trip(self):
        d = REGISTRY["contact-r3"].load()
        c = contactified_definition(d)
        assert same_definition(parse(emit(c)), c)
        p = poissonized_definition(d)
        assert same_definition(parse(emit(p)), p)
