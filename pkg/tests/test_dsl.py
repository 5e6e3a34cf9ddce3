"""
Tests for the .coord parser, diagnostics and canonical printer.
"""

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import APPS, VISION
from coordsched_cli.core.dsl.declarations import AppDecl, Objective, PortDirection
from coordsched_cli.core.dsl.diagnostics import Diagnostic, SourceSpan, render_diagnostics
from coordsched_cli.core.dsl.parser import parse_app, parse_app_file
from coordsched_cli.core.dsl.printer import format_app, format_ms

MINIMAL = """
app Tiny {
  period 10ms;
  deadline 8ms;
  type T;
  component Src { out T o; version v1 on big; }
  component Dst { in T i; version v1 on big; }
  edge Src.o -> Dst.i;
}
"""


def messages(result):
    assert isinstance(result, list), "expected diagnostics"
    return [d.message for d in result]


class TestParseApp:
    def test_bundled_vision(self):
        decl = parse_app_file(VISION)
        assert isinstance(decl, AppDecl)
        assert decl.app_name == "Vision"
        assert decl.period_ms == 50.0
        assert decl.deadline_ms == 40.0
        assert decl.objective is Objective.MINIMIZE_ENERGY
        assert [c.name for c in decl.components] == [
            "ImageCapture", "ObjectDetection", "OpticalFlow", "DecisionMaking", "DecisionRec",
        ]
        assert len(decl.edges) == 5
        detection = decl.component("ObjectDetection")
        assert [v.version_name for v in detection.versions] == ["cpu", "gpu"]
        assert detection.port("tracked").direction is PortDirection.STATE

    def test_every_bundled_app_parses(self):
        for path in sorted(APPS.glob("*/*.coord")):
            assert isinstance(parse_app_file(path), AppDecl), path

    def test_objective_defaults_to_energy(self):
        decl = parse_app(MINIMAL)
        assert decl.objective is Objective.MINIMIZE_ENERGY

    def test_comments_and_fractional_durations(self):
        text = MINIMAL.replace("period 10ms;", "period 10.5ms; // cycle\n# other comment style")
        decl = parse_app(text)
        assert decl.period_ms == 10.5

    def test_bytes_input(self):
        assert isinstance(parse_app(MINIMAL.encode("utf-8")), AppDecl)

    def test_invalid_utf8(self):
        result = parse_app(b"app \xff {}", "bad.coord")
        assert "not valid UTF-8" in messages(result)[0]

    def test_spans_do_not_affect_equality(self):
        shifted = "\n\n\n" + MINIMAL
        assert parse_app(shifted, "a.coord") == parse_app(MINIMAL, "b.coord")


class TestDiagnostics:
    def test_syntax_error_is_located(self):
        result = parse_app("app X {\n  period 10ms\n}", "x.coord")
        assert len(result) == 1
        diag = result[0]
        assert diag.message.startswith("syntax error")
        assert diag.span.file == "x.coord"
        assert diag.span.line == 3

    def test_unexpected_end_of_input(self):
        result = parse_app("app X {", "x.coord")
        assert "unexpected end of input" in messages(result)[0]

    def test_unknown_type_and_component(self):
        text = MINIMAL.replace("in T i;", "in U i;").replace("edge Src.o -> Dst.i;", "edge Src.o -> Nope.i;")
        found = messages(parse_app(text))
        assert "unknown type 'U'" in found
        assert "unknown component Nope" in found

    def test_all_problems_reported_together(self):
        text = """
        app Bad {
          period 10ms;
          deadline 20ms;
          type T;
          type T;
          component A { out T o; out T o; version v1 on big, big; ft { replicas 4; } }
          component B { in T i; }
          edge A.o -> B.x;
        }
        """
        found = messages(parse_app(text))
        assert "deadline 20ms exceeds period 10ms" in found
        assert "duplicate type 'T'" in found
        assert "duplicate port 'o' in component A" in found
        assert "duplicate unit type 'big' in version v1 of A" in found
        assert "replicas must be one of 2, 3, 5, 7 (got 4)" in found
        assert "component B declares no version" in found
        assert "component B has no port 'x'" in found

    def test_missing_and_duplicate_timing(self):
        text = "app T { period 10ms; period 12ms; type X; component C { out X o; version v on big; } }"
        found = messages(parse_app(text))
        assert "missing deadline" in found
        assert "duplicate period" in found

    def test_zero_duration(self):
        found = messages(parse_app(MINIMAL.replace("deadline 8ms", "deadline 0ms")))
        assert "deadline must be > 0ms" in found

    def test_overflowing_duration(self):
        huge = "1" + "0" * 400 + "ms"
        result = parse_app(MINIMAL.replace("period 10ms", f"period {huge}"), "t.coord")
        [diagnostic] = [d for d in result if d.message == "period is too large to represent in ms"]
        assert diagnostic.is_error
        assert diagnostic.span.line == 3

    @settings(max_examples=50)
    @given(st.integers(min_value=309, max_value=2000))
    def test_overflow_rejected_at_any_length(self, digits):
        text = MINIMAL.replace("deadline 8ms", f"deadline {'9' * digits}ms")
        result = parse_app(text)
        assert isinstance(result, list)
        assert "deadline is too large to represent in ms" in messages(result)

    def test_unknown_objective(self):
        found = messages(parse_app(MINIMAL.replace("type T;", "objective fastest;\n  type T;")))
        assert found[0].startswith("unknown objective 'fastest'")

    def test_edge_direction_checked(self):
        found = messages(parse_app(MINIMAL.replace("edge Src.o -> Dst.i;", "edge Dst.i -> Src.o;")))
        assert "Dst.i is not an output port" in found
        assert "Src.o is not an input port" in found

    def test_render_sorted_by_position(self):
        diags = [
            Diagnostic("second", SourceSpan("a.coord", 5, 1)),
            Diagnostic("unlocated"),
            Diagnostic("first", SourceSpan("a.coord", 2, 7)),
        ]
        assert render_diagnostics(diags).splitlines() == [
            "error: unlocated",
            "a.coord:2:7: error: first",
            "a.coord:5:1: error: second",
        ]


class TestPrinter:
    def test_format_ms(self):
        assert format_ms(10.0) == "10ms"
        assert format_ms(12.5) == "12.5ms"
        assert format_ms(0.0001) == "0.0001ms"

    def test_bundled_round_trip(self):
        for path in sorted(APPS.glob("*/*.coord")):
            decl = parse_app_file(path)
            assert parse_app(format_app(decl)) == decl, path

    def test_canonical_is_a_fixed_point(self):
        once = format_app(parse_app_file(VISION))
        assert format_app(parse_app(once)) == once

    @settings(max_examples=50, deadline=None)
    @given(
        period=st.integers(min_value=1, max_value=10_000),
        fraction=st.sampled_from(["", ".5", ".25", ".125"]),
        replicas=st.sampled_from([None, 2, 3, 5, 7]),
    )
    def test_round_trip_property(self, period, fraction, replicas):
        ft = f" ft {{ replicas {replicas}; }}" if replicas else ""
        text = (
            f"app P {{ period {period}{fraction}ms; deadline {period}ms; objective minimize_makespan; type T;"
            f" component A {{ out T o; version v1 on big, LITTLE;{ft} }}"
            f" component B {{ in T i; state T s; version v1 on GPU; version v2 on big; }}"
            f" edge A.o -> B.i; }}"
        )
        decl = parse_app(text)
        assert isinstance(decl, AppDecl)
        assert parse_app(format_app(decl)) == decl
