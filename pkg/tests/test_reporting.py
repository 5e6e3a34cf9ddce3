"""
Tests for run manifests, JSON documents, comparisons, text reports and the global config.
"""

import pytest
import yaml
from pydantic import ValidationError

from conftest import PLATFORM, VISION, VISION_CONTRACTS, WIFI_CONTRACTS, WIFI_FORKJOIN, WIFI_FT_COMPARE, WIFI_MONO
from coordsched_cli.config.global_config import GlobalConfig, load_global_config
from coordsched_cli.core.reporting.compare import (
    CompareRowConfig,
    ComparisonRow,
    load_compare_config,
    rows_for_modes,
    run_comparison,
    with_deltas,
)
from coordsched_cli.core.reporting.manifest import RunManifest
from coordsched_cli.core.reporting.render import ReportRenderer, fixed, format_table, percent
from coordsched_cli.core.reporting.schedule_document import (
    ScheduleDocument,
    SimulationDocument,
    read_schedule_json,
    write_document,
)
from coordsched_cli.core.scheduling.heuristic import schedule_energy
from coordsched_cli.core.scheduling.model import SchedulerConfig, SchedulingMode
from coordsched_cli.core.simulation.simulator import simulate


@pytest.fixture
def vision_run(vision_graph, vision_costs):
    schedule = schedule_energy(vision_graph, vision_costs, SchedulerConfig())
    return schedule, simulate(vision_graph, schedule, vision_costs)


class TestManifest:
    def test_capture_and_drift(self, tmp_path):
        app = tmp_path / "a.coord"
        app.write_text("app A {}\n")
        contracts = tmp_path / "c.contracts"
        contracts.write_text("\n")
        recorded = RunManifest.capture(app, None, contracts, {"mode": "energy"})
        assert set(recorded.hashes) == {str(app), str(contracts)}
        assert recorded.drift(RunManifest.capture(app, None, contracts)) == []

        app.write_text("app A { }\n")
        messages = recorded.drift(RunManifest.capture(app, None, contracts))
        assert len(messages) == 1
        assert messages[0].startswith(f"app file {app} differs from the one the schedule was made from")

    def test_yaml(self):
        manifest = RunManifest("a.coord", config={"mode": "energy"}, hashes={"a.coord": "ab" * 32})
        data = yaml.safe_load(manifest.to_yaml())
        assert data["app_file"] == "a.coord"
        assert data["config"] == {"mode": "energy"}
        assert list(data) == ["app_file", "platform_file", "contracts_file", "config", "tool_version", "hashes"]


class TestDocuments:
    def test_schedule_json_round_trip(self, tmp_path, vision_run):
        schedule, _ = vision_run
        manifest = RunManifest.capture(VISION, PLATFORM, VISION_CONTRACTS, {"mode": "energy"})
        path = tmp_path / "schedule.json"
        write_document(ScheduleDocument.from_schedule(schedule, manifest), path)
        document = read_schedule_json(path)
        assert document.app == "Vision"
        assert document.to_schedule() == schedule
        assert document.to_manifest() == manifest

    def test_schedule_without_manifest(self, vision_run):
        document = ScheduleDocument.from_schedule(vision_run[0])
        assert document.to_manifest() is None
        assert document.mode is SchedulingMode.ENERGY

    def test_rejects_backwards_placement(self, tmp_path, vision_run):
        document = ScheduleDocument.from_schedule(vision_run[0]).model_dump(mode="json")
        document["placements"][0]["finish_ms"] = document["placements"][0]["start_ms"]
        with pytest.raises(ValidationError, match="finish_ms must be > start_ms"):
            ScheduleDocument.model_validate(document)

    def test_rejects_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValidationError):
            read_schedule_json(path)

    def test_simulation_document(self, vision_run):
        schedule, report = vision_run
        document = SimulationDocument.from_report(report, app="Vision")
        assert document.replay == "strict"
        assert document.total_mj == pytest.approx(schedule.predicted_total_mj)
        assert document.token_counts["ImageCapture.frame -> ObjectDetection.frame"] == [1, 1]
        assert set(document.per_unit) == set(report.per_unit)


class TestComparison:
    def test_load_rows(self):
        rows = load_compare_config(WIFI_FT_COMPARE)
        assert [r.label for r in rows] == ["no-ft", "ft-2", "ft-3"]
        assert rows[0].no_ft
        assert rows[2].ft == {"DistanceCheck": 3}
        assert rows[1].mode is None

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "bad.yml"
        path.write_text("rows: []\n")
        with pytest.raises(ValueError, match="non-empty 'rows:' list"):
            load_compare_config(path)
        path.write_text("rows:\n  - label: x\n    mode: fastest\n")
        with pytest.raises(ValueError, match="row 1"):
            load_compare_config(path)

    def test_rows_for_modes(self):
        rows = rows_for_modes(["energy", "makespan"])
        assert [(r.label, r.mode) for r in rows] == [("energy", SchedulingMode.ENERGY), ("makespan", SchedulingMode.MAKESPAN)]

    def test_with_deltas(self):
        rows = with_deltas([
            ComparisonRow("base", "energy", True, 10.0, 50.0),
            ComparisonRow("more", "energy", True, 9.0, 60.0),
            ComparisonRow("failed", "energy", False, error="boom"),
        ])
        assert [r.delta_vs_baseline_percent for r in rows] == [0.0, pytest.approx(20.0), None]
        assert all(r.note is None for r in rows)

    def test_failed_baseline_without_figures_is_noted(self):
        rows = with_deltas([
            ComparisonRow("base", "energy", False, error="platform: cannot read x.platform"),
            ComparisonRow("other", "energy", True, 9.0, 60.0),
        ])
        assert [r.delta_vs_baseline_percent for r in rows] == [None, None]
        assert {r.note for r in rows} == {"baseline base has no energy figure, deltas omitted"}
        assert rows[1].to_dict()["note"] == rows[0].note

    def test_failed_baseline_with_best_attempt_is_noted(self):
        rows = with_deltas([
            ComparisonRow("base", "energy", False, 13.0, 50.0, error="schedule: deadline missed"),
            ComparisonRow("other", "energy", True, 9.0, 60.0),
        ])
        assert rows[1].delta_vs_baseline_percent == pytest.approx(20.0)
        assert rows[1].note == "baseline base failed, deltas are against its best attempt"

    def test_failed_row_reports_the_objective_mode(self, tmp_path):
        app = tmp_path / "fast.coord"
        app.write_text(WIFI_MONO.read_text().replace("minimize_energy", "minimize_makespan"))
        rows = run_comparison(
            app, tmp_path / "missing.platform", WIFI_CONTRACTS, SchedulerConfig(),
            [CompareRowConfig("follow")], follow_objective=True,
        )
        assert rows[0].mode == "makespan"
        assert rows[0].exit_code == 2
        assert not rows[0].feasible

    def test_budget_row(self):
        rows = run_comparison(VISION, PLATFORM, VISION_CONTRACTS, SchedulerConfig(), [
            CompareRowConfig("fast", mode=SchedulingMode.MAKESPAN),
            CompareRowConfig("capped", mode=SchedulingMode.MAKESPAN, energy_budget_mj=1.0),
        ])
        fast, capped = rows
        assert fast.feasible
        assert not capped.feasible
        assert capped.total_mj < fast.total_mj

    def test_redundancy_costs_energy(self):
        rows = run_comparison(WIFI_FORKJOIN, PLATFORM, WIFI_CONTRACTS, SchedulerConfig(), load_compare_config(WIFI_FT_COMPARE))
        baseline, duplex, triplex = rows
        assert baseline.feasible
        assert baseline.total_mj == pytest.approx(103.6)
        assert baseline.delta_vs_baseline_percent == 0.0
        for row in (duplex, triplex):
            assert not row.feasible
            assert row.exit_code == 4
            assert "cannot be met" in row.error
        assert baseline.total_mj < duplex.total_mj < triplex.total_mj
        assert 0 < duplex.delta_vs_baseline_percent < triplex.delta_vs_baseline_percent

    def test_parallel_rows_keep_order(self):
        rows = rows_for_modes(["makespan", "energy"])
        serial = run_comparison(VISION, PLATFORM, VISION_CONTRACTS, SchedulerConfig(), rows)
        parallel = run_comparison(VISION, PLATFORM, VISION_CONTRACTS, SchedulerConfig(), rows, jobs=2)
        assert serial == parallel
        assert [r.label for r in parallel] == ["makespan", "energy"]
        assert parallel[1].total_mj < parallel[0].total_mj


class TestRendering:
    def test_number_formats(self):
        assert fixed(1.5) == "1.500"
        assert fixed(None) == "-"
        assert percent(12.3456) == "+12.346%"
        assert percent(-1) == "-1.000%"

    def test_format_table(self):
        assert format_table(("a", "bb"), [("xyz", 1)]).splitlines() == [
            "a    bb",
            "---  --",
            "xyz  1",
        ]

    def test_run_report(self, vision_run):
        schedule, report = vision_run
        manifest = RunManifest("vision.coord", config={"mode": "energy"})
        text = ReportRenderer(gantt_width=40).run_report(schedule, report, manifest)
        assert text.startswith("Vision: energy schedule, worst-case contracts\n")
        assert "deadline 40.000 ms" in text
        assert f"  total    {schedule.predicted_total_mj:.3f} mJ" in text
        assert "Simulated cycle (strict replay)" in text
        assert "  app_file: vision.coord" in text
        assert "ImageCapture" in text.split("Gantt")[0]

    def test_run_report_without_simulation(self, vision_run):
        text = ReportRenderer().run_report(vision_run[0])
        assert "Simulated cycle" not in text
        assert "Run manifest" not in text

    def test_platform_report(self, demo_platform):
        text = ReportRenderer().platform_report(*demo_platform)
        lines = text.splitlines()
        assert lines[0] == "platform odroid_like: 9 unit(s), types GPU, LITTLE, big"
        assert lines[1] == "total static power 2600.000 mW"
        assert any(line.startswith("GPU0") and line.endswith("yes") for line in lines)

    def test_comparison_report(self):
        rows = with_deltas([
            ComparisonRow("base", "energy", True, 10.0, 50.0),
            ComparisonRow("tight", "energy", False, 13.0, 55.0, error="schedule: deadline missed"),
        ])
        text = ReportRenderer().comparison_report("Wifi", rows)
        assert text.startswith("comparison for Wifi (baseline: first row)")
        assert "+10.000%" in text
        assert text.rstrip().endswith("tight: schedule: deadline missed")

    def test_comparison_report_shows_baseline_note(self):
        rows = with_deltas([ComparisonRow("base", "energy", False, error="boom"), ComparisonRow("x", "energy", True, 1.0, 2.0)])
        text = ReportRenderer().comparison_report("Wifi", rows)
        assert "note: baseline base has no energy figure, deltas omitted" in text


class TestGlobalConfig:
    def test_defaults_without_file(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert load_global_config() == GlobalConfig()

    def test_values_and_rejections(self, tmp_path):
        path = tmp_path / "c.yml"
        path.write_text(
            "voter_wcet_ms: 0.8\n"
            "gantt_width: 80\n"
            "exhaustive_max_tasks: -1\n"
            "comm_cost_ms: 0\n"
            "heuristic_ratio_bound: many\n"
            "colour: blue\n"
        )
        config = load_global_config(path)
        assert config.voter_wcet_ms == 0.8
        assert config.gantt_width == 80
        assert config.exhaustive_max_tasks == 8
        assert config.comm_cost_ms == 0.0
        assert config.heuristic_ratio_bound == 2.0

    def test_broken_yaml_falls_back(self, tmp_path):
        path = tmp_path / "c.yml"
        path.write_text("voter_wcet_ms: [\n")
        assert load_global_config(path) == GlobalConfig()
