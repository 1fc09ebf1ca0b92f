"""Command-line surface: subcommand composition, files, and exit codes."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from driftscope.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


@pytest.fixture()
def small_sine_csv(tmp_path, runner):
    out = tmp_path / "s.csv"
    run_ok(runner, [
        "generate", "--dataset", "sine1", "--out", str(out),
        "--n-samples", "30000", "--seed", "13",
    ])
    return out


class TestGenerate:
    def test_csv_plus_sidecar(self, tmp_path, runner):
        out = tmp_path / "g.csv"
        run_ok(runner, [
            "generate", "--dataset", "sine1", "--out", str(out),
            "--n-samples", "5000", "--drift-period", "2000",
        ])
        assert out.exists()
        sidecar = json.loads((tmp_path / "g.json").read_text())
        assert sidecar["dataset"] == "sine1"
        assert sidecar["config"]["n_samples"] == 5000
        assert sidecar["true_drift_points"] == [2000, 4000]
        assert sidecar["rng_algorithm"] == "philox4x64"
        header = out.read_text().splitlines()[0]
        assert header == "x_a,x_b,label"

    def test_circles_with_schedule(self, tmp_path, runner):
        out = tmp_path / "c.csv"
        run_ok(runner, [
            "generate", "--dataset", "circles", "--out", str(out),
            "--n-samples", "4000", "--drift-period", "1000",
            "--circle-schedule", "0.3,0.5,0.2;0.7,0.5,0.2",
        ])
        sidecar = json.loads((tmp_path / "c.json").read_text())
        assert sidecar["config"]["circle_schedule"] == [[0.3, 0.5, 0.2], [0.7, 0.5, 0.2]]

    def test_bad_config_fails(self, tmp_path, runner):
        result = runner.invoke(main, [
            "generate", "--dataset", "sine1", "--out", str(tmp_path / "x.csv"),
            "--noise-rate", "2.0",
        ])
        assert result.exit_code != 0
        assert "noise_rate" in result.output


class TestSummarize:
    def test_window_counts_roundtrip(self, small_sine_csv, tmp_path, runner):
        out = tmp_path / "sum.json"
        run_ok(runner, [
            "summarize", "--in", str(small_sine_csv),
            "--window-size", "5200", "--out", str(out),
        ])
        doc = json.loads(out.read_text())
        assert doc["format_version"] == 1
        assert len(doc["windows"]) == 5  # 30,000 samples
        first = doc["windows"][0]
        assert first["start"] == 0
        assert len(first["per_feature"][0]["counts"]) == 40
        assert len(first["per_feature"][0]["edges"]) == 41

    def test_limit_and_offset(self, small_sine_csv, tmp_path, runner):
        out = tmp_path / "sum.json"
        run_ok(runner, [
            "summarize", "--in", str(small_sine_csv), "--window-size", "500",
            "--offset", "17550", "--limit", "10", "--out", str(out),
        ])
        doc = json.loads(out.read_text())
        assert len(doc["windows"]) == 10
        assert doc["windows"][0]["start"] == 17_550
        assert doc["windows"][-1]["start"] + doc["windows"][-1]["size"] == 22_550

    def test_missing_file(self, tmp_path, runner):
        result = runner.invoke(main, [
            "summarize", "--in", str(tmp_path / "nope.csv"), "--window-size", "10",
        ])
        assert result.exit_code != 0
        assert "nope.csv" in result.output


class TestDetect:
    def test_per_class_finds_the_drift(self, small_sine_csv, tmp_path, runner):
        out = tmp_path / "drift.json"
        run_ok(runner, [
            "detect", "--in", str(small_sine_csv), "--per-class", "--out", str(out),
        ])
        doc = json.loads(out.read_text())
        assert doc["config"]["monitor"] == "per_class"
        assert len(doc["drift_points"]) == 1
        assert abs(doc["drift_points"][0] - 20_000) <= 300
        assert doc["profile"][0] == [0, 1]
        assert any(e["exceeded"] for e in doc["evidence"][0])

    def test_marginal_flag(self, small_sine_csv, tmp_path, runner):
        out = tmp_path / "drift.json"
        run_ok(runner, [
            "detect", "--in", str(small_sine_csv), "--marginal", "--out", str(out),
        ])
        doc = json.loads(out.read_text())
        assert doc["drift_points"] == []


class TestAnalyze:
    def test_report_shape(self, small_sine_csv, tmp_path, runner):
        out = tmp_path / "an.json"
        run_ok(runner, [
            "analyze", "--in", str(small_sine_csv),
            "--initial-window", "5200", "--out", str(out),
        ])
        doc = json.loads(out.read_text())
        assert {f["name"] for f in doc["features"]} == {"x_a", "x_b"}
        assert len(doc["alignments"]) == 1
        alignment = doc["alignments"][0]
        assert abs(alignment["boundary_index"] - 20_000) <= 30
        assert "continuous_rule" in doc["notes"]


class TestRender:
    def test_render_from_summaries(self, small_sine_csv, tmp_path, runner):
        sum_path = tmp_path / "sum.json"
        run_ok(runner, [
            "summarize", "--in", str(small_sine_csv),
            "--window-size", "5200", "--out", str(sum_path),
        ])
        fig = tmp_path / "fig.svg"
        run_ok(runner, [
            "render", "--summaries", str(sum_path), "--classes", "0,1",
            "--window-size", "5200", "--out", str(fig),
        ])
        text = fig.read_text()
        assert text.startswith("<?xml")
        assert 'class="band"' in text

    def test_empty_summaries_is_an_error_naming_the_input(self, tmp_path, runner):
        empty = tmp_path / "empty.json"
        empty.write_text('{"format_version":1,"windows":[]}')
        result = runner.invoke(main, [
            "render", "--summaries", str(empty), "--out", str(tmp_path / "f.svg"),
        ])
        assert result.exit_code != 0
        assert "empty.json" in result.output

    def test_window_size_validation(self, small_sine_csv, tmp_path, runner):
        sum_path = tmp_path / "sum.json"
        run_ok(runner, [
            "summarize", "--in", str(small_sine_csv),
            "--window-size", "5200", "--out", str(sum_path),
        ])
        result = runner.invoke(main, [
            "render", "--summaries", str(sum_path), "--window-size", "9999",
            "--out", str(tmp_path / "f.svg"),
        ])
        assert result.exit_code != 0
        assert "5200" in result.output


class TestErrorPaths:
    def test_csv_arity_error_reports_line(self, tmp_path, runner):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,label\n1,2,x\n1,2\n")
        result = runner.invoke(main, ["detect", "--in", str(bad)])
        assert result.exit_code != 0
        assert "line 3" in result.output
