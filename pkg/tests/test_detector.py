"""Adaptive-window detector: detection quality, profiles, invariants."""

from __future__ import annotations

import numpy as np
import pytest

from driftscope.detector import (
    DriftReport,
    HoeffdingAdaptiveDetector,
    detect_stream,
    hoeffding_threshold,
    window_size_profile,
)
from driftscope.generators import Sine1Config, generate_sine1, true_drift_points
from driftscope.stream import Sample, StreamSchema

from conftest import make_step_stream, make_uniform_stream

TRUE_SINE1 = (20_000, 40_000, 60_000, 80_000)


@pytest.fixture(scope="module")
def sine1_per_class_report(sine1) -> DriftReport:
    schema, stream = sine1
    return detect_stream(stream, schema, monitor="per_class")


class TestSine1:
    def test_four_points_within_300(self, sine1_per_class_report):
        points = sine1_per_class_report.drift_points
        assert len(points) == 4
        for point, true in zip(points, TRUE_SINE1):
            assert abs(point - true) <= 300, (point, true)

    def test_marginal_mode_is_silent(self, sine1):
        """Label reversal leaves the uniform marginals untouched, so the
        marginal monitor must see nothing."""
        schema, stream = sine1
        report = detect_stream(stream, schema, monitor="marginal")
        assert report.drift_points == ()

    def test_profile_drops_at_true_drifts(self, sine1_per_class_report):
        profile = dict(sine1_per_class_report.profile)
        for true in TRUE_SINE1:
            before = profile[true - 300]
            after_min = min(
                length
                for index, length in sine1_per_class_report.profile
                if true - 300 <= index <= true + 300
            )
            assert after_min < 0.5 * before, true

    def test_evidence_names_an_exceeding_feature(self, sine1_per_class_report):
        assert len(sine1_per_class_report.evidence) == len(
            sine1_per_class_report.drift_points
        )
        for rows in sine1_per_class_report.evidence:
            assert any(e.exceeded for e in rows)
            for e in rows:
                assert e.gap >= 0 and e.threshold > 0


class TestStepDrift:
    def test_detected_within_200(self):
        schema, stream = make_step_stream(20_000, step_at=12_345)
        report = detect_stream(stream, schema, monitor="marginal", max_window=2000)
        assert report.drift_points
        for p in report.drift_points:
            assert abs(p - 12_345) <= 200

    def test_profile_drop_equals_reported_point(self):
        schema, stream = make_step_stream(20_000, step_at=12_345)
        detector = HoeffdingAdaptiveDetector(schema, max_window=2000)
        reports = []
        for s in stream:
            drift = detector.update(s)
            if drift is not None:
                # by construction the new window starts at the cut
                index, length = detector.profile[-1]
                assert index - length + 1 == drift
                reports.append(drift)
        assert reports

    def test_update_interface_returns_none_when_quiet(self):
        schema, stream = make_uniform_stream(2000, seed=14)
        detector = HoeffdingAdaptiveDetector(schema, monitor="marginal")
        results = {detector.update(s) for s in stream}
        assert results == {None}


class TestFalsePositives:
    def test_budget_on_ten_stationary_runs(self):
        """Cheap version of the 100-seed budget: union-corrected Hoeffding
        at delta=0.002 should essentially never fire on uniform noise."""
        fired = 0
        for seed in range(10):
            schema, stream = make_uniform_stream(20_000, seed=seed)
            report = detect_stream(stream, schema, monitor="marginal")
            fired += bool(report.drift_points)
        assert fired <= 1


class TestProfile:
    def test_stationary_profile_counts_up_to_cap(self):
        schema, stream = make_uniform_stream(500, seed=3)
        detector = HoeffdingAdaptiveDetector(schema, max_window=200, monitor="marginal")
        for s in stream:
            detector.update(s)
        lengths = [l for _, l in detector.profile]
        assert lengths[:5] == [1, 2, 3, 4, 5]
        assert max(lengths) == 200
        assert lengths[-1] == 200

    def test_profile_accessor(self, sine1_per_class_report):
        assert window_size_profile(sine1_per_class_report) == (
            sine1_per_class_report.profile
        )

    def test_profile_indexed_per_sample(self):
        schema, stream = make_uniform_stream(100, seed=5)
        detector = HoeffdingAdaptiveDetector(schema, monitor="marginal")
        for s in stream:
            detector.update(s)
        assert [i for i, _ in detector.profile] == list(range(100))

    def test_constant_stream_silent_with_nondecreasing_profile(self):
        schema = StreamSchema(("f",), ((0.0, 1.0),), (0,))
        stream = [Sample(i, (0.5,), 0) for i in range(2000)]
        report = detect_stream(stream, schema, monitor="marginal", max_window=500)
        assert report.drift_points == ()
        lengths = [l for _, l in report.profile]
        assert lengths == sorted(lengths)
        assert max(lengths) == 500


class TestInvariants:
    def test_window_only_shrinks_from_oldest(self):
        """window_start never moves backwards, under drift or the cap."""
        schema, stream = make_step_stream(30_000, step_at=14_000, noise=0.1, seed=2)
        detector = HoeffdingAdaptiveDetector(schema, max_window=5000)
        starts = []
        for s in stream:
            detector.update(s)
            starts.append(detector.window_start)
        assert all(b >= a for a, b in zip(starts, starts[1:]))

    def test_drift_points_strictly_increasing_and_in_range(self, sine1_per_class_report):
        points = sine1_per_class_report.drift_points
        assert list(points) == sorted(set(points))
        assert all(0 <= p < 100_000 for p in points)

    def test_scale_equivariance(self):
        """Doubling a feature and its range rescales gap and threshold by
        the same exact factor, so detections are bit-identical."""
        schema, stream = make_step_stream(8000, step_at=5000, noise=0.2, seed=7)
        scaled_schema = StreamSchema(("f",), ((0.0, 2.0),), (0,))
        scaled = [Sample(s.index, (s.features[0] * 2.0,), s.label) for s in stream]
        a = detect_stream(stream, schema, monitor="marginal", max_window=2000)
        b = detect_stream(scaled, scaled_schema, monitor="marginal", max_window=2000)
        assert a.drift_points == b.drift_points

    def test_threshold_diverges_as_delta_shrinks(self):
        eps = [hoeffding_threshold(1.0, 100, 100, d) for d in (1e-2, 1e-6, 1e-12, 1e-300)]
        assert eps == sorted(eps)
        assert eps[-1] > 1.0  # at delta=1e-300 the gap bound exceeds the range

    def test_tiny_delta_never_fires_when_bound_exceeds_range(self):
        """With delta=1e-30 and a small max window, the threshold exceeds
        the feature range for every admissible split, so even a full-range
        step cannot fire; stationary streams are silent at 1e-12 already."""
        schema, stream = make_step_stream(2000, step_at=1000)
        report = detect_stream(
            stream, schema, monitor="marginal", delta=1e-30, max_window=60
        )
        assert report.drift_points == ()
        schema2, stream2 = make_uniform_stream(20_000, seed=8)
        report2 = detect_stream(stream2, schema2, monitor="marginal", delta=1e-12)
        assert report2.drift_points == ()

    def test_out_of_order_sample_rejected(self):
        schema, stream = make_uniform_stream(10, seed=0)
        detector = HoeffdingAdaptiveDetector(schema)
        detector.update(stream[0])
        with pytest.raises(ValueError, match="out-of-order"):
            detector.update(stream[5])

    def test_report_validation(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            DriftReport((5, 5), ((), ()), (), {})


class TestExhaustiveMode:
    def test_exhaustive_agrees_with_grid_on_clean_step(self):
        schema, stream = make_step_stream(4000, step_at=2500)
        grid = detect_stream(stream, schema, monitor="marginal", max_window=1500)
        full = detect_stream(
            stream, schema, monitor="marginal", max_window=1500, exhaustive=True
        )
        assert grid.drift_points and full.drift_points
        assert abs(grid.drift_points[0] - 2500) <= 100
        assert abs(full.drift_points[0] - 2500) <= 100


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"delta": 0.0},
            {"delta": 1.5},
            {"n_min": 0},
            {"max_window": 10},
            {"monitor": "bogus"},
        ],
    )
    def test_bad_config(self, kwargs):
        schema = StreamSchema(("f",), ((0.0, 1.0),), (0,))
        with pytest.raises(ValueError):
            HoeffdingAdaptiveDetector(schema, **kwargs)

    def test_unknown_label_rejected_in_per_class_mode(self):
        schema = StreamSchema(("f",), ((0.0, 1.0),), (0, 1))
        detector = HoeffdingAdaptiveDetector(schema, monitor="per_class")
        with pytest.raises(ValueError, match="label"):
            detector.update(Sample(0, (0.5,), 7))

    def test_config_recorded_in_report(self, sine1_per_class_report):
        config = sine1_per_class_report.config
        assert config["monitor"] == "per_class"
        assert config["delta"] == 0.002
        assert config["n_min"] == 30
        assert config["max_window"] == 10_000
