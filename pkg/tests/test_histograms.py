"""Histogram engine: binning, summaries, total variation, mean series."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftscope.detector import hoeffding_threshold
from driftscope.histograms import (
    DEFAULT_BINS,
    Histogram,
    mean_series,
    summarize_stream,
    summarize_window,
    tv_distance,
)
from driftscope.stream import Sample, StreamSchema, Window, WindowSpec, slice_windows

UNIT = StreamSchema(("f",), ((0.0, 1.0),), (0, 1))


def window_of(values, labels=None, start=0):
    labels = labels if labels is not None else [0] * len(values)
    samples = tuple(
        Sample(start + i, (float(v),), int(l)) for i, (v, l) in enumerate(zip(values, labels))
    )
    return Window(window_index=0, start=start, samples=samples)


class TestSummarizeWindow:
    def test_hand_counts_and_mean(self):
        w = window_of([0.0, 0.25, 0.5, 1.0])
        s = summarize_window(w, UNIT, bins=4)
        f = s.per_feature[0]
        assert f.histogram.counts == (2, 1, 0, 1)
        assert f.mean == 0.4375
        assert f.histogram.edges[0] == 0.0 and f.histogram.edges[-1] == 1.0

    def test_default_bins_is_40(self):
        w = window_of([0.1, 0.2, 0.9])
        s = summarize_window(w, UNIT)
        assert len(s.per_feature[0].histogram.counts) == DEFAULT_BINS

    def test_value_at_max_falls_in_last_bin(self):
        w = window_of([1.0, 1.0])
        s = summarize_window(w, UNIT, bins=5)
        assert s.per_feature[0].histogram.counts == (0, 0, 0, 0, 2)

    def test_uniform_window_mean_against_direct_average(self):
        rng = np.random.Generator(np.random.Philox(key=77))
        values = rng.random(5000)
        w = window_of(values)
        s = summarize_window(w, UNIT)
        oracle = sum(float(v) for v in values) / len(values)  # direct averaging
        assert s.per_feature[0].mean == pytest.approx(oracle, rel=1e-12)
        assert abs(s.per_feature[0].mean - 0.5) < 0.02

    def test_std_is_population(self):
        w = window_of([0.0, 1.0])
        s = summarize_window(w, UNIT, bins=2)
        assert s.per_feature[0].std == 0.5  # population, not sample (0.707)

    def test_per_class_split_and_conservation(self):
        rng = np.random.Generator(np.random.Philox(key=5))
        values = rng.random(400)
        labels = rng.integers(0, 2, 400)
        w = window_of(values, labels)
        s = summarize_window(w, UNIT, bins=7)
        f = s.per_feature[0]
        summed = np.zeros(7, dtype=int)
        for cs in f.per_class.values():
            summed += np.array(cs.histogram.counts)
        assert tuple(summed) == f.histogram.counts
        assert sum(s.count_per_class.values()) == w.size

    def test_mean_is_count_weighted_average_of_class_means(self):
        rng = np.random.Generator(np.random.Philox(key=6))
        values = rng.random(500)
        labels = rng.integers(0, 2, 500)
        s = summarize_window(window_of(values, labels), UNIT)
        f = s.per_feature[0]
        weighted = sum(cs.count * cs.mean for cs in f.per_class.values()) / 500
        assert f.mean == pytest.approx(weighted, rel=1e-9)

    def test_mean_inside_global_range(self):
        rng = np.random.Generator(np.random.Philox(key=8))
        s = summarize_window(window_of(rng.random(100)), UNIT)
        lo, hi = UNIT.feature_ranges[0]
        assert lo <= s.per_feature[0].mean <= hi

    def test_absent_class_has_none_mean(self):
        w = window_of([0.5, 0.6], labels=[1, 1])
        s = summarize_window(w, UNIT, bins=2)
        cs = s.per_feature[0].per_class[0]
        assert cs.count == 0 and cs.mean is None
        assert sum(cs.histogram.counts) == 0

    def test_empty_window_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            summarize_window(Window(0, 0, ()), UNIT)

    def test_zero_width_feature_degenerates_to_one_bin(self):
        schema = StreamSchema(("c",), ((3.7, 3.7),), (0,))
        w = Window(0, 0, (Sample(0, (3.7,), 0), Sample(1, (3.7,), 0)))
        s = summarize_window(w, schema, bins=40)
        assert s.per_feature[0].histogram.counts == (2,)
        assert s.per_feature[0].std == 0.0


class TestSummarizeStream:
    def test_circles_20_windows(self, circles):
        schema, stream = circles
        assert len(summarize_stream(stream, WindowSpec(5000), schema)) == 20

    def test_sine1_19_windows(self, sine1_summaries_5200):
        assert len(sine1_summaries_5200) == 19

    def test_empty_stream(self):
        assert summarize_stream([], WindowSpec(10), UNIT) == []

    def test_equals_map_over_slice_windows(self):
        rng = np.random.Generator(np.random.Philox(key=2))
        stream = [Sample(i, (float(v),), 0) for i, v in enumerate(rng.random(230))]
        spec = WindowSpec(50, stride=30, offset=5)
        via_stream = summarize_stream(stream, spec, UNIT, bins=8)
        via_map = [summarize_window(w, UNIT, bins=8) for w in slice_windows(stream, spec)]
        assert via_stream == via_map

    def test_limit(self):
        stream = [Sample(i, (0.5,), 0) for i in range(1000)]
        assert len(summarize_stream(stream, WindowSpec(100), UNIT, limit=3)) == 3


def random_histogram_pair(rng, bins=10, edges=None):
    edges = edges if edges is not None else tuple(np.linspace(0, 1, bins + 1).tolist())
    p = Histogram(edges, tuple(int(c) for c in rng.integers(0, 50, bins)))
    q = Histogram(edges, tuple(int(c) for c in rng.integers(0, 50, bins)))
    if p.total == 0:
        p = Histogram(edges, (1,) + p.counts[1:])
    if q.total == 0:
        q = Histogram(edges, (1,) + q.counts[1:])
    return p, q


class TestTvDistance:
    def test_identical_is_zero(self):
        h = Histogram((0.0, 0.5, 1.0), (3, 7))
        assert tv_distance(h, h) == 0.0

    def test_disjoint_is_one(self):
        edges = (0.0, 0.5, 1.0)
        assert tv_distance(Histogram(edges, (5, 0)), Histogram(edges, (0, 9))) == 1.0

    def test_half_case_exact(self):
        edges = (0.0, 0.5, 1.0)
        p = Histogram(edges, (1, 1))  # normalizes to [0.5, 0.5]
        q = Histogram(edges, (2, 0))  # normalizes to [1.0, 0.0]
        assert tv_distance(p, q) == 0.5

    def test_metric_properties_on_random_pairs(self):
        rng = np.random.Generator(np.random.Philox(key=123))
        edges = tuple(np.linspace(0, 1, 11).tolist())
        for _ in range(1000):
            p, q = random_histogram_pair(rng, 10, edges)
            r, _ = random_histogram_pair(rng, 10, edges)
            d_pq = tv_distance(p, q)
            assert d_pq == tv_distance(q, p)
            assert 0.0 <= d_pq <= 1.0
            assert tv_distance(p, p) == 0.0
            assert d_pq <= tv_distance(p, r) + tv_distance(r, q) + 1e-12

    def test_identity_of_indiscernibles_on_normalized_counts(self):
        edges = (0.0, 0.5, 1.0)
        p = Histogram(edges, (2, 4))
        q = Histogram(edges, (3, 6))  # same pmf at different scale
        assert tv_distance(p, q) == 0.0

    def test_mismatched_edges_rejected(self):
        p = Histogram((0.0, 0.5, 1.0), (1, 1))
        q = Histogram((0.0, 0.4, 1.0), (1, 1))
        with pytest.raises(ValueError, match="mismatched edges"):
            tv_distance(p, q)

    def test_empty_histogram_rejected(self):
        edges = (0.0, 0.5, 1.0)
        with pytest.raises(ValueError, match="empty"):
            tv_distance(Histogram(edges, (0, 0)), Histogram(edges, (1, 0)))

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_refining_bins_never_decreases_distance(self, seed):
        """Merging bins can only lose mass differences, so doubling the bin
        count (same samples, nested edges) never lowers the tv distance."""
        rng = np.random.Generator(np.random.Philox(key=seed))
        a = rng.random(300)
        b = np.clip(rng.random(300) ** 2, 0.0, 1.0)
        for bins in (5, 10, 20):
            fine, coarse = [], []
            for values in (a, b):
                w = window_of(values)
                coarse.append(summarize_window(w, UNIT, bins).per_feature[0].histogram)
                fine.append(summarize_window(w, UNIT, 2 * bins).per_feature[0].histogram)
            assert tv_distance(*fine) >= tv_distance(*coarse) - 1e-12


class TestMeanSeries:
    def test_single_window(self):
        stream = [Sample(i, (0.25,), 0) for i in range(10)]
        summaries = summarize_stream(stream, WindowSpec(10), UNIT)
        series = mean_series(summaries, 0)
        assert len(series.values) == 1
        assert series.values[0] == (0, 0.25)

    def test_stationary_within_hoeffding_bound(self):
        """Pairwise window-mean gaps sit inside the union-corrected
        Hoeffding band at delta=0.01 for a stationary uniform stream."""
        rng = np.random.Generator(np.random.Philox(key=31))
        stream = [Sample(i, (float(v),), 0) for i, v in enumerate(rng.random(100_000))]
        summaries = summarize_stream(stream, WindowSpec(5000), UNIT)
        series = mean_series(summaries, 0)
        means = [m for _, m in series.values]
        n_pairs = len(means) * (len(means) - 1) // 2
        bound = hoeffding_threshold(1.0, 5000, 5000, 0.01 / n_pairs)
        worst = max(abs(a - b) for a in means for b in means)
        assert worst < bound

    def test_sine1_class_conditional_swap(self, sine1):
        """Class-conditional x_b means trade places across the reversal at
        20,000; values checked against a direct masking oracle."""
        schema, stream = sine1
        summaries = summarize_stream(stream, WindowSpec(5000), schema)
        series_c1 = mean_series(summaries, feature=1, class_filter=1)
        means = dict(series_c1.values)

        xs = np.array([s.features for s in stream])
        labels = np.array([s.label for s in stream])

        def oracle(window_index):
            lo = window_index * 5000
            mask = labels[lo : lo + 5000] == 1
            return float(xs[lo : lo + 5000, 1][mask].mean())

        for w in (2, 3, 4, 5):
            assert means[w] == pytest.approx(oracle(w), rel=1e-9)
        # windows 3 ends at 20,000; window 4 starts the reversed concept
        assert abs(means[4] - means[3]) > 0.2
        assert abs(means[3] - means[2]) < 0.05

    def test_empty_class_windows_omitted_and_flagged(self):
        stream = [Sample(i, (0.5,), 1 if i < 10 else 0) for i in range(20)]
        summaries = summarize_stream(stream, WindowSpec(10), UNIT)
        series = mean_series(summaries, 0, class_filter=1)
        assert [w for w, _ in series.values] == [0]
        assert series.omitted_windows == (1,)

    def test_strictly_increasing_window_indices(self, sine1_summaries_5200):
        series = mean_series(sine1_summaries_5200, 0)
        indices = [w for w, _ in series.values]
        assert indices == sorted(indices)
        assert len(set(indices)) == len(indices)

    def test_unknown_feature_and_class(self, sine1_summaries_5200):
        with pytest.raises(ValueError, match="feature"):
            mean_series(sine1_summaries_5200, 99)
        with pytest.raises(ValueError, match="class"):
            mean_series(sine1_summaries_5200, 0, class_filter=42)
