"""Automated drift localization: feature filtering, ranking, and window
refinement that isolates abrupt drift at a window boundary.

The workflow mirrors what an analyst does with the timeline diagrams:
discard features that cannot show drift, rank the rest by how much their
per-window mean curves move, then shrink and realign the window grid
around the largest cross-window jumps until either a clean cut point
appears between two adjacent windows (abrupt drift) or no window size
yields piecewise-horizontal mean curves (continuous drift).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .detector import DEFAULT_N_MIN, hoeffding_threshold
from .histograms import DEFAULT_BINS, WindowSummary, summarize_stream
from .stream import Sample, StreamSchema, WindowSpec

__all__ = [
    "FeatureStatus",
    "FeatureReport",
    "AlignmentResult",
    "ContinuousRegion",
    "LocalizationReport",
    "filter_features",
    "ranked_features",
    "align_drift",
    "localize",
]

# Confidence for the per-pair noise allowance subtracted from mean jumps
# before they count towards a drift score.
SCORE_NOISE_DELTA = 0.05

DEFAULT_RANGE_EPSILON = 1e-9
DEFAULT_DRIFT_EPSILON = 0.05
DEFAULT_LOW_VARIABILITY_EPSILON = 1e-3
DEFAULT_SHRINK_FACTOR = 0.5
DEFAULT_MIN_WINDOW = 250

# A region counts as abrupt once a realigned boundary reaches this
# sharpness within the first two window shrinks; otherwise it is flagged
# as continuous drift. Heuristic stopping rule, surfaced in metadata.
SHARPNESS_THRESHOLD = 2.0

_CONTEXT_WINDOWS = 5  # windows rendered on each side of an aligned boundary


class FeatureStatus(str, Enum):
    KEPT = "kept"
    DROPPED_CONSTANT = "dropped_constant"
    DROPPED_LOW_VARIABILITY = "dropped_low_variability"
    DROPPED_NO_DRIFT = "dropped_no_drift"


@dataclass(frozen=True, slots=True)
class FeatureReport:
    feature: int
    name: str
    status: FeatureStatus
    drift_score: float


@dataclass(frozen=True, slots=True)
class AlignmentResult:
    """A window grid aligned so that a boundary falls on the drift point.

    ``render_start``/``render_count`` delimit the grid slice to draw:
    up to five windows on each side of the boundary.
    """

    window_size: int
    offset: int
    boundary_index: int
    sharpness: float
    render_start: int
    render_count: int


@dataclass(frozen=True, slots=True)
class ContinuousRegion:
    """A stream region where no window size isolates the drift."""

    start: int
    end: int
    window_size: int
    max_sharpness: float


@dataclass(frozen=True, slots=True)
class LocalizationReport:
    alignments: tuple[AlignmentResult, ...]
    continuous_regions: tuple[ContinuousRegion, ...]
    notes: dict


def _series_score(
    means: np.ndarray, counts: np.ndarray, range_width: float
) -> float:
    """Sum of mean jumps in excess of their sampling-noise allowance.

    Stationary data scores ~0: each |jump| is reduced by the Hoeffding
    bound for the two window means before it contributes.
    """
    score = 0.0
    for i in range(len(means) - 1):
        n0, n1 = int(counts[i]), int(counts[i + 1])
        if n0 < 1 or n1 < 1:
            continue
        allowance = hoeffding_threshold(range_width, n0, n1, SCORE_NOISE_DELTA)
        jump = abs(means[i + 1] - means[i])
        score += max(0.0, jump - allowance)
    return float(score / range_width)


def filter_features(
    schema: StreamSchema,
    summaries: Sequence[WindowSummary],
    range_epsilon: float = DEFAULT_RANGE_EPSILON,
    drift_epsilon: float = DEFAULT_DRIFT_EPSILON,
    low_variability_epsilon: float = DEFAULT_LOW_VARIABILITY_EPSILON,
) -> list[FeatureReport]:
    """Classify every feature and score how much drift its means show.

    Returns one report per feature, in schema order. The drift score is the
    largest noise-adjusted total variation among the overall mean series
    and each class-conditional mean series, normalized by the feature's
    range width. Features with a range narrower than ``range_epsilon`` are
    dropped as constant; features whose windows never spread beyond
    ``low_variability_epsilon`` of the range are dropped as low
    variability; features scoring under ``drift_epsilon`` are dropped as
    driftless.
    """
    if len(summaries) < 2:
        raise ValueError("need at least 2 window summaries to assess drift")

    class_ids = sorted(schema.class_ids)
    reports = []
    for f in range(schema.n_features):
        name = schema.feature_names[f]
        width = schema.range_width(f)
        if width <= range_epsilon:
            reports.append(
                FeatureReport(f, name, FeatureStatus.DROPPED_CONSTANT, 0.0)
            )
            continue

        max_std = max(s.per_feature[f].std for s in summaries)
        if max_std < low_variability_epsilon * width:
            reports.append(
                FeatureReport(f, name, FeatureStatus.DROPPED_LOW_VARIABILITY, 0.0)
            )
            continue

        overall_means = np.array([s.per_feature[f].mean for s in summaries])
        overall_counts = np.array([s.size for s in summaries])
        score = _series_score(overall_means, overall_counts, width)
        for cid in class_ids:
            pairs = [
                (s.per_feature[f].per_class[cid].mean, s.per_feature[f].per_class[cid].count)
                for s in summaries
                if s.per_feature[f].per_class[cid].count > 0
            ]
            if len(pairs) < 2:
                continue
            means = np.array([m for m, _ in pairs])
            counts = np.array([c for _, c in pairs])
            score = max(score, _series_score(means, counts, width))

        status = FeatureStatus.KEPT if score >= drift_epsilon else FeatureStatus.DROPPED_NO_DRIFT
        reports.append(FeatureReport(f, name, status, score))
    return reports


def ranked_features(reports: Sequence[FeatureReport]) -> list[FeatureReport]:
    """Kept features, highest drift score first (stable on ties)."""
    kept = [r for r in reports if r.status is FeatureStatus.KEPT]
    return sorted(kept, key=lambda r: -r.drift_score)


class _PrefixSums:
    """O(1) segment means per (feature, class) over a fixed stream."""

    def __init__(self, stream: Sequence[Sample], schema: StreamSchema) -> None:
        self.schema = schema
        x = np.asarray([s.features for s in stream], dtype=float)
        y = np.asarray([s.label for s in stream], dtype=np.int64)
        self.n = len(stream)
        zeros = np.zeros((1, schema.n_features))
        self.sum_all = np.vstack([zeros, np.cumsum(x, axis=0)])
        self.cnt_all = np.arange(self.n + 1)
        self.sum_cls = {}
        self.cnt_cls = {}
        for cid in schema.class_ids:
            mask = (y == cid).astype(float)
            self.sum_cls[cid] = np.vstack([zeros, np.cumsum(x * mask[:, None], axis=0)])
            self.cnt_cls[cid] = np.concatenate([[0], np.cumsum(mask)]).astype(np.int64)

    def segment_mean(
        self, lo: int, hi: int, feature: int, class_id: int | None
    ) -> tuple[float, int]:
        """Mean and count of one feature over stream[lo:hi]."""
        if class_id is None:
            cnt = hi - lo
            total = self.sum_all[hi, feature] - self.sum_all[lo, feature]
        else:
            cnt = int(self.cnt_cls[class_id][hi] - self.cnt_cls[class_id][lo])
            total = self.sum_cls[class_id][hi, feature] - self.sum_cls[class_id][lo, feature]
        return (total / cnt if cnt else math.nan), cnt


def _best_boundary(
    ps: _PrefixSums,
    lo: int,
    hi: int,
    features: Sequence[int],
    min_side: int = DEFAULT_N_MIN,
) -> tuple[int, float] | None:
    """Boundary in (lo, hi) maximizing the left-vs-right segment mean gap.

    The gap is the largest normalized class-conditional (or overall) mean
    difference between stream[lo:b] and stream[b:hi]. Returns (b, gap).
    """
    if hi - lo < 2 * min_side:
        return None
    bs = np.arange(lo + min_side, hi - min_side + 1)
    best = np.full(len(bs), -np.inf)
    stats: list[tuple[int, int | None]] = [
        (f, c) for f in features for c in [None, *sorted(ps.schema.class_ids)]
    ]
    for f, cid in stats:
        width = ps.schema.range_width(f)
        if width <= 0:
            continue
        if cid is None:
            sums, cnts = ps.sum_all[:, f], ps.cnt_all
        else:
            sums, cnts = ps.sum_cls[cid][:, f], ps.cnt_cls[cid]
        left_n = cnts[bs] - cnts[lo]
        right_n = cnts[hi] - cnts[bs]
        valid = (left_n >= min_side) & (right_n >= min_side)
        if not valid.any():
            continue
        with np.errstate(invalid="ignore", divide="ignore"):
            left_mean = (sums[bs] - sums[lo]) / left_n
            right_mean = (sums[hi] - sums[bs]) / right_n
            gap = np.abs(left_mean - right_mean) / width
        gap[~valid] = -np.inf
        best = np.maximum(best, gap)
    k = int(np.argmax(best))
    if not np.isfinite(best[k]):
        return None
    return int(bs[k]), float(best[k])


def _segment_means(
    ps: _PrefixSums, starts: list[int], size: int, feature: int, class_id: int | None
) -> list[float]:
    means = []
    for s in starts:
        mean, cnt = ps.segment_mean(s, s + size, feature, class_id)
        if cnt > 0:
            means.append(mean)
    return means


def _sharpness_from_means(means: list[float], boundary_pos: int, width: float) -> float:
    """Cross-boundary jump over the median within-segment successive move.

    ``boundary_pos`` is the index of the first window after the boundary.
    The denominator is floored at a tiny fraction of the feature range so
    noiseless segments produce a large, finite sharpness.
    """
    if boundary_pos < 1 or boundary_pos >= len(means):
        return 0.0
    jump = abs(means[boundary_pos] - means[boundary_pos - 1])
    diffs = [
        abs(means[i + 1] - means[i])
        for i in range(len(means) - 1)
        if i != boundary_pos - 1
    ]
    if not diffs:
        return 0.0
    floor = 1e-9 * width
    return float(jump / max(float(np.median(diffs)), floor))


def _boundary_sharpness(
    ps: _PrefixSums,
    boundary: int,
    window_size: int,
    features: Sequence[int],
    region: tuple[int, int] | None = None,
) -> float:
    """Sharpness of a boundary on its aligned grid, maxed over statistics."""
    lo, hi = region if region is not None else (0, ps.n)
    n_left = min(_CONTEXT_WINDOWS, (boundary - lo) // window_size)
    n_right = min(_CONTEXT_WINDOWS, (hi - boundary) // window_size)
    if n_left < 1 or n_right < 1:
        return 0.0
    starts = [boundary + (k - n_left) * window_size for k in range(n_left + n_right)]
    best = 0.0
    for f in features:
        width = ps.schema.range_width(f)
        for cid in [None, *sorted(ps.schema.class_ids)]:
            means = _segment_means(ps, starts, window_size, f, cid)
            if len(means) == n_left + n_right:
                best = max(best, _sharpness_from_means(means, n_left, width))
    return float(best)


def align_drift(
    stream: Sequence[Sample],
    approximate_drift: int,
    window_size: int,
    schema: StreamSchema,
    bins: int = DEFAULT_BINS,
    min_window: int = DEFAULT_N_MIN,
) -> AlignmentResult:
    """Realign the window grid so a boundary falls exactly on the drift.

    Chooses offset = approximate_drift mod window_size, so the boundary
    between two adjacent windows is exactly ``approximate_drift``, then
    scores the cut's sharpness from the per-class mean series of the
    top-ranked feature over up to five windows on each side.
    """
    n = len(stream)
    if window_size < min_window:
        raise ValueError(f"window_size {window_size} below minimum {min_window}")
    if approximate_drift < window_size or approximate_drift + window_size > n:
        raise ValueError(
            f"drift at {approximate_drift} too close to the stream edges "
            f"to fit one window of {window_size} on each side"
        )
    offset = approximate_drift % window_size
    boundary_windows = approximate_drift // window_size
    first = max(0, boundary_windows - _CONTEXT_WINDOWS)
    last = min((n - offset) // window_size, boundary_windows + _CONTEXT_WINDOWS)
    render_start = offset + first * window_size
    render_count = last - first

    spec = WindowSpec(size=window_size, stride=window_size, offset=render_start)
    summaries = summarize_stream(stream, spec, schema, bins, limit=render_count)
    reports = filter_features(schema, summaries, drift_epsilon=0.0)
    ranked = ranked_features(reports)
    top = ranked[0].feature if ranked else 0

    boundary_pos = boundary_windows - first
    width = schema.range_width(top)
    sharpness = 0.0
    for cid in [None, *sorted(schema.class_ids)]:
        pairs = [
            (s.per_feature[top].per_class[cid].mean, s.per_feature[top].per_class[cid].count)
            if cid is not None
            else (s.per_feature[top].mean, s.size)
            for s in summaries
        ]
        if any(c == 0 for _, c in pairs):
            continue
        means = [m for m, _ in pairs]
        sharpness = max(sharpness, _sharpness_from_means(means, boundary_pos, width))

    return AlignmentResult(
        window_size=window_size,
        offset=offset,
        boundary_index=approximate_drift,
        sharpness=sharpness,
        render_start=render_start,
        render_count=render_count,
    )


def _candidate_regions(
    ps: _PrefixSums,
    summaries: Sequence[WindowSummary],
    features: Sequence[int],
    window_size: int,
    jump_threshold: float,
) -> list[tuple[int, int]]:
    """Stream regions around window pairs with outstanding mean jumps.

    A pair qualifies when its largest normalized per-class (or overall)
    mean jump exceeds both ``jump_threshold`` and 3x the median jump.
    Adjacent qualifying pairs merge into one region, expanded by one window
    on each side.
    """
    jumps = []
    for i in range(len(summaries) - 1):
        a, b = summaries[i], summaries[i + 1]
        best = 0.0
        for f in features:
            width = ps.schema.range_width(f)
            best = max(best, abs(b.per_feature[f].mean - a.per_feature[f].mean) / width)
            for cid in sorted(ps.schema.class_ids):
                ca = a.per_feature[f].per_class[cid]
                cb = b.per_feature[f].per_class[cid]
                if ca.count > 0 and cb.count > 0:
                    best = max(best, abs(cb.mean - ca.mean) / width)
        jumps.append(best)
    if not jumps:
        return []
    cutoff = max(jump_threshold, 3.0 * float(np.median(jumps)))
    hot = [i for i, j in enumerate(jumps) if j > cutoff]
    if not hot:
        return []

    regions = []
    group = [hot[0]]
    for i in hot[1:]:
        if i == group[-1] + 1:
            group.append(i)
        else:
            regions.append(group)
            group = [i]
    regions.append(group)

    spans = []
    for group in regions:
        lo = summaries[group[0]].start - window_size
        hi = summaries[group[-1] + 1].start + 2 * window_size
        spans.append((max(0, lo), min(ps.n, hi)))
    return spans


def localize(
    stream: Sequence[Sample],
    schema: StreamSchema,
    initial_window: int,
    shrink_factor: float = DEFAULT_SHRINK_FACTOR,
    min_window: int = DEFAULT_MIN_WINDOW,
    bins: int = DEFAULT_BINS,
    drift_epsilon: float = DEFAULT_DRIFT_EPSILON,
    jump_threshold: float = 0.1,
) -> LocalizationReport:
    """Find and align every drift region of a stream.

    Summarizes the stream on the initial grid, keeps drifting features,
    turns outstanding cross-window jumps into candidate regions, then
    shrinks the window inside each region. A region whose realigned
    boundary never reaches sharpness 2 within the first two shrinks is
    flagged as continuous drift; otherwise shrinking continues to
    ``min_window`` and the boundary is refined to the sample index
    maximizing the segment-mean gap, then aligned exactly.
    """
    if not 0.0 < shrink_factor < 1.0:
        raise ValueError("shrink_factor must be in (0, 1)")
    if initial_window < min_window:
        raise ValueError("initial_window must be >= min_window")

    spec = WindowSpec(size=initial_window, stride=initial_window, offset=0)
    summaries = summarize_stream(stream, spec, schema, bins)
    if len(summaries) < 2:
        return LocalizationReport((), (), _localize_notes(min_window, shrink_factor))
    reports = filter_features(schema, summaries, drift_epsilon=drift_epsilon)
    kept = [r.feature for r in ranked_features(reports)]
    if not kept:
        return LocalizationReport((), (), _localize_notes(min_window, shrink_factor))

    ps = _PrefixSums(stream, schema)
    spans = _candidate_regions(ps, summaries, kept, initial_window, jump_threshold)
    if not spans:
        # Drift is present (features were kept) but no single window pair
        # stands out: treat the whole covered span as one diffuse region.
        spans = [(0, summaries[-1].start + initial_window)]

    alignments = []
    continuous = []
    for lo, hi in spans:
        result = _refine_region(
            ps, lo, hi, kept, initial_window, shrink_factor, min_window
        )
        if result is None:
            continue
        kind, payload = result
        if kind == "abrupt":
            boundary, window_size = payload
            try:
                alignments.append(
                    align_drift(stream, boundary, window_size, schema, bins, min_window=2)
                )
            except ValueError:
                continuous.append(ContinuousRegion(lo, hi, window_size, 0.0))
        else:
            window_size, max_sharp = payload
            continuous.append(ContinuousRegion(lo, hi, window_size, max_sharp))

    alignments.sort(key=lambda a: a.boundary_index)
    return LocalizationReport(
        tuple(alignments), tuple(continuous), _localize_notes(min_window, shrink_factor)
    )


def _refine_region(
    ps: _PrefixSums,
    lo: int,
    hi: int,
    features: Sequence[int],
    initial_window: int,
    shrink_factor: float,
    min_window: int,
):
    """Shrink the window inside one region; classify abrupt vs continuous."""
    window = initial_window
    region = (lo, hi)
    sharpness_trail: list[float] = []
    boundary = None
    while True:
        found = _best_boundary(ps, region[0], region[1], features)
        if found is None:
            return None
        boundary, _gap = found
        sharpness_trail.append(
            _boundary_sharpness(ps, boundary, window, features, region)
        )
        # Two shrinks without a sharp cut anywhere: continuous drift.
        if len(sharpness_trail) >= 3 and max(sharpness_trail[:3]) < SHARPNESS_THRESHOLD:
            return "continuous", (window, max(sharpness_trail))
        if window <= min_window:
            break
        window = max(min_window, int(window * shrink_factor))
        span = 2 * window
        region = (max(lo, boundary - span), min(hi, boundary + span))
    if max(sharpness_trail) < SHARPNESS_THRESHOLD:
        return "continuous", (window, max(sharpness_trail))
    return "abrupt", (boundary, window)


def _localize_notes(min_window: int, shrink_factor: float) -> dict:
    return {
        "min_window": min_window,
        "shrink_factor": shrink_factor,
        "continuous_rule": (
            "region flagged continuous when no realigned boundary reaches "
            f"sharpness {SHARPNESS_THRESHOLD} within the first two window "
            "shrinks (heuristic stopping rule)"
        ),
    }
