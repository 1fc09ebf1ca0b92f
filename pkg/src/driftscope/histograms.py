"""Per-window, per-feature, per-class histograms, means, and distances.

Histogram edges are fixed per feature from the schema's global range so
histograms of different windows share a domain and can be compared
directly. Bins are right-closed: a value on an interior edge counts in the
bin below it, the first bin additionally includes its lower edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .stream import Sample, StreamSchema, Window, WindowSpec, slice_windows

__all__ = [
    "DEFAULT_BINS",
    "Histogram",
    "ClassSummary",
    "FeatureSummary",
    "WindowSummary",
    "MeanSeries",
    "summarize_window",
    "summarize_stream",
    "tv_distance",
    "mean_series",
    "brushed_counts",
]

DEFAULT_BINS = 40


@dataclass(frozen=True, slots=True)
class Histogram:
    """Binned counts over a feature's global range.

    ``edges`` has one more entry than ``counts``; edges[0] and edges[-1]
    are exactly the schema range endpoints.
    """

    edges: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError("edges must have len(counts) + 1 entries")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def normalized(self) -> np.ndarray:
        """Counts normalized to sum 1 (the empirical pmf over bins)."""
        total = self.total
        if total == 0:
            raise ValueError("cannot normalize an empty histogram")
        return np.asarray(self.counts, dtype=float) / total


@dataclass(frozen=True, slots=True)
class ClassSummary:
    """One class's view of a feature within a window."""

    histogram: Histogram
    mean: float | None  # None when the class has no samples in the window
    count: int


@dataclass(frozen=True, slots=True)
class FeatureSummary:
    name: str
    histogram: Histogram
    mean: float
    std: float
    per_class: dict[int, ClassSummary]


@dataclass(frozen=True, slots=True)
class WindowSummary:
    """All per-feature and per-class statistics of a single window."""

    window_index: int
    start: int
    size: int
    per_feature: tuple[FeatureSummary, ...]
    count_per_class: dict[int, int]


@dataclass(frozen=True, slots=True)
class MeanSeries:
    """Per-window means of one feature, optionally restricted to a class.

    Windows where the filtered class has no samples are omitted from
    ``values`` and listed in ``omitted_windows``.
    """

    feature: int
    class_filter: int | None
    values: tuple[tuple[int, float], ...]
    omitted_windows: tuple[int, ...] = ()


def bin_edges(schema: StreamSchema, feature: int, bins: int) -> np.ndarray:
    lo, hi = schema.feature_ranges[feature]
    return np.linspace(lo, hi, bins + 1)


def _bin_indices(values: np.ndarray, lo: float, hi: float, bins: int) -> np.ndarray:
    width = (hi - lo) / bins
    idx = np.ceil((values - lo) / width).astype(np.int64) - 1
    return np.clip(idx, 0, bins - 1)


def summarize_window(
    window: Window, schema: StreamSchema, bins: int = DEFAULT_BINS
) -> WindowSummary:
    """Histogram, mean and std per feature, plus the per-class breakdown.

    Means are arithmetic means of the raw values, not of bin midpoints; std
    is the population standard deviation. Requires bins >= 1 and a
    non-empty window. A feature whose global range has zero width gets a
    single degenerate bin; such features are meant to be dropped by feature
    filtering, not analyzed.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if not window.samples:
        raise ValueError("cannot summarize an empty window")

    x = np.asarray([s.features for s in window.samples], dtype=float)
    y = np.asarray([s.label for s in window.samples], dtype=np.int64)
    class_ids = sorted(schema.class_ids)
    count_per_class = {cid: int(np.sum(y == cid)) for cid in class_ids}

    features = []
    for j, name in enumerate(schema.feature_names):
        lo, hi = schema.feature_ranges[j]
        if hi > lo:
            edges = tuple(bin_edges(schema, j, bins).tolist())
            idx = _bin_indices(x[:, j], lo, hi, bins)
            n_bins_f = bins
        else:
            # Constant feature: a single degenerate bin. Kept so positional
            # indexing survives until feature filtering drops it.
            edges = (lo, hi)
            idx = np.zeros(len(x), dtype=np.int64)
            n_bins_f = 1
        overall_counts = np.bincount(idx, minlength=n_bins_f)

        per_class = {}
        for cid in class_ids:
            mask = y == cid
            c_counts = np.bincount(idx[mask], minlength=n_bins_f)
            c_mean = float(np.mean(x[mask, j])) if mask.any() else None
            per_class[cid] = ClassSummary(
                histogram=Histogram(edges, tuple(int(c) for c in c_counts)),
                mean=c_mean,
                count=int(mask.sum()),
            )

        features.append(
            FeatureSummary(
                name=name,
                histogram=Histogram(edges, tuple(int(c) for c in overall_counts)),
                mean=float(np.mean(x[:, j])),
                std=float(np.std(x[:, j])),
                per_class=per_class,
            )
        )

    return WindowSummary(
        window_index=window.window_index,
        start=window.start,
        size=window.size,
        per_feature=tuple(features),
        count_per_class=count_per_class,
    )


def summarize_stream(
    stream: Sequence[Sample],
    spec: WindowSpec,
    schema: StreamSchema,
    bins: int = DEFAULT_BINS,
    limit: int | None = None,
) -> list[WindowSummary]:
    """One WindowSummary per full window, in window order.

    ``limit`` keeps only the first ``limit`` windows of the grid, which is
    how a figure is restricted to a region of interest.
    """
    windows = slice_windows(stream, spec)
    if limit is not None:
        windows = windows[:limit]
    return [summarize_window(w, schema, bins) for w in windows]


def tv_distance(p: Histogram, q: Histogram) -> float:
    """Total variation distance between two histograms with shared edges.

    Both are normalized to probability mass functions over the bins; the
    result is half the L1 distance, in [0, 1].
    """
    if p.edges != q.edges:
        raise ValueError("histograms have mismatched edges")
    return float(0.5 * np.abs(p.normalized() - q.normalized()).sum())


def brushed_counts(
    window: Window,
    schema: StreamSchema,
    bins: int,
    brush_feature: int,
    lo: float,
    hi: float,
) -> list[tuple[int, ...]]:
    """Per-feature bin counts restricted to samples whose value on
    ``brush_feature`` lies in [lo, hi]; used for linked highlighting."""
    x = np.asarray([s.features for s in window.samples], dtype=float)
    mask = (x[:, brush_feature] >= lo) & (x[:, brush_feature] <= hi)
    out = []
    for j in range(schema.n_features):
        f_lo, f_hi = schema.feature_ranges[j]
        idx = _bin_indices(x[mask, j], f_lo, f_hi, bins)
        out.append(tuple(int(c) for c in np.bincount(idx, minlength=bins)))
    return out


def mean_series(
    summaries: Sequence[WindowSummary],
    feature: int,
    class_filter: int | None = None,
) -> MeanSeries:
    """Extract the per-window mean curve of one feature.

    With a class filter, windows where that class has no samples are
    omitted and flagged. Feature is a 0-based index into the schema.
    """
    values: list[tuple[int, float]] = []
    omitted: list[int] = []
    for s in summaries:
        if not 0 <= feature < len(s.per_feature):
            raise ValueError(f"feature index {feature} out of range")
        fs = s.per_feature[feature]
        if class_filter is None:
            values.append((s.window_index, fs.mean))
        else:
            if class_filter not in fs.per_class:
                raise ValueError(f"unknown class {class_filter}")
            cs = fs.per_class[class_filter]
            if cs.count == 0:
                omitted.append(s.window_index)
            else:
                values.append((s.window_index, cs.mean))
    return MeanSeries(
        feature=feature,
        class_filter=class_filter,
        values=tuple(values),
        omitted_windows=tuple(omitted),
    )
