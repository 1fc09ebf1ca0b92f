"""Adaptive-window drift detection with a Hoeffding mean-shift test.

The detector keeps a shifting window of the most recent samples. On each
check it splits the window into a prefix and a suffix at candidate cut
points and compares segment means of every monitored statistic: per-feature
means in ``marginal`` mode, class-conditional per-feature means in
``per_class`` mode (required for label-swap drift, where marginal feature
distributions never move). When a gap exceeds the Hoeffding threshold the
oldest samples are discarded through the cut point, the test repeats on the
remainder, and the final cut index is reported as the drift point.

The threshold for segment sizes (n0, n1) is

    eps = R * sqrt(ln(2 / delta') / (2 * m)),   m = 2*n0*n1 / (n0 + n1)

with R the feature's global range width and delta' the configured delta
divided by the number of tests evaluated in the same check (a union-bound
correction for multiplicity).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from bisect import bisect_left
from dataclasses import dataclass
from typing import Literal, Sequence

from .stream import Sample, StreamSchema

__all__ = [
    "DEFAULT_DELTA",
    "DEFAULT_N_MIN",
    "DEFAULT_MAX_WINDOW",
    "hoeffding_threshold",
    "Evidence",
    "DriftReport",
    "DriftDetector",
    "HoeffdingAdaptiveDetector",
    "detect_stream",
    "window_size_profile",
]

DEFAULT_DELTA = 0.002
DEFAULT_N_MIN = 30
DEFAULT_MAX_WINDOW = 10_000
DEFAULT_CHECK_INTERVAL = 8

Monitor = Literal["marginal", "per_class"]


def hoeffding_threshold(range_width: float, n0: int, n1: int, delta_prime: float) -> float:
    """Mean-gap threshold for two segments of a bounded variable."""
    m = 2.0 * n0 * n1 / (n0 + n1)
    return range_width * math.sqrt(math.log(2.0 / delta_prime) / (2.0 * m))


@dataclass(frozen=True, slots=True)
class Evidence:
    """Mean gap vs. threshold for one monitored statistic at a drift cut."""

    feature: int
    class_id: int | None
    gap: float
    threshold: float
    exceeded: bool


@dataclass(frozen=True, slots=True)
class DriftReport:
    """Detected drift points plus the evidence and window-length profile."""

    drift_points: tuple[int, ...]
    evidence: tuple[tuple[Evidence, ...], ...]  # aligned with drift_points
    profile: tuple[tuple[int, int], ...]  # (sample index, window length)
    config: dict

    def __post_init__(self) -> None:
        if list(self.drift_points) != sorted(set(self.drift_points)):
            raise ValueError("drift_points must be strictly increasing")


class DriftDetector(ABC):
    """Streaming detector interface: feed samples, get drift indices back.

    Implementations must be fed samples in stream order. A returned index
    is the estimated first sample of the new concept.
    """

    @abstractmethod
    def update(self, sample: Sample) -> int | None: ...

    @property
    @abstractmethod
    def window_length(self) -> int: ...


class _StatTrack:
    """Cumulative sums of one monitored statistic's observations."""

    __slots__ = ("indices", "cumsum", "lo", "range_width")

    def __init__(self, range_width: float) -> None:
        self.indices: list[int] = []
        self.cumsum: list[float] = [0.0]
        self.lo = 0  # first observation inside the adaptive window
        self.range_width = range_width

    def append(self, index: int, value: float) -> None:
        self.indices.append(index)
        self.cumsum.append(self.cumsum[-1] + value)

    def advance_to(self, window_start: int) -> None:
        lo = self.lo
        idx = self.indices
        n = len(idx)
        while lo < n and idx[lo] < window_start:
            lo += 1
        self.lo = lo

    @property
    def count(self) -> int:
        return len(self.indices) - self.lo


class HoeffdingAdaptiveDetector(DriftDetector):
    """Reference adaptive-window detector over raw (optionally per-class)
    feature means.

    Candidate cuts lie on a geometric grid: suffix lengths n_min * 2**k in
    each statistic's own observation count, so a check costs O(log window)
    per statistic. ``exhaustive=True`` evaluates every admissible cut
    instead (oracle mode, linear cost). Splits are evaluated every
    ``check_interval`` samples.
    """

    def __init__(
        self,
        schema: StreamSchema,
        *,
        delta: float = DEFAULT_DELTA,
        n_min: int = DEFAULT_N_MIN,
        max_window: int = DEFAULT_MAX_WINDOW,
        monitor: Monitor = "marginal",
        check_interval: int = DEFAULT_CHECK_INTERVAL,
        exhaustive: bool = False,
    ) -> None:
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {delta}")
        if n_min < 1 or max_window < 2 * n_min:
            raise ValueError("need n_min >= 1 and max_window >= 2 * n_min")
        if monitor not in ("marginal", "per_class"):
            raise ValueError(f"unknown monitor mode {monitor!r}")
        self.schema = schema
        self.delta = delta
        self.n_min = n_min
        self.max_window = max_window
        self.monitor: Monitor = monitor
        self.check_interval = max(1, check_interval)
        self.exhaustive = exhaustive

        self._stats: dict[tuple[int, int | None], _StatTrack] = {}
        if monitor == "marginal":
            for f in range(schema.n_features):
                self._stats[(f, None)] = _StatTrack(schema.range_width(f))
        else:
            for f in range(schema.n_features):
                for cid in schema.class_ids:
                    self._stats[(f, cid)] = _StatTrack(schema.range_width(f))

        self._first_index: int | None = None
        self._last_index: int | None = None
        self.window_start: int | None = None
        self._since_check = 0
        self.profile: list[tuple[int, int]] = []
        self.drift_points: list[int] = []
        self.evidence: list[tuple[Evidence, ...]] = []

    # -- bookkeeping -----------------------------------------------------

    @property
    def window_length(self) -> int:
        if self._last_index is None:
            return 0
        return self._last_index - self.window_start + 1

    def _advance_window(self, new_start: int) -> None:
        # Shrinking only ever drops samples from the oldest end.
        assert self.window_start is not None and new_start >= self.window_start
        self.window_start = new_start
        for track in self._stats.values():
            track.advance_to(new_start)

    # -- split evaluation ------------------------------------------------

    def _split_lengths(self, count: int) -> list[int]:
        """Suffix lengths to try for a statistic with ``count`` observations."""
        if count < 2 * self.n_min:
            return []
        if self.exhaustive:
            return list(range(self.n_min, count - self.n_min + 1))
        lengths = []
        length = self.n_min
        while count - length >= self.n_min:
            lengths.append(length)
            length *= 2
        return lengths

    def _evidence_at(self, cut_index: int, delta_prime: float) -> tuple[Evidence, ...]:
        """Gap vs. threshold for every statistic, split at a stream index."""
        rows = []
        for (feature, cid), track in self._stats.items():
            pos = bisect_left(track.indices, cut_index, track.lo)
            n0 = pos - track.lo
            n1 = len(track.indices) - pos
            if n0 < 1 or n1 < 1:
                continue
            pre = (track.cumsum[pos] - track.cumsum[track.lo]) / n0
            suf = (track.cumsum[-1] - track.cumsum[pos]) / n1
            gap = abs(pre - suf)
            threshold = hoeffding_threshold(track.range_width, n0, n1, delta_prime)
            rows.append(Evidence(feature, cid, gap, threshold, gap > threshold))
        return tuple(rows)

    def _find_cut(self) -> tuple[int, float] | None:
        """First failing split, as (stream index, delta_prime), else None."""
        n_tests = sum(len(self._split_lengths(t.count)) for t in self._stats.values())
        if n_tests == 0:
            return None
        delta_prime = self.delta / n_tests
        log_term = math.log(2.0 / delta_prime)
        for track in self._stats.values():
            count = track.count
            lo = track.lo
            total = track.cumsum[-1] - track.cumsum[lo]
            r = track.range_width
            for suffix_len in self._split_lengths(count):
                pos = lo + count - suffix_len
                n0 = count - suffix_len
                suffix_sum = track.cumsum[-1] - track.cumsum[pos]
                gap = abs((total - suffix_sum) / n0 - suffix_sum / suffix_len)
                m = 2.0 * n0 * suffix_len / count
                if gap > r * math.sqrt(log_term / (2.0 * m)):
                    return track.indices[pos], delta_prime
        return None

    # -- public API --------------------------------------------------------

    def update(self, sample: Sample) -> int | None:
        """Fold one sample in; returns the drift point if one was detected."""
        if self._last_index is not None and sample.index != self._last_index + 1:
            raise ValueError(
                f"out-of-order sample index {sample.index}, "
                f"expected {self._last_index + 1}"
            )
        if self._first_index is None:
            self._first_index = sample.index
            self.window_start = sample.index
        self._last_index = sample.index

        for f in range(self.schema.n_features):
            key = (f, None) if self.monitor == "marginal" else (f, sample.label)
            track = self._stats.get(key)
            if track is None:
                raise ValueError(f"label {sample.label} not in schema class_ids")
            track.append(sample.index, sample.features[f])

        if self.window_length > self.max_window:
            self._advance_window(self._last_index - self.max_window + 1)

        drift: int | None = None
        self._since_check += 1
        if self._since_check >= self.check_interval:
            self._since_check = 0
            first_evidence: tuple[Evidence, ...] | None = None
            while (found := self._find_cut()) is not None:
                cut_index, delta_prime = found
                if first_evidence is None:
                    first_evidence = self._evidence_at(cut_index, delta_prime)
                self._advance_window(cut_index)
                drift = cut_index
            if drift is not None:
                self.drift_points.append(drift)
                self.evidence.append(first_evidence or ())

        self.profile.append((sample.index, self.window_length))
        return drift

    def report(self) -> DriftReport:
        return DriftReport(
            drift_points=tuple(self.drift_points),
            evidence=tuple(self.evidence),
            profile=tuple(self.profile),
            config={
                "delta": self.delta,
                "n_min": self.n_min,
                "max_window": self.max_window,
                "monitor": self.monitor,
                "check_interval": self.check_interval,
                "exhaustive": self.exhaustive,
            },
        )


def detect_stream(
    stream: Sequence[Sample],
    schema: StreamSchema,
    *,
    delta: float = DEFAULT_DELTA,
    n_min: int = DEFAULT_N_MIN,
    max_window: int = DEFAULT_MAX_WINDOW,
    monitor: Monitor = "per_class",
    check_interval: int = DEFAULT_CHECK_INTERVAL,
    exhaustive: bool = False,
) -> DriftReport:
    """Run the adaptive-window detector over a whole stream."""
    if not stream:
        raise ValueError("stream must be non-empty")
    detector = HoeffdingAdaptiveDetector(
        schema,
        delta=delta,
        n_min=n_min,
        max_window=max_window,
        monitor=monitor,
        check_interval=check_interval,
        exhaustive=exhaustive,
    )
    for sample in stream:
        detector.update(sample)
    return detector.report()


def window_size_profile(
    source: DriftReport | HoeffdingAdaptiveDetector,
) -> tuple[tuple[int, int], ...]:
    """Adaptive window length after each processed sample."""
    if isinstance(source, HoeffdingAdaptiveDetector):
        return tuple(source.profile)
    return source.profile
