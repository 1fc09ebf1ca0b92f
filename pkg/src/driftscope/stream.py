"""Core data model for labeled streams: CSV ingestion and window slicing."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

__all__ = [
    "Sample",
    "StreamSchema",
    "WindowSpec",
    "Window",
    "CsvFormatError",
    "load_csv",
    "write_csv",
    "slice_windows",
]


class CsvFormatError(ValueError):
    """Raised when an input CSV violates the expected dialect."""


@dataclass(frozen=True, slots=True)
class Sample:
    """One observation: position in the stream, feature vector, class label."""

    index: int
    features: tuple[float, ...]
    label: int


@dataclass(frozen=True)
class StreamSchema:
    """Stream-wide metadata: feature names, global value ranges, class ids.

    ``feature_ranges`` are closed intervals covering every value observed in
    the stream. Histogram edges and drift thresholds derive from them, so
    they are global per feature, never per-window. ``class_names`` maps the
    dense integer class ids back to the original label text for display.
    """

    feature_names: tuple[str, ...]
    feature_ranges: tuple[tuple[float, float], ...]
    class_ids: tuple[int, ...]
    class_names: dict[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.feature_names) != len(self.feature_ranges):
            raise ValueError("feature_names and feature_ranges length mismatch")
        for name, (lo, hi) in zip(self.feature_names, self.feature_ranges):
            if not lo <= hi:
                raise ValueError(f"feature {name!r}: range min {lo} exceeds max {hi}")
        if not self.class_names:
            object.__setattr__(
                self, "class_names", {cid: str(cid) for cid in self.class_ids}
            )

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def range_width(self, feature: int) -> float:
        lo, hi = self.feature_ranges[feature]
        return hi - lo

    def feature_index(self, ref: int | str) -> int:
        """Resolve a feature referenced by index or by name."""
        if isinstance(ref, int):
            if not 0 <= ref < self.n_features:
                raise ValueError(f"feature index {ref} out of range")
            return ref
        try:
            return self.feature_names.index(ref)
        except ValueError:
            raise ValueError(f"unknown feature {ref!r}") from None


@dataclass(frozen=True, slots=True)
class WindowSpec:
    """How a stream is sliced: window size, stride between starts, offset.

    Disjoint consecutive windows (the default analysis mode) correspond to
    stride == size.
    """

    size: int
    stride: int | None = None
    offset: int = 0

    def __post_init__(self) -> None:
        if self.stride is None:
            object.__setattr__(self, "stride", self.size)
        if self.size < 1:
            raise ValueError(f"window size must be >= 1, got {self.size}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.offset < 0:
            raise ValueError(f"offset must be >= 0, got {self.offset}")


@dataclass(frozen=True, slots=True)
class Window:
    """A contiguous, full-size slice of the stream."""

    window_index: int
    start: int
    samples: tuple[Sample, ...]

    @property
    def size(self) -> int:
        return len(self.samples)

    @property
    def end(self) -> int:
        """One past the last sample index covered."""
        return self.start + len(self.samples)


def slice_windows(stream: Sequence[Sample], spec: WindowSpec) -> list[Window]:
    """Slice a stream into full windows; a trailing partial window is dropped.

    Returns floor((N - offset - size) / stride) + 1 windows when the stream
    is long enough, otherwise an empty list. Window k starts at
    offset + k * stride.
    """
    n = len(stream)
    if n < spec.offset + spec.size:
        return []
    count = (n - spec.offset - spec.size) // spec.stride + 1
    windows = []
    for k in range(count):
        start = spec.offset + k * spec.stride
        windows.append(
            Window(
                window_index=k,
                start=start,
                samples=tuple(stream[start : start + spec.size]),
            )
        )
    return windows


def _dense_label_map(raw_labels: list[str]) -> dict[str, int]:
    """Map raw label strings to dense ids 0..k-1, numerically when possible."""
    unique = sorted(set(raw_labels))
    try:
        unique.sort(key=int)
    except ValueError:
        pass  # non-integer labels stay in lexicographic order
    return {raw: i for i, raw in enumerate(unique)}


def load_csv(
    path: str | Path,
    label_column: str | int = "label",
    header: bool = True,
    feature_columns: Sequence[str | int] | None = None,
) -> tuple[StreamSchema, list[Sample]]:
    """Load a labeled stream from a UTF-8 comma-separated file.

    The label column is selected by name (requires a header row) or by
    0-based position. ``feature_columns`` restricts the features to an
    explicit subset, in the given order; by default every non-label column
    is a feature. Labels are mapped to dense integer class ids; the original
    text is kept in the schema. Feature ranges are the observed per-column
    min/max over the whole file.

    Raises CsvFormatError on an empty file, a row of wrong arity (reported
    with its physical line number), a non-numeric feature cell, or an
    unknown label column.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file") from None

        arity = len(first)
        if header:
            names = [c.strip() for c in first]
            rows_iter = reader
        else:
            names = [f"f{i}" for i in range(arity)]
            fh.seek(0)
            rows_iter = csv.reader(fh)

        if isinstance(label_column, int):
            if not 0 <= label_column < arity:
                raise CsvFormatError(
                    f"{path}: label column index {label_column} out of range"
                )
            label_idx = label_column
        else:
            if not header:
                raise CsvFormatError(
                    f"{path}: label column by name requires a header row"
                )
            if label_column not in names:
                raise CsvFormatError(f"{path}: unknown label column {label_column!r}")
            label_idx = names.index(label_column)

        if feature_columns is None:
            feat_idx = [i for i in range(arity) if i != label_idx]
        else:
            feat_idx = []
            for ref in feature_columns:
                if isinstance(ref, int):
                    if not 0 <= ref < arity:
                        raise CsvFormatError(f"{path}: feature index {ref} out of range")
                    feat_idx.append(ref)
                else:
                    if ref not in names:
                        raise CsvFormatError(f"{path}: unknown feature column {ref!r}")
                    feat_idx.append(names.index(ref))
            if label_idx in feat_idx:
                raise CsvFormatError(f"{path}: label column listed as a feature")

        raw_rows: list[tuple[tuple[float, ...], str]] = []
        for row in rows_iter:
            line = rows_iter.line_num
            if len(row) != arity:
                raise CsvFormatError(
                    f"{path}: line {line}: expected {arity} fields, got {len(row)}"
                )
            values = []
            for i in feat_idx:
                cell = row[i].strip()
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: line {line}: non-numeric value {cell!r} "
                        f"in column {names[i]!r}"
                    ) from None
            raw_rows.append((tuple(values), row[label_idx].strip()))

    if not raw_rows:
        raise CsvFormatError(f"{path}: no data rows")

    label_map = _dense_label_map([lab for _, lab in raw_rows])
    samples = [
        Sample(index=i, features=feats, label=label_map[lab])
        for i, (feats, lab) in enumerate(raw_rows)
    ]

    n_feat = len(feat_idx)
    mins = [min(s.features[j] for s in samples) for j in range(n_feat)]
    maxs = [max(s.features[j] for s in samples) for j in range(n_feat)]
    schema = StreamSchema(
        feature_names=tuple(names[i] for i in feat_idx),
        feature_ranges=tuple(zip(mins, maxs)),
        class_ids=tuple(sorted(label_map.values())),
        class_names={i: raw for raw, i in label_map.items()},
    )
    return schema, samples


def write_csv(
    path: str | Path,
    schema: StreamSchema,
    stream: Sequence[Sample],
    label_column: str = "label",
) -> None:
    """Write a stream in the same dialect ``load_csv`` reads."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(schema.feature_names) + [label_column])
        for s in stream:
            writer.writerow(
                [repr(v) for v in s.features] + [schema.class_names[s.label]]
            )
