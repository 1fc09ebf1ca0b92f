"""Deterministic SVG rendering of window-histogram timelines.

Two views: the timeline grid (one horizontal band per feature, one
histogram per window, means joined into a polyline) and the classic
parallel-histogram diagram for a single window (one vertical axis per
feature). Rendering is a pure function of (summaries, spec); identical
inputs yield byte-identical SVG, which golden tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .histograms import WindowSummary
from .stream import Sample

__all__ = [
    "RenderSpec",
    "PhtCell",
    "PhtPanel",
    "PhtFigure",
    "RenderError",
    "build_pht_figure",
    "render_pht",
    "render_parallel_histograms",
]

FEATURE_CAP = 12
WINDOW_CAP = 40

# Okabe-Ito categorical palette: colorblind-safe, assigned by class id order.
CLASS_PALETTE = (
    "#0072B2",
    "#D55E00",
    "#009E73",
    "#CC79A7",
    "#E69F00",
    "#56B4E9",
    "#F0E442",
    "#000000",
)

OVERALL_COLOR = "#9aa0a6"
MEAN_ALL_COLOR = "#202124"
DRIFT_MARKER_COLOR = "#c0392b"


class RenderError(ValueError):
    """Raised when a render spec does not match the summaries."""


@dataclass(frozen=True)
class RenderSpec:
    """What to draw and how large.

    ``features`` is an ordered subset of feature indices (all by default,
    capped at ``feature_cap``); ``classes`` selects per-class layers, None
    draws the overall distribution only. Bar lengths are normalized per
    feature band: the fullest bin of a band spans the whole cell width, so
    bands are not height-comparable with each other.
    """

    width: int = 1200
    height: int = 0  # 0: derived from the number of feature bands
    bins: int | None = None
    features: tuple[int, ...] | None = None
    classes: tuple[int, ...] | None = None
    class_colors: dict[int, str] = field(default_factory=dict)
    normalize: str = "per_axis"
    show_means: bool = True
    drift_markers: tuple[int, ...] = ()
    feature_cap: int = FEATURE_CAP
    show_samples: bool = False

    def color(self, class_id: int) -> str:
        if class_id in self.class_colors:
            return self.class_colors[class_id]
        return CLASS_PALETTE[class_id % len(CLASS_PALETTE)]


@dataclass(frozen=True)
class PhtCell:
    window_index: int
    start: int
    size: int
    layers: dict[str, tuple[int, ...]]  # series key -> bin counts
    means: dict[str, float | None]


@dataclass(frozen=True)
class PhtPanel:
    feature: int
    name: str
    lo: float
    hi: float
    cells: tuple[PhtCell, ...]
    polylines: dict[str, tuple[tuple[int, float], ...]]  # series -> (cell, mean)


@dataclass(frozen=True)
class PhtFigure:
    panels: tuple[PhtPanel, ...]
    n_windows: int
    series: tuple[str, ...]
    drift_markers: tuple[int, ...]
    span: tuple[int, int]  # first sample covered, one past the last


def _series_keys(spec: RenderSpec) -> tuple[str, ...]:
    if spec.classes is None:
        return ("all",)
    return tuple(str(c) for c in spec.classes)


def _validate(summaries: Sequence[WindowSummary], spec: RenderSpec) -> tuple[int, ...]:
    if not summaries:
        raise RenderError("no window summaries to render")
    if len(summaries) > WINDOW_CAP:
        raise RenderError(
            f"{len(summaries)} windows exceed the render cap of {WINDOW_CAP}; "
            "restrict the grid with a limit"
        )
    n_features = len(summaries[0].per_feature)
    features = spec.features if spec.features is not None else tuple(range(n_features))
    if len(features) > spec.feature_cap:
        raise RenderError(
            f"{len(features)} features exceed the cap of {spec.feature_cap}"
        )
    for f in features:
        if not 0 <= f < n_features:
            raise RenderError(f"unknown feature index {f}")
    if spec.classes is not None:
        known = set(summaries[0].count_per_class)
        for c in spec.classes:
            if c not in known:
                raise RenderError(f"unknown class {c}")
    if spec.bins is not None:
        have = len(summaries[0].per_feature[0].histogram.counts)
        if spec.bins != have:
            raise RenderError(f"spec.bins={spec.bins} but summaries carry {have} bins")
    return features


def build_pht_figure(
    summaries: Sequence[WindowSummary], spec: RenderSpec
) -> PhtFigure:
    """Assemble the renderable grid description from window summaries."""
    features = _validate(summaries, spec)
    series = _series_keys(spec)

    panels = []
    for f in features:
        first = summaries[0].per_feature[f]
        lo, hi = first.histogram.edges[0], first.histogram.edges[-1]
        cells = []
        polylines: dict[str, list[tuple[int, float]]] = {k: [] for k in series}
        for pos, s in enumerate(summaries):
            fs = s.per_feature[f]
            layers: dict[str, tuple[int, ...]] = {}
            means: dict[str, float | None] = {}
            for key in series:
                if key == "all":
                    layers[key] = fs.histogram.counts
                    means[key] = fs.mean
                else:
                    cs = fs.per_class[int(key)]
                    layers[key] = cs.histogram.counts
                    means[key] = cs.mean
                if means[key] is not None:
                    polylines[key].append((pos, means[key]))
            cells.append(
                PhtCell(
                    window_index=s.window_index,
                    start=s.start,
                    size=s.size,
                    layers=layers,
                    means=means,
                )
            )
        panels.append(
            PhtPanel(
                feature=f,
                name=first.name,
                lo=lo,
                hi=hi,
                cells=tuple(cells),
                polylines={k: tuple(v) for k, v in polylines.items()},
            )
        )

    return PhtFigure(
        panels=tuple(panels),
        n_windows=len(summaries),
        series=series,
        drift_markers=tuple(spec.drift_markers),
        span=(summaries[0].start, summaries[-1].start + summaries[-1].size),
    )


class _Svg:
    """Tiny SVG assembler with fixed coordinate formatting."""

    def __init__(self, width: float, height: float) -> None:
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
            f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">\n'
        ]

    def open_group(self, cls: str, **data: object) -> None:
        attrs = "".join(f' data-{k.replace("_", "-")}="{v}"' for k, v in data.items())
        self.parts.append(f'<g class="{cls}"{attrs}>\n')

    def close_group(self) -> None:
        self.parts.append("</g>\n")

    def rect(self, x: float, y: float, w: float, h: float, fill: str, cls: str = "",
             opacity: float | None = None, stroke: str | None = None) -> None:
        cls_attr = f' class="{cls}"' if cls else ""
        op = f' fill-opacity="{opacity:g}"' if opacity is not None else ""
        st = f' stroke="{stroke}" stroke-width="0.5"' if stroke else ""
        self.parts.append(
            f'<rect{cls_attr} x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" '
            f'height="{h:.2f}" fill="{fill}"{op}{st}/>\n'
        )

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str,
             cls: str = "", width: float = 1.0, dash: str | None = None) -> None:
        cls_attr = f' class="{cls}"' if cls else ""
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line{cls_attr} x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" '
            f'y2="{y2:.2f}" stroke="{stroke}" stroke-width="{width:g}"{dash_attr}/>\n'
        )

    def polyline(self, points: Sequence[tuple[float, float]], stroke: str,
                 cls: str = "", data: dict | None = None) -> None:
        cls_attr = f' class="{cls}"' if cls else ""
        data_attr = "".join(
            f' data-{k}="{v}"' for k, v in (data or {}).items()
        )
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(
            f'<polyline{cls_attr}{data_attr} points="{pts}" fill="none" '
            f'stroke="{stroke}" stroke-width="1.5"/>\n'
        )

    def circle(self, cx: float, cy: float, r: float, fill: str, cls: str = "") -> None:
        cls_attr = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<circle{cls_attr} cx="{cx:.2f}" cy="{cy:.2f}" r="{r:g}" fill="{fill}"/>\n'
        )

    def text(self, x: float, y: float, content: str, cls: str = "",
             size: int = 11, anchor: str = "start", fill: str = "#333") -> None:
        cls_attr = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<text{cls_attr} x="{x:.2f}" y="{y:.2f}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{fill}">{content}</text>\n'
        )

    def done(self) -> str:
        return "".join(self.parts) + "</svg>\n"


MARGIN = 36
BAND_GAP = 14
BAND_HEIGHT = 150
LABEL_GUTTER = 90
FOOTER = 26


def _series_color(key: str, spec: RenderSpec) -> str:
    if key == "all":
        return MEAN_ALL_COLOR
    return spec.color(int(key))


def render_pht(summaries: Sequence[WindowSummary], spec: RenderSpec) -> str:
    """Render the timeline grid: bands per feature, one histogram per
    window, translucent per-class overlays, mean polylines, drift markers.

    Bin bars run horizontally within each window cell and are normalized so
    the fullest bin of each feature band spans a full cell width.
    """
    figure = build_pht_figure(summaries, spec)
    n_bands = len(figure.panels)
    height = spec.height or (MARGIN * 2 + FOOTER
                             + n_bands * BAND_HEIGHT + (n_bands - 1) * BAND_GAP)
    svg = _Svg(spec.width, height)
    inner_w = spec.width - MARGIN - LABEL_GUTTER - MARGIN
    cell_w = inner_w / figure.n_windows
    span_lo, span_hi = figure.span

    for b, panel in enumerate(figure.panels):
        band_x = MARGIN + LABEL_GUTTER
        band_y = MARGIN + b * (BAND_HEIGHT + BAND_GAP)
        svg.open_group("band", feature=panel.feature, name=panel.name)
        svg.text(MARGIN, band_y + BAND_HEIGHT / 2, panel.name, cls="band-label")
        svg.text(band_x - 6, band_y + 10, f"{panel.hi:g}", cls="axis-max",
                 size=9, anchor="end")
        svg.text(band_x - 6, band_y + BAND_HEIGHT - 2, f"{panel.lo:g}",
                 cls="axis-min", size=9, anchor="end")

        peak = 1
        for cell in panel.cells:
            for counts in cell.layers.values():
                peak = max(peak, max(counts))

        value_span = (panel.hi - panel.lo) or 1.0

        def y_of(value: float) -> float:
            return band_y + BAND_HEIGHT * (1.0 - (value - panel.lo) / value_span)

        for pos, cell in enumerate(panel.cells):
            x0 = band_x + pos * cell_w
            svg.open_group("cell", window=cell.window_index, start=cell.start)
            svg.rect(x0, band_y, cell_w, BAND_HEIGHT, "none", cls="cell-frame",
                     stroke="#d0d0d0")
            for key in figure.series:
                counts = cell.layers[key]
                bins = len(counts)
                bin_h = BAND_HEIGHT / bins
                color = OVERALL_COLOR if key == "all" else spec.color(int(key))
                opacity = 0.85 if key == "all" else 0.55
                svg.open_group("hist", series=key)
                # zero-count bins still emit a zero-width bar so the node
                # tree is identical across windows (only geometry varies)
                for i, count in enumerate(counts):
                    bar = (count / peak) * cell_w
                    y_top = band_y + BAND_HEIGHT - (i + 1) * bin_h
                    svg.rect(x0, y_top, bar, bin_h, color, cls="bar",
                             opacity=opacity)
                svg.close_group()
            svg.close_group()

        if spec.show_means:
            for key in figure.series:
                pts = [
                    (band_x + (pos + 0.5) * cell_w, y_of(mean))
                    for pos, mean in panel.polylines[key]
                ]
                if not pts:
                    continue
                color = _series_color(key, spec)
                if len(pts) > 1:
                    svg.polyline(pts, color, cls="mean-line",
                                 data={"series": key})
                svg.open_group("mean-markers", series=key)
                for cx, cy in pts:
                    svg.circle(cx, cy, 2.2, color, cls="mean-dot")
                svg.close_group()

        for marker in figure.drift_markers:
            if span_lo <= marker <= span_hi:
                mx = band_x + inner_w * (marker - span_lo) / (span_hi - span_lo)
                svg.line(mx, band_y, mx, band_y + BAND_HEIGHT,
                         DRIFT_MARKER_COLOR, cls="drift-marker", dash="4 3")
        svg.close_group()

    note_y = height - MARGIN + 12
    svg.text(MARGIN, note_y,
             "bar lengths normalized per band; bands are not comparable with "
             "each other", cls="legend-note", size=9, fill="#777")
    return svg.done()


AXIS_SLOT = 120


def render_parallel_histograms(
    summary: WindowSummary,
    spec: RenderSpec,
    samples: Sequence[Sample] | None = None,
) -> str:
    """Classic parallel-histogram diagram of one window.

    One vertical axis per feature, equally spaced, with that feature's
    histogram drawn along it; per-class layers overlay in class colors.
    Sample polylines are off by default and drawn only when the render
    spec asks for them and samples are supplied.
    """
    features = _validate([summary], spec)
    series = _series_keys(spec)
    if spec.show_samples and samples is None:
        raise RenderError("show_samples requires the window's samples")

    n_axes = len(features)
    height = spec.height or 420
    width = spec.width or (MARGIN * 2 + n_axes * AXIS_SLOT)
    svg = _Svg(width, height)
    inner_h = height - 2 * MARGIN - 18
    slot = (width - 2 * MARGIN) / n_axes

    axis_x = {f: MARGIN + (i + 0.5) * slot for i, f in enumerate(features)}
    scales = {}
    for f in features:
        fs = summary.per_feature[f]
        lo, hi = fs.histogram.edges[0], fs.histogram.edges[-1]
        scales[f] = (lo, (hi - lo) or 1.0)

    if spec.show_samples and samples is not None:
        svg.open_group("samples")
        for s in samples:
            pts = []
            for f in features:
                lo, span = scales[f]
                y = MARGIN + inner_h * (1.0 - (s.features[f] - lo) / span)
                pts.append((axis_x[f], y))
            svg.polyline(pts, "#bbbbbb", cls="sample-line")
        svg.close_group()

    for f in features:
        fs = summary.per_feature[f]
        lo, span = scales[f]
        x = axis_x[f]
        svg.open_group("axis", feature=f, name=fs.name)
        svg.line(x, MARGIN, x, MARGIN + inner_h, "#444", cls="axis-line")
        svg.text(x, height - MARGIN + 8, fs.name, cls="axis-label", anchor="middle")

        peak = 1
        for key in series:
            counts = fs.histogram.counts if key == "all" \
                else fs.per_class[int(key)].histogram.counts
            peak = max(peak, max(counts))

        bar_budget = slot * 0.8
        for key in series:
            counts = fs.histogram.counts if key == "all" \
                else fs.per_class[int(key)].histogram.counts
            bins = len(counts)
            bin_h = inner_h / bins
            color = OVERALL_COLOR if key == "all" else spec.color(int(key))
            opacity = 0.85 if key == "all" else 0.55
            svg.open_group("hist", series=key)
            for i, count in enumerate(counts):
                bar = (count / peak) * bar_budget
                y_top = MARGIN + inner_h - (i + 1) * bin_h
                svg.rect(x, y_top, bar, bin_h, color, cls="bar", opacity=opacity)
            svg.close_group()
        svg.close_group()

    return svg.done()
