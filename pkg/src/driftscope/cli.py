"""Command-line entry points: generate, summarize, detect, analyze, render,
and serve."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import artifacts
from .analysis import filter_features, localize
from .detector import (
    DEFAULT_DELTA,
    DEFAULT_MAX_WINDOW,
    DEFAULT_N_MIN,
    detect_stream,
)
from .generators import (
    CirclesConfig,
    Sine1Config,
    generate_circles,
    generate_sine1,
)
from .histograms import DEFAULT_BINS, summarize_stream
from .render import RenderSpec, render_pht
from .stream import WindowSpec, write_csv

DEFAULT_PORT = int(os.environ.get("DRIFTSCOPE_PORT", "8765"))


def _dataset_source(path: Path, label_column: str, features: str | None) -> dict:
    source: dict = {"path": str(path), "label_column": label_column}
    if features:
        source["feature_columns"] = [f.strip() for f in features.split(",")]
    return source


def _load(path: Path, label_column: str, features: str | None):
    try:
        return artifacts.load_dataset(_dataset_source(path, label_column, features))
    except FileNotFoundError as exc:
        raise click.ClickException(str(exc)) from None
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None


def _write_json(doc: dict, out: Path | None) -> None:
    text = artifacts.canonical_json(doc)
    if out is None:
        click.echo(text)
    else:
        out.write_text(text, encoding="utf-8")


@click.group()
def main() -> None:
    """Drift analysis over labeled streams: windowed histogram summaries,
    adaptive-window drift detection, and timeline diagrams."""


@main.command()
@click.option("--dataset", type=click.Choice(["sine1", "circles"]), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--n-samples", type=int, default=None)
@click.option("--drift-period", type=int, default=None)
@click.option("--noise-rate", type=float, default=None, help="sine1 only")
@click.option("--circle-schedule", type=str, default=None,
              help="circles only: cx,cy,r;cx,cy,r;...")
@click.option("--seed", type=int, default=None)
def generate(dataset, out, n_samples, drift_period, noise_rate, circle_schedule, seed):
    """Write a synthetic stream as CSV plus a JSON sidecar with the config
    and the true drift points."""
    overrides = {}
    if n_samples is not None:
        overrides["n_samples"] = n_samples
    if drift_period is not None:
        overrides["drift_period"] = drift_period
    if seed is not None:
        overrides["seed"] = seed
    try:
        if dataset == "sine1":
            if noise_rate is not None:
                overrides["noise_rate"] = noise_rate
            config = Sine1Config(**overrides)
            schema, stream = generate_sine1(config)
        else:
            if circle_schedule is not None:
                overrides["circle_schedule"] = tuple(
                    tuple(float(x) for x in part.split(","))
                    for part in circle_schedule.split(";")
                )
            config = CirclesConfig(**overrides)
            schema, stream = generate_circles(config)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None

    write_csv(out, schema, stream)
    sidecar = artifacts.generator_metadata(dataset, config)
    sidecar["format_version"] = artifacts.FORMAT_VERSION
    _write_json(sidecar, out.with_suffix(".json"))
    click.echo(f"wrote {len(stream)} samples to {out}", err=True)


def _input_options(fn):
    fn = click.option("--in", "path", type=click.Path(path_type=Path),
                      required=True)(fn)
    fn = click.option("--label-column", default="label")(fn)
    fn = click.option("--features", default=None,
                      help="comma-separated feature columns to keep")(fn)
    return fn


@main.command()
@_input_options
@click.option("--window-size", type=int, required=True)
@click.option("--stride", type=int, default=None)
@click.option("--offset", type=int, default=0)
@click.option("--bins", type=int, default=DEFAULT_BINS)
@click.option("--limit", type=int, default=None, help="keep only the first N windows")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def summarize(path, label_column, features, window_size, stride, offset, bins,
              limit, out):
    """Per-window histogram and mean summaries as JSON."""
    schema, stream, content_hash, _ = _load(path, label_column, features)
    params = {
        "size": window_size,
        "stride": stride if stride is not None else window_size,
        "offset": offset,
        "bins": bins,
        "limit": limit,
        "features": None,
        "classes": None,
    }
    try:
        spec = WindowSpec(size=params["size"], stride=params["stride"],
                          offset=params["offset"])
        summaries = summarize_stream(stream, spec, schema, bins, limit=limit)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    doc = artifacts.summaries_document(summaries, params, content_hash)
    _write_json(doc, out)
    click.echo(f"{len(summaries)} windows summarized", err=True)


@main.command()
@_input_options
@click.option("--delta", type=float, default=DEFAULT_DELTA)
@click.option("--n-min", type=int, default=DEFAULT_N_MIN)
@click.option("--max-window", type=int, default=DEFAULT_MAX_WINDOW)
@click.option("--per-class/--marginal", "per_class", default=True,
              help="monitor class-conditional means (default) or marginals")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def detect(path, label_column, features, delta, n_min, max_window, per_class, out):
    """Detect drift points with the adaptive-window detector."""
    schema, stream, content_hash, _ = _load(path, label_column, features)
    try:
        report = detect_stream(
            stream,
            schema,
            delta=delta,
            n_min=n_min,
            max_window=max_window,
            monitor="per_class" if per_class else "marginal",
        )
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    _write_json(artifacts.drift_document(report, content_hash), out)
    click.echo(f"{len(report.drift_points)} drift points", err=True)


@main.command()
@_input_options
@click.option("--initial-window", type=int, required=True)
@click.option("--shrink-factor", type=float, default=0.5)
@click.option("--min-window", type=int, default=250)
@click.option("--bins", type=int, default=DEFAULT_BINS)
@click.option("--drift-epsilon", type=float, default=0.05)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def analyze(path, label_column, features, initial_window, shrink_factor,
            min_window, bins, drift_epsilon, out):
    """Feature filtering, drift ranking, and drift-point alignment."""
    schema, stream, content_hash, _ = _load(path, label_column, features)
    params = {
        "initial_window": initial_window,
        "shrink_factor": shrink_factor,
        "min_window": min_window,
        "bins": bins,
        "drift_epsilon": drift_epsilon,
    }
    try:
        spec = WindowSpec(size=initial_window)
        summaries = summarize_stream(stream, spec, schema, bins)
        reports = filter_features(schema, summaries, drift_epsilon=drift_epsilon)
        loc = localize(
            stream,
            schema,
            initial_window,
            shrink_factor=shrink_factor,
            min_window=min_window,
            bins=bins,
            drift_epsilon=drift_epsilon,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    _write_json(artifacts.analysis_document(reports, loc, params, content_hash), out)
    click.echo(
        f"{len(loc.alignments)} alignments, "
        f"{len(loc.continuous_regions)} continuous regions", err=True,
    )


@main.command()
@click.option("--summaries", "summaries_path", type=click.Path(path_type=Path),
              required=True, help="summaries JSON produced by `summarize`")
@click.option("--bins", type=int, default=None)
@click.option("--features", default=None, help="comma-separated feature indices")
@click.option("--classes", default=None, help="comma-separated class ids")
@click.option("--window-size", type=int, default=None,
              help="validate the summaries were computed at this size")
@click.option("--offset", type=int, default=None,
              help="validate the summaries were computed at this offset")
@click.option("--width", type=int, default=1200)
@click.option("--drift-markers", default=None, help="comma-separated sample indices")
@click.option("--no-means", is_flag=True, default=False)
@click.option("--out", type=click.Path(path_type=Path), required=True)
def render(summaries_path, bins, features, classes, window_size, offset, width,
           drift_markers, no_means, out):
    """Render a summaries JSON document as an SVG timeline grid."""
    from .histograms import ClassSummary, FeatureSummary, Histogram, WindowSummary

    try:
        doc = json.loads(Path(summaries_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"{summaries_path}: {exc}") from None
    windows = doc.get("windows", [])
    if not windows:
        raise click.ClickException(f"{summaries_path}: no windows in summaries input")
    if window_size is not None and doc.get("params", {}).get("size") != window_size:
        raise click.ClickException(
            f"summaries were computed at size {doc.get('params', {}).get('size')}, "
            f"not {window_size}"
        )
    if offset is not None and doc.get("params", {}).get("offset") != offset:
        raise click.ClickException(
            f"summaries were computed at offset "
            f"{doc.get('params', {}).get('offset')}, not {offset}"
        )

    summaries = []
    for w in windows:
        per_feature = []
        for fd in w["per_feature"]:
            edges = tuple(fd["edges"])
            per_class = {
                int(cid): ClassSummary(
                    histogram=Histogram(edges, tuple(cd["counts"])),
                    mean=cd["mean"],
                    count=cd["count"],
                )
                for cid, cd in fd["per_class"].items()
            }
            per_feature.append(
                FeatureSummary(
                    name=fd["name"],
                    histogram=Histogram(edges, tuple(fd["counts"])),
                    mean=fd["mean"],
                    std=fd["std"],
                    per_class=per_class,
                )
            )
        summaries.append(
            WindowSummary(
                window_index=w["window_index"],
                start=w["start"],
                size=w["size"],
                per_feature=tuple(per_feature),
                count_per_class={int(k): v for k, v in w["count_per_class"].items()},
            )
        )

    spec = RenderSpec(
        width=width,
        bins=bins,
        features=tuple(int(f) for f in features.split(",")) if features else None,
        classes=tuple(int(c) for c in classes.split(",")) if classes else None,
        show_means=not no_means,
        drift_markers=tuple(int(m) for m in drift_markers.split(","))
        if drift_markers else (),
    )
    try:
        svg = render_pht(summaries, spec)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    Path(out).write_text(svg, encoding="utf-8")
    click.echo(f"wrote {out}", err=True)


@main.command()
@click.option("--in", "path", type=click.Path(path_type=Path), default=None)
@click.option("--label-column", default="label")
@click.option("--features", default=None)
@click.option("--dataset", type=click.Choice(["sine1", "circles"]), default=None,
              help="serve a generated dataset instead of a CSV")
@click.option("--seed", type=int, default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=DEFAULT_PORT,
              envvar="DRIFTSCOPE_PORT", show_default=True)
def serve(path, label_column, features, dataset, seed, host, port):
    """Serve the read-only JSON API over one loaded dataset."""
    import uvicorn

    from .service import Session, create_app

    if (path is None) == (dataset is None):
        raise click.ClickException("pass exactly one of --in or --dataset")
    if path is not None:
        source = _dataset_source(path, label_column, features)
    else:
        config = {} if seed is None else {"seed": seed}
        source = {"generator": dataset, "config": config}
    try:
        session = Session(source)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        raise click.ClickException(str(exc)) from None
    uvicorn.run(create_app(session), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
