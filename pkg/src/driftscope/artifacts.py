"""Canonical JSON documents and content hashing for analysis artifacts.

The CLI and the HTTP service emit the same documents through these
builders, so on-demand recomputation and offline output are byte-for-byte
identical for identical parameters.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from .analysis import LocalizationReport
from .detector import DriftReport
from .generators import (
    RNG_ALGORITHM,
    CirclesConfig,
    Sine1Config,
    generate_circles,
    generate_sine1,
    true_drift_points,
)
from .histograms import WindowSummary
from .stream import Sample, StreamSchema, load_csv

FORMAT_VERSION = 1


def canonical_json(obj: object) -> str:
    """Deterministic JSON text: sorted keys, no whitespace padding."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def file_hash(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_dataset(
    source: dict,
) -> tuple[StreamSchema, list[Sample], str, dict]:
    """Resolve a dataset source into (schema, stream, content_hash, meta).

    ``source`` is either {"path": ..., "label_column": ..., "feature_columns": ...}
    or {"generator": "sine1"|"circles", "config": {...}}.
    """
    if "path" in source:
        path = Path(source["path"])
        if not path.exists():
            raise FileNotFoundError(f"dataset not found: {path}")
        schema, stream = load_csv(
            path,
            label_column=source.get("label_column", "label"),
            header=source.get("header", True),
            feature_columns=source.get("feature_columns"),
        )
        meta = {"kind": "csv", "path": str(path)}
        return schema, stream, file_hash(path), meta

    if "generator" in source:
        name = source["generator"]
        overrides = source.get("config", {})
        if name == "sine1":
            config = Sine1Config(**overrides)
            schema, stream = generate_sine1(config)
        elif name == "circles":
            overrides = dict(overrides)
            if "circle_schedule" in overrides:
                overrides["circle_schedule"] = tuple(
                    tuple(c) for c in overrides["circle_schedule"]
                )
            config = CirclesConfig(**overrides)
            schema, stream = generate_circles(config)
        else:
            raise KeyError(f"unknown generator {name!r}")
        config_doc = generator_metadata(name, config)
        return schema, stream, sha256_text(canonical_json(config_doc)), config_doc

    raise KeyError("dataset source needs either 'path' or 'generator'")


def generator_metadata(name: str, config: Sine1Config | CirclesConfig) -> dict:
    doc = {
        "kind": "generator",
        "dataset": name,
        "config": asdict(config),
        "rng_algorithm": RNG_ALGORITHM,
        "true_drift_points": true_drift_points(config),
        "boundary_convention": "drift takes effect at exact multiples of drift_period",
    }
    if isinstance(config, CirclesConfig):
        doc["config"]["circle_schedule"] = [list(c) for c in config.circle_schedule]
    return doc


def schema_to_dict(schema: StreamSchema) -> dict:
    return {
        "feature_names": list(schema.feature_names),
        "feature_ranges": [[lo, hi] for lo, hi in schema.feature_ranges],
        "class_ids": list(schema.class_ids),
        "class_names": {str(k): v for k, v in schema.class_names.items()},
    }


def summary_to_dict(summary: WindowSummary) -> dict:
    return {
        "window_index": summary.window_index,
        "start": summary.start,
        "size": summary.size,
        "count_per_class": {str(k): v for k, v in summary.count_per_class.items()},
        "per_feature": [
            {
                "name": fs.name,
                "edges": list(fs.histogram.edges),
                "counts": list(fs.histogram.counts),
                "mean": fs.mean,
                "std": fs.std,
                "per_class": {
                    str(cid): {
                        "counts": list(cs.histogram.counts),
                        "mean": cs.mean,
                        "count": cs.count,
                    }
                    for cid, cs in sorted(fs.per_class.items())
                },
            }
            for fs in summary.per_feature
        ],
    }


def summaries_document(
    summaries: Sequence[WindowSummary],
    params: dict,
    content_hash: str,
    brushed: dict[int, list[list[int]]] | None = None,
) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "content_hash": content_hash,
        "params": params,
        "windows": [summary_to_dict(s) for s in summaries],
    }
    if brushed is not None:
        for w, window_doc in enumerate(doc["windows"]):
            for j, feature_doc in enumerate(window_doc["per_feature"]):
                feature_doc["brushed_counts"] = brushed[w][j]
    return doc


def drift_document(report: DriftReport, content_hash: str) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "content_hash": content_hash,
        "config": report.config,
        "drift_points": list(report.drift_points),
        "profile": [[i, l] for i, l in report.profile],
        "evidence": [
            [
                {
                    "feature": e.feature,
                    "class": e.class_id,
                    "gap": e.gap,
                    "threshold": e.threshold,
                    "exceeded": e.exceeded,
                }
                for e in point_evidence
            ]
            for point_evidence in report.evidence
        ],
    }


def analysis_document(
    reports: Sequence,
    localization: LocalizationReport,
    params: dict,
    content_hash: str,
) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "content_hash": content_hash,
        "params": params,
        "features": [
            {
                "feature": r.feature,
                "name": r.name,
                "status": r.status.value,
                "drift_score": r.drift_score,
            }
            for r in reports
        ],
        "alignments": [
            {
                "window_size": a.window_size,
                "offset": a.offset,
                "boundary_index": a.boundary_index,
                "sharpness": a.sharpness,
                "render_start": a.render_start,
                "render_count": a.render_count,
            }
            for a in localization.alignments
        ],
        "continuous_regions": [
            {
                "start": c.start,
                "end": c.end,
                "window_size": c.window_size,
                "max_sharpness": c.max_sharpness,
            }
            for c in localization.continuous_regions
        ],
        "notes": localization.notes,
    }
