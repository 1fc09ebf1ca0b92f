"""Read-only HTTP API over one loaded dataset session.

Summaries, drift reports, analyses, and figures are recomputed on demand
and cached by a hash of the request parameters; every response carries the
dataset content hash so clients can validate caches. The loaded stream is
immutable; switching datasets takes an exclusive turn and clears the cache.
"""

from __future__ import annotations

import threading
from typing import Callable

from fastapi import FastAPI, Request, Response

from . import artifacts
from .analysis import filter_features, localize
from .detector import (
    DEFAULT_DELTA,
    DEFAULT_MAX_WINDOW,
    DEFAULT_N_MIN,
    detect_stream,
)
from .histograms import DEFAULT_BINS, brushed_counts, summarize_stream
from .render import RenderSpec, render_pht
from .stream import WindowSpec, slice_windows

__all__ = ["Session", "create_app"]


class ParamError(ValueError):
    """Invalid query parameters, with the offending field names."""

    def __init__(self, fields: list[str]) -> None:
        super().__init__(f"invalid parameters: {', '.join(fields)}")
        self.fields = fields


class _Params:
    """Query-string parsing that collects every invalid field."""

    def __init__(self, raw: dict[str, str]) -> None:
        self.raw = raw
        self.bad: list[str] = []

    def _get(self, name: str, parse: Callable, default, validate) -> object:
        text = self.raw.get(name)
        if text is None or text == "":
            return default
        try:
            value = parse(text)
        except (TypeError, ValueError):
            self.bad.append(name)
            return default
        if validate is not None and not validate(value):
            self.bad.append(name)
            return default
        return value

    def int_(self, name: str, default=None, minimum: int | None = None):
        return self._get(
            name, int, default,
            (lambda v: v >= minimum) if minimum is not None else None,
        )

    def float_(self, name: str, default=None, lo: float | None = None,
               hi: float | None = None):
        def ok(v: float) -> bool:
            return (lo is None or v > lo) and (hi is None or v < hi)
        return self._get(name, float, default, ok)

    def choice(self, name: str, options: tuple[str, ...], default: str):
        return self._get(name, str, default, lambda v: v in options)

    def int_list(self, name: str, default=None):
        def parse(text: str) -> tuple[int, ...]:
            return tuple(int(p) for p in text.split(",") if p != "")
        return self._get(name, parse, default, None)

    def require(self, name: str, value) -> object:
        if value is None and name not in self.bad:
            self.bad.append(name)
        return value

    def finish(self) -> None:
        if self.bad:
            raise ParamError(sorted(set(self.bad)))


class Session:
    """One dataset plus a response cache, safe for concurrent readers."""

    def __init__(self, source: dict) -> None:
        self._lock = threading.Lock()
        self._cache: dict[str, tuple[bytes, str]] = {}
        self.schema = None
        self.stream = None
        self.content_hash = ""
        self.meta: dict = {}
        self._load(source)

    def _load(self, source: dict) -> None:
        schema, stream, content_hash, meta = artifacts.load_dataset(source)
        self.schema = schema
        self.stream = stream
        self.content_hash = content_hash
        self.meta = meta

    def switch(self, source: dict) -> None:
        with self._lock:
            self._load(source)
            self._cache.clear()

    def cached(self, key_obj: dict, compute: Callable[[], tuple[bytes, str]]):
        """Return (body, media_type, param_hash), computing once per key."""
        key = artifacts.sha256_text(
            artifacts.canonical_json({**key_obj, "dataset": self.content_hash})
        )
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit[0], hit[1], key
        body, media = compute()
        with self._lock:
            self._cache.setdefault(key, (body, media))
        return body, media, key


def _summary_params(p: _Params, session: Session) -> dict:
    size = p.require("size", p.int_("size", minimum=1))
    params = {
        "size": size,
        "stride": p.int_("stride", default=size, minimum=1),
        "offset": p.int_("offset", default=0, minimum=0),
        "bins": p.int_("bins", default=DEFAULT_BINS, minimum=1),
        "limit": p.int_("limit", default=None, minimum=1),
        "features": p.int_list("features", default=None),
        "classes": p.int_list("classes", default=None),
    }
    brush_text = p.raw.get("brush")
    if brush_text:
        parts = brush_text.split(":")
        try:
            feature, lo, hi = int(parts[0]), float(parts[1]), float(parts[2])
            if not 0 <= feature < session.schema.n_features or len(parts) != 3:
                raise ValueError
            params["brush"] = [feature, lo, hi]
        except (ValueError, IndexError):
            p.bad.append("brush")
    if params["features"] is not None:
        if any(not 0 <= f < session.schema.n_features for f in params["features"]):
            p.bad.append("features")
    if params["classes"] is not None:
        if any(c not in session.schema.class_ids for c in params["classes"]):
            p.bad.append("classes")
    return params


def compute_summaries_doc(session: Session, params: dict) -> dict:
    """Shared by the CLI and the API so both emit identical documents.

    ``features`` restricts the per-feature entries (ordered subset);
    ``classes`` restricts the per-class maps. Both default to everything.
    """
    spec = WindowSpec(
        size=params["size"], stride=params["stride"], offset=params["offset"]
    )
    summaries = summarize_stream(
        session.stream, spec, session.schema, params["bins"], limit=params["limit"]
    )
    brushed = None
    if params.get("brush"):
        feature, lo, hi = params["brush"]
        windows = slice_windows(session.stream, spec)
        if params["limit"] is not None:
            windows = windows[: params["limit"]]
        brushed = {
            w: brushed_counts(win, session.schema, params["bins"], feature, lo, hi)
            for w, win in enumerate(windows)
        }
    doc = artifacts.summaries_document(
        summaries, params, session.content_hash, brushed
    )
    if params.get("features") is not None:
        for window_doc in doc["windows"]:
            window_doc["per_feature"] = [
                window_doc["per_feature"][f] for f in params["features"]
            ]
    if params.get("classes") is not None:
        keep = {str(c) for c in params["classes"]}
        for window_doc in doc["windows"]:
            window_doc["count_per_class"] = {
                k: v for k, v in window_doc["count_per_class"].items() if k in keep
            }
            for feature_doc in window_doc["per_feature"]:
                feature_doc["per_class"] = {
                    k: v for k, v in feature_doc["per_class"].items() if k in keep
                }
    return doc


def create_app(session: Session) -> FastAPI:
    app = FastAPI(title="driftscope", docs_url=None, redoc_url=None)

    def json_response(body: bytes, media: str, param_hash: str) -> Response:
        return Response(
            content=body,
            media_type=media,
            headers={"X-Content-Hash": session.content_hash, "ETag": param_hash},
        )

    @app.exception_handler(ParamError)
    async def param_error_handler(_request: Request, exc: ParamError):
        return Response(
            content=artifacts.canonical_json(
                {"error": "invalid_parameters", "fields": exc.fields}
            ),
            status_code=400,
            media_type="application/json",
        )

    @app.get("/schema")
    def get_schema() -> Response:
        def compute():
            doc = {
                "format_version": artifacts.FORMAT_VERSION,
                "content_hash": session.content_hash,
                "dataset": session.meta,
                "schema": artifacts.schema_to_dict(session.schema),
            }
            return artifacts.canonical_json(doc).encode(), "application/json"

        return json_response(*session.cached({"endpoint": "schema"}, compute))

    @app.get("/summaries")
    def get_summaries(request: Request) -> Response:
        p = _Params(dict(request.query_params))
        params = _summary_params(p, session)
        p.finish()

        def compute():
            doc = compute_summaries_doc(session, params)
            return artifacts.canonical_json(doc).encode(), "application/json"

        key = {"endpoint": "summaries", **params}
        return json_response(*session.cached(key, compute))

    @app.get("/drift")
    def get_drift(request: Request) -> Response:
        p = _Params(dict(request.query_params))
        params = {
            "delta": p.float_("delta", default=DEFAULT_DELTA, lo=0.0, hi=1.0),
            "monitor": p.choice("monitor", ("marginal", "per_class"), "per_class"),
            "n_min": p.int_("n_min", default=DEFAULT_N_MIN, minimum=1),
            "max_window": p.int_("max_window", default=DEFAULT_MAX_WINDOW, minimum=2),
        }
        p.finish()

        def compute():
            report = detect_stream(session.stream, session.schema, **params)
            doc = artifacts.drift_document(report, session.content_hash)
            return artifacts.canonical_json(doc).encode(), "application/json"

        key = {"endpoint": "drift", **params}
        return json_response(*session.cached(key, compute))

    @app.get("/analysis")
    def get_analysis(request: Request) -> Response:
        p = _Params(dict(request.query_params))
        params = {
            "initial_window": p.require(
                "initial_window", p.int_("initial_window", minimum=2)
            ),
            "shrink_factor": p.float_("shrink_factor", default=0.5, lo=0.0, hi=1.0),
            "min_window": p.int_("min_window", default=250, minimum=2),
            "bins": p.int_("bins", default=DEFAULT_BINS, minimum=1),
            "drift_epsilon": p.float_("drift_epsilon", default=0.05, lo=-1.0),
        }
        p.finish()

        def compute():
            spec = WindowSpec(size=params["initial_window"])
            summaries = summarize_stream(
                session.stream, spec, session.schema, params["bins"]
            )
            reports = filter_features(
                session.schema, summaries, drift_epsilon=params["drift_epsilon"]
            )
            loc = localize(
                session.stream,
                session.schema,
                params["initial_window"],
                shrink_factor=params["shrink_factor"],
                min_window=params["min_window"],
                bins=params["bins"],
                drift_epsilon=params["drift_epsilon"],
            )
            doc = artifacts.analysis_document(
                reports, loc, params, session.content_hash
            )
            return artifacts.canonical_json(doc).encode(), "application/json"

        key = {"endpoint": "analysis", **params}
        return json_response(*session.cached(key, compute))

    @app.get("/figure.svg")
    def get_figure(request: Request) -> Response:
        p = _Params(dict(request.query_params))
        params = _summary_params(p, session)
        render_params = {
            "width": p.int_("width", default=1200, minimum=200),
            "height": p.int_("height", default=0, minimum=0),
            "show_means": p.choice("show_means", ("true", "false"), "true"),
            "drift_markers": p.int_list("drift_markers", default=()),
        }
        p.finish()

        def compute():
            spec = WindowSpec(
                size=params["size"], stride=params["stride"], offset=params["offset"]
            )
            summaries = summarize_stream(
                session.stream, spec, session.schema, params["bins"],
                limit=params["limit"],
            )
            render_spec = RenderSpec(
                width=render_params["width"],
                height=render_params["height"],
                features=params["features"],
                classes=params["classes"],
                show_means=render_params["show_means"] == "true",
                drift_markers=tuple(render_params["drift_markers"]),
            )
            return render_pht(summaries, render_spec).encode(), "image/svg+xml"

        key = {"endpoint": "figure", **params, **render_params,
               "drift_markers": list(render_params["drift_markers"])}
        return json_response(*session.cached(key, compute))

    @app.post("/session/dataset")
    async def post_dataset(request: Request) -> Response:
        try:
            source = await request.json()
        except Exception:
            return Response(
                content=artifacts.canonical_json(
                    {"error": "invalid_parameters", "fields": ["body"]}
                ),
                status_code=400,
                media_type="application/json",
            )
        try:
            session.switch(source)
        except (FileNotFoundError, KeyError) as exc:
            return Response(
                content=artifacts.canonical_json(
                    {"error": "unknown_dataset", "detail": str(exc)}
                ),
                status_code=404,
                media_type="application/json",
            )
        except (TypeError, ValueError) as exc:
            return Response(
                content=artifacts.canonical_json(
                    {"error": "invalid_parameters", "fields": ["body"],
                     "detail": str(exc)}
                ),
                status_code=400,
                media_type="application/json",
            )
        doc = {
            "format_version": artifacts.FORMAT_VERSION,
            "content_hash": session.content_hash,
            "dataset": session.meta,
        }
        return Response(
            content=artifacts.canonical_json(doc).encode(),
            media_type="application/json",
            headers={"X-Content-Hash": session.content_hash},
        )

    return app
