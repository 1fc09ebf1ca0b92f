"""Shared fixtures: the default benchmark streams are expensive to build,
so they are generated once per session."""

from __future__ import annotations

import numpy as np
import pytest

from driftscope.generators import (
    CirclesConfig,
    Sine1Config,
    generate_circles,
    generate_sine1,
)
from driftscope.histograms import summarize_stream
from driftscope.stream import Sample, StreamSchema, WindowSpec


@pytest.fixture(scope="session")
def sine1():
    """Default SINE1: 100,000 samples, reversals every 20,000, 10% noise."""
    return generate_sine1(Sine1Config())


@pytest.fixture(scope="session")
def circles():
    """Default CIRCLES: 100,000 samples, circle change every 25,000."""
    return generate_circles(CirclesConfig())


@pytest.fixture(scope="session")
def sine1_summaries_5200(sine1):
    schema, stream = sine1
    return summarize_stream(stream, WindowSpec(5200), schema)


@pytest.fixture(scope="session")
def circles_summaries_5000(circles):
    schema, stream = circles
    return summarize_stream(stream, WindowSpec(5000), schema)


def make_uniform_stream(
    n: int, n_features: int = 1, seed: int = 0, two_classes: bool = True
) -> tuple[StreamSchema, list[Sample]]:
    """Stationary uniform stream helper used across detector/analysis tests."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    xs = rng.random((n, n_features))
    labels = rng.integers(0, 2, n) if two_classes else np.zeros(n, dtype=int)
    schema = StreamSchema(
        feature_names=tuple(f"u{i}" for i in range(n_features)),
        feature_ranges=tuple((0.0, 1.0) for _ in range(n_features)),
        class_ids=(0, 1) if two_classes else (0,),
    )
    stream = [
        Sample(i, tuple(float(v) for v in row), int(lab))
        for i, (row, lab) in enumerate(zip(xs, labels))
    ]
    return schema, stream


def make_step_stream(
    n: int,
    step_at: int,
    lo: float = 0.0,
    hi: float = 1.0,
    seed: int = 0,
    noise: float = 0.0,
) -> tuple[StreamSchema, list[Sample]]:
    """One feature stepping lo -> hi at a known index, plus bounded noise."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    base = np.where(np.arange(n) < step_at, lo, hi)
    values = np.clip(base + noise * (rng.random(n) - 0.5), 0.0, 1.0)
    schema = StreamSchema(("f",), ((0.0, 1.0),), (0,))
    stream = [Sample(i, (float(v),), 0) for i, v in enumerate(values)]
    return schema, stream
