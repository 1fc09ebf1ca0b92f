"""Deterministic synthetic stream generators with abrupt drift schedules.

Both generators draw from a counter-based Philox PRNG so that a config is
reproducible bit-for-bit; the algorithm name travels with the emitted
metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stream import Sample, StreamSchema

__all__ = [
    "RNG_ALGORITHM",
    "Sine1Config",
    "CirclesConfig",
    "generate_sine1",
    "generate_circles",
    "true_drift_points",
]

RNG_ALGORITHM = "philox4x64"

# Concept schedule used when none is given: center drifts rightwards while
# the radius grows. Conventional benchmark values, configurable.
DEFAULT_CIRCLE_SCHEDULE: tuple[tuple[float, float, float], ...] = (
    (0.2, 0.5, 0.15),
    (0.4, 0.5, 0.2),
    (0.6, 0.5, 0.25),
    (0.8, 0.5, 0.3),
)

DEFAULT_SEED = 42


@dataclass(frozen=True, slots=True)
class Sine1Config:
    """SINE1: two uniform features, label 1 iff x_b < sin(x_a), with the
    labeling reversed at every multiple of ``drift_period`` and each label
    independently flipped with probability ``noise_rate``."""

    n_samples: int = 100_000
    drift_period: int = 20_000
    noise_rate: float = 0.10
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.n_samples < 1 or self.drift_period < 1:
            raise ValueError("n_samples and drift_period must be positive")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError(f"noise_rate must be in [0, 1], got {self.noise_rate}")


@dataclass(frozen=True)
class CirclesConfig:
    """CIRCLES: two uniform features on [0,1]^2, label 1 inside the active
    circle; segment k uses circle_schedule[k mod len(schedule)]."""

    n_samples: int = 100_000
    drift_period: int = 25_000
    circle_schedule: tuple[tuple[float, float, float], ...] = DEFAULT_CIRCLE_SCHEDULE
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.n_samples < 1 or self.drift_period < 1:
            raise ValueError("n_samples and drift_period must be positive")
        if not self.circle_schedule:
            raise ValueError("circle_schedule must be non-empty")
        for cx, cy, r in self.circle_schedule:
            if not (0.0 <= cx <= 1.0 and 0.0 <= cy <= 1.0 and r > 0.0):
                raise ValueError(f"circle ({cx}, {cy}, {r}) outside the unit square")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _to_samples(xs: np.ndarray, labels: np.ndarray) -> list[Sample]:
    feats = [tuple(row) for row in xs.tolist()]
    labs = labels.astype(int).tolist()
    return [Sample(i, f, l) for i, (f, l) in enumerate(zip(feats, labs))]


def generate_sine1(config: Sine1Config) -> tuple[StreamSchema, list[Sample]]:
    """Generate a SINE1 stream, fully determined by ``config.seed``.

    Segment 0 labels a point 1 when x_b < sin(x_a) (radians); every
    subsequent segment reverses the labeling of the previous one. Noise is
    an independent label flip with probability ``noise_rate``.
    """
    n = config.n_samples
    rng = _rng(config.seed)
    xs = rng.random((n, 2))
    clean = xs[:, 1] < np.sin(xs[:, 0])
    segment = np.arange(n) // config.drift_period
    labels = clean ^ (segment % 2 == 1)
    if config.noise_rate > 0.0:
        labels = labels ^ (rng.random(n) < config.noise_rate)
    schema = StreamSchema(
        feature_names=("x_a", "x_b"),
        feature_ranges=((0.0, 1.0), (0.0, 1.0)),
        class_ids=(0, 1),
    )
    return schema, _to_samples(xs, labels)


def generate_circles(config: CirclesConfig) -> tuple[StreamSchema, list[Sample]]:
    """Generate a CIRCLES stream, fully determined by ``config.seed``."""
    n = config.n_samples
    rng = _rng(config.seed)
    xs = rng.random((n, 2))
    schedule = config.circle_schedule
    segment = (np.arange(n) // config.drift_period) % len(schedule)
    cx = np.array([c[0] for c in schedule])[segment]
    cy = np.array([c[1] for c in schedule])[segment]
    rr = np.array([c[2] for c in schedule])[segment]
    labels = (xs[:, 0] - cx) ** 2 + (xs[:, 1] - cy) ** 2 < rr**2
    schema = StreamSchema(
        feature_names=("x", "y"),
        feature_ranges=((0.0, 1.0), (0.0, 1.0)),
        class_ids=(0, 1),
    )
    return schema, _to_samples(xs, labels)


def true_drift_points(config: Sine1Config | CirclesConfig) -> list[int]:
    """Indices where the generating concept actually changes.

    These are the multiples of ``drift_period`` interior to the stream. For
    CIRCLES a boundary where the cyclic schedule hands over an identical
    circle is not a drift.
    """
    points = []
    for k in range(1, math.ceil(config.n_samples / config.drift_period)):
        boundary = k * config.drift_period
        if boundary >= config.n_samples:
            break
        if isinstance(config, CirclesConfig):
            sched = config.circle_schedule
            if sched[k % len(sched)] == sched[(k - 1) % len(sched)]:
                continue
        points.append(boundary)
    return points
