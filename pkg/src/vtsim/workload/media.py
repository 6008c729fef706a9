"""Synthetic source/target media sampling for generated workloads and datasets."""

from collections.abc import Sequence

import numpy as np

from src.vtsim.workload.models import ServiceLevel, TraceRecord

SOURCE_SIZES: tuple[tuple[int, int], ...] = (
    (3840, 2160),
    (2560, 1440),
    (1920, 1080),
    (1280, 720),
    (854, 480),
)
# The three representations produced by the cluster
TARGET_SIZES: tuple[tuple[int, int], ...] = ((854, 480), (640, 360), (426, 240))
FRAMERATES: tuple[float, ...] = (24.0, 25.0, 30.0, 50.0, 60.0)

DURATION_RANGE_S = (60.0, 1800.0)
BITRATE_RANGE_KBPS = (500.0, 8000.0)

LEVELS = (ServiceLevel.I, ServiceLevel.II, ServiceLevel.III)


def sample_level(
    rng: np.random.Generator, weights: Sequence[float] = (1.0, 1.0, 1.0)
) -> ServiceLevel:
    p = np.asarray(weights, dtype=float)
    return LEVELS[int(rng.choice(len(LEVELS), p=p / p.sum()))]


def sample_record(
    rng: np.random.Generator,
    arrival_time_s: float = 0.0,
    level_weights: Sequence[float] = (1.0, 1.0, 1.0),
) -> TraceRecord:
    """Draw one request: uniform duration and bitrate, categorical frame sizes and rate."""
    src = SOURCE_SIZES[int(rng.integers(len(SOURCE_SIZES)))]
    dst = TARGET_SIZES[int(rng.integers(len(TARGET_SIZES)))]
    return TraceRecord.build(
        arrival_time_s=arrival_time_s,
        service_level=sample_level(rng, level_weights),
        duration_s=float(rng.uniform(*DURATION_RANGE_S)),
        bitrate_kbps=float(rng.uniform(*BITRATE_RANGE_KBPS)),
        framerate_fps=FRAMERATES[int(rng.integers(len(FRAMERATES)))],
        source_size=src,
        target_size=dst,
    )
