"""
Synthetic transcoding-time ground truth and the estimator dataset CSV.

The dataset file is a trace CSV with one extra column, `measured_s`.
"""

from __future__ import annotations

import csv
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveFloat

from src.vtsim.estimator.network import Sample
from src.vtsim.logging_config import get_logger
from src.vtsim.workload.media import sample_record
from src.vtsim.workload.models import MediaFeatures, TraceRecord
from src.vtsim.workload.trace import (
    TRACE_COLUMNS,
    TraceParseError,
    parse_record,
    read_rows,
    record_to_row,
)

logger = get_logger(__name__)

MEASURED_COLUMN = "measured_s"


class SyntheticTranscodeModel(BaseModel):
    """
    seconds = duration * (c1 + c2 * (target_px / source_px) ** pixel_exponent)
              * (bitrate / bitrate_ref) ** bitrate_exponent

    Also serves as an exact estimator when the simulation should not carry estimation error.
    """

    model_config = ConfigDict(frozen=True)

    c1: PositiveFloat = 0.4
    c2: PositiveFloat = 1.6
    pixel_exponent: float = 0.8
    bitrate_ref_kbps: PositiveFloat = 1000.0
    bitrate_exponent: float = 0.2
    noise: float = 0.05

    def true_seconds(self, features: MediaFeatures) -> float:
        ratio = features.target_pixels / features.source_pixels
        return (
            features.duration_s
            * (self.c1 + self.c2 * ratio**self.pixel_exponent)
            * (features.bitrate_kbps / self.bitrate_ref_kbps) ** self.bitrate_exponent
        )

    def measure(self, features: MediaFeatures, rng: np.random.Generator) -> float:
        """One noisy measurement; the multiplicative factor is clipped to stay positive."""
        factor = max(0.05, 1.0 + self.noise * float(rng.standard_normal()))
        return self.true_seconds(features) * factor

    def estimate(self, features: MediaFeatures) -> float:
        return max(1.0, self.true_seconds(features))


def synthetic_records(
    n: int, seed: int, model: SyntheticTranscodeModel | None = None
) -> list[tuple[TraceRecord, float]]:
    model = model or SyntheticTranscodeModel()
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        record = sample_record(rng)
        out.append((record, model.measure(record.features, rng)))
    return out


def synthetic_dataset(
    n: int, seed: int, model: SyntheticTranscodeModel | None = None
) -> list[Sample]:
    return as_samples(synthetic_records(n, seed, model))


def as_samples(rows: Sequence[tuple[TraceRecord, float]]) -> list[Sample]:
    return [(record.features, seconds) for record, seconds in rows]


def write_dataset(rows: Sequence[tuple[TraceRecord, float]], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow((*TRACE_COLUMNS, MEASURED_COLUMN))
        for record, seconds in rows:
            writer.writerow([*record_to_row(record), repr(seconds)])
    logger.info(f"Wrote {len(rows)} dataset rows to {path}")
    return path


def load_dataset(path: str | Path) -> list[tuple[TraceRecord, float]]:
    rows = []
    for row_no, row in read_rows(path, extra_columns=(MEASURED_COLUMN,)):
        record = parse_record(row, row_no)
        raw = row.get(MEASURED_COLUMN)
        try:
            seconds = float(raw)
        except (TypeError, ValueError):
            raise TraceParseError(f"{MEASURED_COLUMN}={raw!r} is not a number", row_no) from None
        if not seconds > 0:
            raise TraceParseError(f"{MEASURED_COLUMN} must be positive, got {seconds}", row_no)
        rows.append((record, seconds))
    return rows
