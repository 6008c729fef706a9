"""Estimator quality: normalized error and its summary."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.vtsim.errors import InvalidArgumentError

ERROR_BAND = 0.08


def normalized_error(predicted: float, real: float) -> float:
    """(predicted - real) / real."""
    if not real > 0:
        raise InvalidArgumentError(f"real transcoding time must be positive, got {real}")
    return (predicted - real) / real


class ErrorSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    count: int
    median_abs: float
    within_band: float
    band: float
    min: float
    max: float


def summarize_errors(errors: Sequence[float], band: float = ERROR_BAND) -> ErrorSummary:
    arr = np.asarray(errors, dtype=float)
    if arr.size == 0:
        raise InvalidArgumentError("no errors to summarize")
    return ErrorSummary(
        count=int(arr.size),
        median_abs=float(np.median(np.abs(arr))),
        within_band=float(np.mean(np.abs(arr) <= band)),
        band=band,
        min=float(arr.min()),
        max=float(arr.max()),
    )
