"""Baseline estimator: transcoding time as a linear function of source duration."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.vtsim.errors import VtsimError
from src.vtsim.workload.models import MediaFeatures


class DegenerateFitError(VtsimError, ValueError):
    """Least squares is undetermined (every duration equal)."""


@dataclass(frozen=True, slots=True)
class LinearModel:
    slope: float
    intercept: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise DegenerateFitError(f"non-finite coefficients {self.slope}, {self.intercept}")

    def predict(self, duration_s: float) -> float:
        return self.slope * duration_s + self.intercept

    def estimate(self, features: MediaFeatures) -> float:
        return max(1.0, self.predict(features.duration_s))


def fit_linear(dataset: Sequence[tuple[MediaFeatures, float]]) -> LinearModel:
    """Ordinary least squares of measured seconds on source duration."""
    durations = np.array([f.duration_s for f, _ in dataset], dtype=float)
    seconds = np.array([s for _, s in dataset], dtype=float)
    if len(np.unique(durations)) < 2:
        raise DegenerateFitError("need at least two distinct durations for a linear fit")
    design = np.column_stack([durations, np.ones_like(durations)])
    (slope, intercept), *_ = np.linalg.lstsq(design, seconds, rcond=None)
    return LinearModel(float(slope), float(intercept))


def residuals(model: LinearModel, dataset: Sequence[tuple[MediaFeatures, float]]) -> np.ndarray:
    return np.array([s - model.predict(f.duration_s) for f, s in dataset], dtype=float)
