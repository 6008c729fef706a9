"""Min-max feature scaling for the transcoding-time network."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.vtsim.workload.models import MediaFeatures

FEATURE_NAMES = ("duration_s", "bitrate_kbps", "framerate_fps", "source_pixels", "target_pixels")
N_FEATURES = len(FEATURE_NAMES)


class NormalizationBounds(BaseModel):
    """Per-feature (min, max) taken from the training split."""

    model_config = ConfigDict(frozen=True)

    mins: tuple[float, ...] = Field(min_length=N_FEATURES, max_length=N_FEATURES)
    maxs: tuple[float, ...] = Field(min_length=N_FEATURES, max_length=N_FEATURES)

    @model_validator(mode="after")
    def check_order(self) -> NormalizationBounds:
        for name, lo, hi in zip(FEATURE_NAMES, self.mins, self.maxs):
            if not lo < hi:
                raise ValueError(f"{name}: min {lo} must be below max {hi}")
        return self

    @classmethod
    def fit(cls, features: Sequence[MediaFeatures]) -> NormalizationBounds:
        raw = raw_matrix(features)
        mins = raw.min(axis=0)
        maxs = raw.max(axis=0)
        # a constant column still needs a non-empty range
        maxs = np.where(maxs > mins, maxs, mins + 1.0)
        return cls(mins=tuple(mins.tolist()), maxs=tuple(maxs.tolist()))


def raw_matrix(features: Sequence[MediaFeatures]) -> np.ndarray:
    return np.array([f.as_tuple() for f in features], dtype=float).reshape(-1, N_FEATURES)


def normalize(raw: np.ndarray, bounds: NormalizationBounds) -> np.ndarray:
    lo = np.asarray(bounds.mins)
    hi = np.asarray(bounds.maxs)
    return np.clip((raw - lo) / (hi - lo), 0.0, 1.0)


def featurize(features: MediaFeatures, bounds: NormalizationBounds) -> np.ndarray:
    """Length-5 vector in [0, 1]; values outside the training range are clamped."""
    return normalize(np.asarray(features.as_tuple(), dtype=float), bounds)
