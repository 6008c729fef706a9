"""Transcoding-time estimation: neural model, linear baseline, synthetic ground truth."""

from typing import Protocol

from src.vtsim.estimator.dataset import (
    SyntheticTranscodeModel,
    as_samples,
    load_dataset,
    synthetic_dataset,
    synthetic_records,
    write_dataset,
)
from src.vtsim.estimator.features import NormalizationBounds, featurize
from src.vtsim.estimator.linear import DegenerateFitError, LinearModel, fit_linear
from src.vtsim.estimator.metrics import ErrorSummary, normalized_error, summarize_errors
from src.vtsim.estimator.network import (
    NeuralModel,
    TargetScale,
    TrainingDivergenceError,
    TrainingResult,
    predict,
    predict_many,
    train,
)
from src.vtsim.estimator.serialization import ModelFormatError, load_model, save_model
from src.vtsim.workload.models import MediaFeatures


class Estimator(Protocol):
    def estimate(self, features: MediaFeatures) -> float: ...


__all__ = [
    "DegenerateFitError",
    "ErrorSummary",
    "Estimator",
    "LinearModel",
    "ModelFormatError",
    "NeuralModel",
    "NormalizationBounds",
    "SyntheticTranscodeModel",
    "TargetScale",
    "TrainingDivergenceError",
    "TrainingResult",
    "as_samples",
    "featurize",
    "fit_linear",
    "load_dataset",
    "load_model",
    "normalized_error",
    "predict",
    "predict_many",
    "save_model",
    "summarize_errors",
    "synthetic_dataset",
    "synthetic_records",
    "train",
    "write_dataset",
]
