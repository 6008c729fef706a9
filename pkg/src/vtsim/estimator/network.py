"""
Feed-forward transcoding-time estimator: 5 inputs, one tanh hidden layer, 1 output.

Targets are min-max scaled to [0, 1] before training, either directly in seconds or
in log-seconds; the model keeps the scaling parameters and undoes them in predict().
Training is full-batch gradient descent on 0.5 * mean squared error, stopping once the
validation loss has not improved for `patience` checks.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from src.vtsim.errors import InvalidArgumentError, VtsimError
from src.vtsim.estimator.features import (
    N_FEATURES,
    NormalizationBounds,
    featurize,
    normalize,
    raw_matrix,
)
from src.vtsim.logging_config import get_logger
from src.vtsim.workload.models import MediaFeatures

logger = get_logger(__name__)

MIN_PREDICTION_S = 1.0
MIN_DATASET_SIZE = 20
DEFAULT_SPLIT = (0.70, 0.15, 0.15)

Sample = tuple[MediaFeatures, float]


class TrainingDivergenceError(VtsimError, ArithmeticError):
    """Training loss became non-finite."""


class TargetScale(str, enum.Enum):
    linear = "linear"
    log = "log"


@dataclass(frozen=True)
class NeuralModel:
    """Trained weights plus the input bounds and target scaling they were trained with."""

    w1: np.ndarray  # (5, H)
    b1: np.ndarray  # (H,)
    w2: np.ndarray  # (H, 1)
    b2: float
    bounds: NormalizationBounds
    target_lo: float
    target_hi: float
    target_scale: TargetScale = TargetScale.linear

    def __post_init__(self) -> None:
        hidden = self.w1.shape[1] if self.w1.ndim == 2 else 0
        if self.w1.shape != (N_FEATURES, hidden) or hidden < 1:
            raise InvalidArgumentError(f"w1 must be 5xH with H >= 1, got {self.w1.shape}")
        if self.b1.shape != (hidden,) or self.w2.shape != (hidden, 1):
            raise InvalidArgumentError(
                f"b1/w2 shapes {self.b1.shape}/{self.w2.shape} do not match H={hidden}"
            )
        params = (self.w1, self.b1, self.w2, np.asarray([self.b2]))
        if not all(np.all(np.isfinite(p)) for p in params):
            raise InvalidArgumentError("model weights must be finite")
        if not self.target_hi > self.target_lo:
            raise InvalidArgumentError("target range must be non-empty")

    @property
    def hidden_size(self) -> int:
        return self.w1.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": np.asarray([self.b2])}

    def estimate(self, features: MediaFeatures) -> float:
        return predict(self, featurize(features, self.bounds))


def _denormalize(y: np.ndarray, lo: float, hi: float, scale: TargetScale) -> np.ndarray:
    value = lo + y * (hi - lo)
    if scale is TargetScale.log:
        value = np.exp(np.minimum(value, 700.0))
    return np.maximum(value, MIN_PREDICTION_S)


def forward(params: dict[str, np.ndarray], x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized output and hidden activations for a (n, 5) batch."""
    hidden = np.tanh(x @ params["w1"] + params["b1"])
    return (hidden @ params["w2"]).ravel() + params["b2"][0], hidden


def predict(model: NeuralModel, x: np.ndarray) -> float:
    """Transcoding seconds for one feature vector, floored at 1 s."""
    y, _ = forward(model.params(), np.asarray(x, dtype=float).reshape(1, N_FEATURES))
    return float(_denormalize(y, model.target_lo, model.target_hi, model.target_scale)[0])


def predict_many(model: NeuralModel, features: Sequence[MediaFeatures]) -> np.ndarray:
    x = normalize(raw_matrix(features), model.bounds)
    y, _ = forward(model.params(), x)
    return _denormalize(y, model.target_lo, model.target_hi, model.target_scale)


def loss_and_gradients(
    params: dict[str, np.ndarray], x: np.ndarray, y: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """0.5 * mean squared error on normalized targets and its gradient for every tensor."""
    pred, hidden = forward(params, x)
    n = len(y)
    err = pred - y
    loss = 0.5 * float(np.mean(err**2))

    d_out = (err / n).reshape(-1, 1)
    grads = {
        "w2": hidden.T @ d_out,
        "b2": np.asarray([d_out.sum()]),
    }
    d_hidden = (d_out @ params["w2"].T) * (1.0 - hidden**2)
    grads["w1"] = x.T @ d_hidden
    grads["b1"] = d_hidden.sum(axis=0)
    return loss, grads


def numerical_gradient(
    params: dict[str, np.ndarray], x: np.ndarray, y: np.ndarray, name: str, index: tuple, h=1e-6
) -> float:
    """Central finite difference of the loss along one parameter coordinate."""
    tensor = params[name]
    original = tensor[index]
    tensor[index] = original + h
    plus, _ = loss_and_gradients(params, x, y)
    tensor[index] = original - h
    minus, _ = loss_and_gradients(params, x, y)
    tensor[index] = original
    return (plus - minus) / (2 * h)


@dataclass
class TrainingResult:
    model: NeuralModel
    train_indices: np.ndarray
    validation_indices: np.ndarray
    test_indices: np.ndarray
    iterations: int
    best_validation_loss: float
    history: list[tuple[int, float, float]] = field(default_factory=list)


def split_indices(
    n: int, split: Sequence[float], rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shuffle 0..n-1 into disjoint train/validation/test parts covering every index."""
    if len(split) != 3 or any(f < 0 for f in split) or not math.isclose(sum(split), 1.0):
        raise InvalidArgumentError(
            f"split fractions must be three non-negatives summing to 1: {split}"
        )
    order = rng.permutation(n)
    n_train = int(round(split[0] * n))
    n_val = int(round(split[1] * n))
    if n_train < 1 or n_val < 1 or n_train + n_val >= n:
        raise InvalidArgumentError(f"split {split} leaves an empty partition for n={n}")
    return order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:]


def _scaled_targets(seconds: np.ndarray, scale: TargetScale) -> np.ndarray:
    return np.log(seconds) if scale is TargetScale.log else seconds


def train(
    dataset: Sequence[Sample],
    split: Sequence[float] = DEFAULT_SPLIT,
    hidden: int = 20,
    rng_seed: int = 0,
    *,
    learning_rate: float = 0.2,
    max_iterations: int = 40_000,
    check_every: int = 10,
    patience: int = 50,
    target_scale: TargetScale = TargetScale.log,
) -> TrainingResult:
    """Fit the network on the training split; the returned weights are the best on validation."""
    if len(dataset) < MIN_DATASET_SIZE:
        raise InvalidArgumentError(
            f"need at least {MIN_DATASET_SIZE} samples to train, got {len(dataset)}"
        )
    if hidden < 1:
        raise InvalidArgumentError(f"hidden size must be >= 1, got {hidden}")
    seconds = np.array([s for _, s in dataset], dtype=float)
    if np.any(seconds <= 0):
        raise InvalidArgumentError("measured transcoding times must be positive")

    rng = np.random.default_rng(rng_seed)
    train_idx, val_idx, test_idx = split_indices(len(dataset), split, rng)

    features = [f for f, _ in dataset]
    bounds = NormalizationBounds.fit([features[i] for i in train_idx])
    x_all = normalize(raw_matrix(features), bounds)

    targets = _scaled_targets(seconds, target_scale)
    lo = float(targets[train_idx].min())
    hi = float(targets[train_idx].max())
    if not hi > lo:
        hi = lo + 1.0
    y_all = (targets - lo) / (hi - lo)

    x_tr, y_tr = x_all[train_idx], y_all[train_idx]
    x_va, y_va = x_all[val_idx], y_all[val_idx]

    params = {
        "w1": rng.normal(0.0, 1.0 / math.sqrt(N_FEATURES), size=(N_FEATURES, hidden)),
        "b1": np.zeros(hidden),
        "w2": rng.normal(0.0, 1.0 / math.sqrt(hidden), size=(hidden, 1)),
        "b2": np.asarray([float(y_tr.mean())]),
    }
    best = {k: v.copy() for k, v in params.items()}
    best_val = loss_and_gradients(params, x_va, y_va)[0]
    stale = 0
    improved = False
    history: list[tuple[int, float, float]] = []
    iteration = 0

    for iteration in range(1, max_iterations + 1):
        loss, grads = loss_and_gradients(params, x_tr, y_tr)
        if not math.isfinite(loss):
            logger.warning(f"Training diverged at iteration {iteration}")
            raise TrainingDivergenceError(f"training loss is {loss} at iteration {iteration}")
        for name, g in grads.items():
            params[name] -= learning_rate * g

        if iteration % check_every:
            continue
        val_loss = loss_and_gradients(params, x_va, y_va)[0]
        history.append((iteration, loss, val_loss))
        if val_loss < best_val:
            best_val = val_loss
            improved = True
            best = {k: v.copy() for k, v in params.items()}
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                logger.info(f"Early stop at iteration {iteration}, best val loss {best_val:.3e}")
                break

    if not improved:
        logger.warning("Validation loss never improved during training")

    model = NeuralModel(
        w1=best["w1"],
        b1=best["b1"],
        w2=best["w2"],
        b2=float(best["b2"][0]),
        bounds=bounds,
        target_lo=lo,
        target_hi=hi,
        target_scale=target_scale,
    )
    return TrainingResult(
        model=model,
        train_indices=train_idx,
        validation_indices=val_idx,
        test_indices=test_idx,
        iterations=iteration,
        best_validation_loss=best_val,
        history=history,
    )
