"""
Flat text format for a trained NeuralModel.

One line per tensor: `<name> <shape> <values...>` with shape written as `5x20` (or `20`
for vectors) and values in row-major order. Blank lines and `#` comments are skipped.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from src.vtsim.errors import VtsimError
from src.vtsim.estimator.features import NormalizationBounds
from src.vtsim.estimator.network import NeuralModel, TargetScale
from src.vtsim.logging_config import get_logger

logger = get_logger(__name__)

TENSORS = ("w1", "b1", "w2", "b2", "bounds_min", "bounds_max", "target_range", "log_target")


class ModelFormatError(VtsimError, ValueError):
    """Model file is missing tensors or has malformed lines."""


def _line(name: str, values: np.ndarray) -> str:
    arr = np.asarray(values, dtype=float)
    shape = "x".join(str(d) for d in arr.shape) or "1"
    return " ".join([name, shape, *(repr(float(v)) for v in arr.ravel())])


def dumps_model(model: NeuralModel) -> str:
    lines = [
        f"# vtsim estimator, hidden={model.hidden_size}",
        _line("w1", model.w1),
        _line("b1", model.b1),
        _line("w2", model.w2),
        _line("b2", np.asarray([model.b2])),
        _line("bounds_min", np.asarray(model.bounds.mins)),
        _line("bounds_max", np.asarray(model.bounds.maxs)),
        _line("target_range", np.asarray([model.target_lo, model.target_hi])),
        _line("log_target", np.asarray([1.0 if model.target_scale is TargetScale.log else 0.0])),
    ]
    return "\n".join(lines) + "\n"


def save_model(model: NeuralModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_model(model), encoding="utf-8")
    logger.info(f"Saved estimator (H={model.hidden_size}) to {path}")
    return path


def _parse_line(line: str, line_no: int) -> tuple[str, np.ndarray]:
    parts = line.split()
    if len(parts) < 3:
        raise ModelFormatError(f"line {line_no}: expected '<name> <shape> <values...>'")
    name, shape_raw, raw_values = parts[0], parts[1], parts[2:]
    try:
        shape = tuple(int(d) for d in shape_raw.split("x"))
        values = np.array([float(v) for v in raw_values], dtype=float)
    except ValueError:
        raise ModelFormatError(f"line {line_no}: bad shape or value in {name}") from None
    if math.prod(shape) != values.size:
        raise ModelFormatError(
            f"line {line_no}: {name} has {values.size} values for shape {shape_raw}"
        )
    return name, values.reshape(shape)


def loads_model(text: str) -> NeuralModel:
    tensors: dict[str, np.ndarray] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, values = _parse_line(line, line_no)
        if name not in TENSORS:
            raise ModelFormatError(f"line {line_no}: unknown tensor {name!r}")
        if name in tensors:
            raise ModelFormatError(f"line {line_no}: duplicate tensor {name!r}")
        tensors[name] = values
    missing = [n for n in TENSORS if n not in tensors]
    if missing:
        raise ModelFormatError(f"missing tensors: {', '.join(missing)}")

    try:
        w2 = tensors["w2"]
        return NeuralModel(
            w1=tensors["w1"],
            b1=tensors["b1"].ravel(),
            w2=w2.reshape(-1, 1),
            b2=float(tensors["b2"].ravel()[0]),
            bounds=NormalizationBounds(
                mins=tuple(tensors["bounds_min"].ravel().tolist()),
                maxs=tuple(tensors["bounds_max"].ravel().tolist()),
            ),
            target_lo=float(tensors["target_range"].ravel()[0]),
            target_hi=float(tensors["target_range"].ravel()[-1]),
            target_scale=(
                TargetScale.log if tensors["log_target"].ravel()[0] else TargetScale.linear
            ),
        )
    except (ValueError, IndexError) as e:
        raise ModelFormatError(f"inconsistent model tensors: {e}") from None


def load_model(path: str | Path) -> NeuralModel:
    path = Path(path)
    if not path.exists():
        raise ModelFormatError(f"model file not found: {path}")
    return loads_model(path.read_text(encoding="utf-8"))
