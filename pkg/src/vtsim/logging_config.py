"""
Logging for simulation runs.

Records may carry run context (policy, seed, epoch), attached through `run_logger`.
Production writes one JSON object per line with those fields as keys; everywhere else
the context is appended to a readable line as `[policy=FP(10)-VBS seed=8]`.
"""

import json
import logging
import sys
from collections.abc import Mapping
from datetime import datetime, timezone
from typing import Any

from src.vtsim.config import Settings, get_settings

RUN_FIELDS = ("policy", "seed", "epoch")

TEXT_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def run_context(record: logging.LogRecord) -> dict[str, Any]:
    return {f: getattr(record, f) for f in RUN_FIELDS if hasattr(record, f)}


def _level_names() -> dict[str, int]:
    # logging.getLevelNamesMapping is 3.11+; same mapping on older interpreters.
    if hasattr(logging, "getLevelNamesMapping"):
        return logging.getLevelNamesMapping()
    return dict(logging._nameToLevel)


class JsonLineFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        line: dict[str, Any] = {
            "ts": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "msg": record.getMessage(),
            **run_context(record),
        }
        if record.exc_info:
            line["exc"] = self.formatException(record.exc_info)
        return json.dumps(line, default=str, ensure_ascii=False)


class TextFormatter(logging.Formatter):
    def __init__(self) -> None:
        super().__init__(TEXT_FORMAT, datefmt="%H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        context = run_context(record)
        if not context:
            return text
        tags = " ".join(f"{k}={v}" for k, v in context.items())
        head, sep, tail = text.partition("\n")
        return f"{head} [{tags}]{sep}{tail}"


def run_logger(logger: logging.Logger, **fields: Any) -> logging.LoggerAdapter:
    """Logger whose records carry the given run fields (policy, seed, epoch)."""
    unknown = set(fields) - set(RUN_FIELDS)
    if unknown:
        raise ValueError(f"unknown run fields: {sorted(unknown)}")
    return _RunAdapter(logger, fields)


class _RunAdapter(logging.LoggerAdapter):
    def process(self, msg: Any, kwargs: Mapping[str, Any]) -> tuple[Any, dict[str, Any]]:
        kwargs = dict(kwargs)
        kwargs["extra"] = {**self.extra, **kwargs.get("extra", {})}
        return msg, kwargs


def setup_logging(settings: Settings | None = None) -> None:
    """Route everything to stderr; simulation outputs go to files, never to the log."""
    settings = settings or get_settings()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLineFormatter() if settings.is_production else TextFormatter())

    root = logging.getLogger()
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(_level_names().get(settings.log_level, logging.INFO))


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)
