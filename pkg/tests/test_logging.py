import json
import logging

import pytest

from src.vtsim.config import Settings
from src.vtsim.logging_config import (
    JsonLineFormatter,
    TextFormatter,
    run_logger,
    setup_logging,
)


def _record(**fields) -> logging.LogRecord:
    record = logging.LogRecord(
        "src.vtsim.engine", logging.INFO, __file__, 1, "epoch done", None, None
    )
    for k, v in fields.items():
        setattr(record, k, v)
    return record


@pytest.fixture
def root_logger():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield root
    root.handlers[:] = handlers
    root.setLevel(level)


def test_json_line_carries_run_fields():
    line = json.loads(JsonLineFormatter().format(_record(policy="FP(10)-VBS", seed=8)))
    assert line["msg"] == "epoch done"
    assert line["level"] == "INFO"
    assert line["policy"] == "FP(10)-VBS" and line["seed"] == 8
    assert "epoch" not in line


def test_text_line_appends_context_tags():
    text = TextFormatter().format(_record(policy="LRP-HVF", epoch=3))
    assert text.endswith("src.vtsim.engine: epoch done [policy=LRP-HVF epoch=3]")
    assert TextFormatter().format(_record()).endswith("epoch done")


def test_run_logger_attaches_fields(caplog):
    caplog.set_level(logging.INFO)
    run_logger(logging.getLogger("vtsim.test"), policy="ARP(30)", seed=2).info("hello")
    (record,) = caplog.records
    assert record.policy == "ARP(30)" and record.seed == 2


def test_run_logger_rejects_unknown_fields():
    with pytest.raises(ValueError):
        run_logger(logging.getLogger("vtsim.test"), worker=1)


@pytest.mark.parametrize(
    ("app_env", "level", "formatter", "expected_level"),
    [
        ("production", "WARNING", JsonLineFormatter, logging.WARNING),
        ("local", "debug", TextFormatter, logging.DEBUG),
        ("local", "chatty", TextFormatter, logging.INFO),
    ],
)
def test_setup_logging(root_logger, app_env, level, formatter, expected_level):
    setup_logging(Settings(app_env=app_env, log_level=level))
    (handler,) = root_logger.handlers
    assert isinstance(handler.formatter, formatter)
    assert root_logger.level == expected_level
