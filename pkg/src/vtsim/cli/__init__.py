"""Experiment configuration, orchestration and report emission."""

from src.vtsim.cli.config_file import (
    ConfigError,
    ExperimentSpec,
    PolicyChoice,
    parse_config,
    parse_config_text,
    parse_policy_name,
    render_config,
)
from src.vtsim.cli.experiment import PolicyResult, comparison_table, run_experiment
from src.vtsim.cli.reports import emit_report

__all__ = [
    "ConfigError",
    "ExperimentSpec",
    "PolicyChoice",
    "PolicyResult",
    "comparison_table",
    "emit_report",
    "parse_config",
    "parse_config_text",
    "parse_policy_name",
    "render_config",
    "run_experiment",
]
