"""
Experiment configuration: flat `section.key=value` lines.

    # 30-minute epochs, shorter blocks
    sim.epoch_seconds=1800
    sim.block_seconds=90
    pricing.vm_price_per_hour=0.252
    experiment.policies=LRP-VBS,FP(10),ARP(30)

Blank lines and `#` comments are ignored. List values are comma separated; an empty
value clears an optional setting. Every key absent from the file takes its default, and
render_config() writes the complete set back out.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.vtsim.config import Settings
from src.vtsim.engine.config import SimConfig
from src.vtsim.errors import InvalidArgumentError, VtsimError
from src.vtsim.estimator.network import DEFAULT_SPLIT, TargetScale
from src.vtsim.provisioner.policies import ProvisionerSpec
from src.vtsim.provisioner.qlearning import QLearningConfig
from src.vtsim.scheduler.policies import SchedulerKind

DEFAULT_POLICIES = ("LRP-VBS", "LRP-HVF", "FP(10)", "FP(15)", "ARP(30)")


class ConfigError(VtsimError, ValueError):
    """Bad configuration; carries the offending key and 1-based line when known."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None) -> None:
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(key)
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class EstimatorSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    samples: int = Field(default=2000, ge=20)
    hidden: int = Field(default=20, ge=1)
    learning_rate: float = Field(default=0.2, gt=0.0)
    max_iterations: int = Field(default=40_000, ge=1)
    patience: int = Field(default=50, ge=1)
    target_scale: TargetScale = TargetScale.log
    split: tuple[float, float, float] = DEFAULT_SPLIT
    noise: float = Field(default=0.05, ge=0.0)
    seed: int = Field(default=11, ge=0)


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sim: SimConfig = SimConfig()
    qlearning: QLearningConfig = QLearningConfig()
    training_loops: int = Field(default=12_000, ge=0)
    estimator: EstimatorSettings = EstimatorSettings()
    policies: tuple[str, ...] = Field(default=DEFAULT_POLICIES, min_length=1)
    replications: int = Field(default=10, ge=1)
    output_dir: str = "out"

    @field_validator("policies")
    @classmethod
    def known_policies(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        for name in v:
            parse_policy_name(name)
        if len(set(v)) != len(v):
            raise ValueError("policy names must be unique")
        return v


@dataclass(frozen=True, slots=True)
class PolicyChoice:
    label: str
    provisioner: ProvisionerSpec
    scheduler: SchedulerKind


_POLICY_NAME = re.compile(r"^(?P<provisioner>[A-Z]+(?:\([^()]*\))?)(?:-(?P<scheduler>VBS|HVF))?$")


def parse_policy_name(name: str) -> PolicyChoice:
    """`LRP-VBS`, `LRP-HVF`, `FP(10)`, `ARP(30)-HVF`; the scheduler defaults to VBS."""
    label = name.strip()
    match = _POLICY_NAME.match(label)
    if match is None:
        raise InvalidArgumentError(f"unknown policy {name!r}")
    scheduler = SchedulerKind(match.group("scheduler") or SchedulerKind.VBS.value)
    return PolicyChoice(label, ProvisionerSpec.parse(match.group("provisioner")), scheduler)


@dataclass(frozen=True, slots=True)
class ConfigKey:
    key: str
    path: tuple[str, ...]
    is_list: bool = False
    optional: bool = False


def _keys(section: str, prefix: tuple[str, ...], names: Iterable[str], **kw) -> list[ConfigKey]:
    return [ConfigKey(f"{section}.{n}", (*prefix, n), **kw) for n in names]


CONFIG_KEYS: tuple[ConfigKey, ...] = (
    *_keys(
        "sim",
        ("sim",),
        (
            "slot_seconds",
            "epoch_seconds",
            "block_seconds",
            "horizon_epochs",
            "initial_workers",
            "seed",
            "scheduler",
            "provisioner",
        ),
    ),
    *_keys(
        "pricing",
        ("sim", "pricing"),
        (
            "alpha_per_s",
            "price_level_1_per_min",
            "price_level_2_per_min",
            "price_level_3_per_min",
            "vm_price_per_hour",
        ),
    ),
    ConfigKey("valuation.kind", ("sim", "valuation")),
    ConfigKey("valuation.step_deadline_factor", ("sim", "step_deadline_factor")),
    ConfigKey("arrival.mode", ("sim", "arrival", "mode")),
    ConfigKey("arrival.rates_per_min", ("sim", "arrival", "rates_per_min"), is_list=True),
    *_keys("arrival", ("sim", "arrival"), ("rate_min_per_min", "rate_max_per_min")),
    ConfigKey("arrival.trace_path", ("sim", "arrival", "trace_path"), optional=True),
    ConfigKey("arrival.trace_period_s", ("sim", "arrival", "trace_period_s"), optional=True),
    ConfigKey("workload.level_weights", ("sim", "arrival", "level_weights"), is_list=True),
    ConfigKey("estimator.path", ("sim", "estimator_path"), optional=True),
    *_keys(
        "estimator",
        ("estimator",),
        ("samples", "hidden", "learning_rate", "max_iterations", "patience", "target_scale"),
    ),
    ConfigKey("estimator.split", ("estimator", "split"), is_list=True),
    *_keys("estimator", ("estimator",), ("noise", "seed")),
    *_keys(
        "provisioner",
        ("qlearning",),
        (
            "action_radius",
            "initial_value",
            "gamma",
            "learning_rate_exponent",
            "epsilon_start",
            "epsilon_end",
            "epsilon_decay_steps",
        ),
    ),
    ConfigKey("provisioner.omega_edges", ("sim", "bins", "omega_edges"), is_list=True),
    ConfigKey("provisioner.lambda_edges", ("sim", "bins", "lambda_edges"), is_list=True),
    ConfigKey("provisioner.m_max", ("sim", "bins", "m_max")),
    ConfigKey("provisioner.training_loops", ("training_loops",)),
    ConfigKey("experiment.policies", ("policies",), is_list=True),
    *_keys("experiment", (), ("replications", "output_dir")),
)

_BY_KEY = {k.key: k for k in CONFIG_KEYS}


def _raw_value(spec: ConfigKey, text: str) -> Any:
    text = text.strip()
    if spec.optional and text == "":
        return None
    if spec.is_list:
        return [] if text == "" else [item.strip() for item in text.split(",")]
    return text


def _set_path(tree: dict, path: tuple[str, ...], value: Any) -> None:
    node = tree
    for part in path[:-1]:
        node = node.setdefault(part, {})
    node[path[-1]] = value


def _key_for_location(loc: tuple, seen: dict[str, int]) -> str | None:
    """Best config key for a validation error location: exact path, else any key under it."""
    path = tuple(str(p) for p in loc if not isinstance(p, int))
    while path:
        for spec in CONFIG_KEYS:
            if spec.path == path:
                return spec.key
        under = [s.key for s in CONFIG_KEYS if s.path[: len(path)] == path and s.key in seen]
        if under:
            return min(under, key=lambda k: seen[k])
        path = path[:-1]
    return None


def parse_config_text(text: str) -> ExperimentSpec:
    tree: dict = {}
    seen: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("expected key=value", line=line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        spec = _BY_KEY.get(key)
        if spec is None:
            raise ConfigError("unknown key", key=key, line=line_no)
        if key in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[key]})", key, line_no)
        seen[key] = line_no
        _set_path(tree, spec.path, _raw_value(spec, value))

    try:
        return ExperimentSpec.model_validate(tree)
    except ValidationError as e:
        first = e.errors()[0]
        key = _key_for_location(first["loc"], seen)
        raise ConfigError(first["msg"], key=key, line=seen.get(key)) from None


def parse_config(path: str | Path) -> ExperimentSpec:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"))


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, ProvisionerSpec):
        return value.name
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(_format(v) for v in value)
    return str(value)


def _get_path(spec: ExperimentSpec, path: tuple[str, ...]) -> Any:
    node: Any = spec
    for part in path:
        node = getattr(node, part)
    return node


def render_config(spec: ExperimentSpec) -> str:
    """Every key with its current value, grouped by section."""
    lines = ["# vtsim experiment configuration"]
    section = None
    for key in CONFIG_KEYS:
        current = key.key.split(".", 1)[0]
        if current != section:
            lines.append("")
            section = current
        lines.append(f"{key.key}={_format(_get_path(spec, key.path))}")
    return "\n".join(lines) + "\n"


def with_overrides(
    spec: ExperimentSpec,
    settings: Settings,
    seed: int | None = None,
    output_dir: str | None = None,
) -> ExperimentSpec:
    """--seed / --out win over the file; the file wins over process settings."""
    if seed is None and "seed" not in spec.sim.model_fields_set:
        seed = settings.default_seed
    if output_dir is None and "output_dir" not in spec.model_fields_set:
        output_dir = settings.output_dir
    if seed is not None:
        if seed < 0:
            raise ConfigError(f"seed must be >= 0, got {seed}", key="sim.seed")
        spec = spec.model_copy(update={"sim": spec.sim.model_copy(update={"seed": seed})})
    if output_dir is not None:
        spec = spec.model_copy(update={"output_dir": output_dir})
    return spec
