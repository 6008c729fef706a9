"""
Provisioning policies: the learned greedy readout and the FP / ARP baselines.

Every policy maps an observation taken at an epoch boundary to a worker-count delta.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Protocol

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.vtsim.errors import InvalidArgumentError
from src.vtsim.provisioner.qlearning import QTable
from src.vtsim.provisioner.state import CompactState


@dataclass(frozen=True, slots=True)
class ProvisioningObservation:
    m_prev: int
    arrival_rate_per_min: float
    state: CompactState


class ProvisioningPolicy(Protocol):
    name: str

    def decide(self, obs: ProvisioningObservation) -> int: ...


@dataclass(frozen=True)
class FixedPolicy:
    m_fixed: int

    @property
    def name(self) -> str:
        return f"FP({self.m_fixed})"

    def decide(self, obs: ProvisioningObservation) -> int:
        return self.m_fixed - obs.m_prev


@dataclass(frozen=True)
class ArrivalRatePolicy:
    """Target round(coefficient * lambda) workers, lambda in tasks per minute."""

    coefficient: float

    @property
    def name(self) -> str:
        return f"ARP({_number(self.coefficient)})"

    def decide(self, obs: ProvisioningObservation) -> int:
        target = int(self.coefficient * max(obs.arrival_rate_per_min, 0.0) + 0.5)
        return target - obs.m_prev


@dataclass(frozen=True)
class GreedyPolicy:
    q: QTable
    name: str = "LRP"

    def decide(self, obs: ProvisioningObservation) -> int:
        return self.q.learned_action(obs.state)


class ProvisionerKind(str, enum.Enum):
    LRP = "LRP"
    FP = "FP"
    ARP = "ARP"


_SPEC_NAME = re.compile(r"^(LRP|FP|ARP)(?:\(([^()]*)\))?$")


def _number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


class ProvisionerSpec(BaseModel):
    """Which provisioning policy to run: `LRP`, `FP(m)` or `ARP(c)`."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ProvisionerKind = ProvisionerKind.FP
    workers: int | None = Field(default=None, ge=0)
    coefficient: float | None = Field(default=None, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def from_name(cls, data):
        if isinstance(data, str):
            spec = cls.parse(data)
            return {"kind": spec.kind, "workers": spec.workers, "coefficient": spec.coefficient}
        return data

    @model_validator(mode="after")
    def parameter_matches_kind(self) -> ProvisionerSpec:
        if self.kind is ProvisionerKind.FP and self.workers is None:
            raise ValueError("FP needs a worker count, e.g. FP(10)")
        if self.kind is ProvisionerKind.ARP and self.coefficient is None:
            raise ValueError("ARP needs a coefficient, e.g. ARP(30)")
        if self.kind is not ProvisionerKind.FP and self.workers is not None:
            raise ValueError(f"{self.kind.value} takes no worker count")
        if self.kind is not ProvisionerKind.ARP and self.coefficient is not None:
            raise ValueError(f"{self.kind.value} takes no coefficient")
        return self

    @classmethod
    def parse(cls, name: str) -> ProvisionerSpec:
        match = _SPEC_NAME.match(name.strip())
        if match is None:
            raise InvalidArgumentError(f"unknown provisioning policy {name!r}")
        kind, arg = ProvisionerKind(match.group(1)), match.group(2)
        try:
            if kind is ProvisionerKind.FP:
                return cls(kind=kind, workers=int(arg))
            if kind is ProvisionerKind.ARP:
                return cls(kind=kind, coefficient=float(arg))
        except (TypeError, ValueError) as e:
            raise InvalidArgumentError(f"bad parameter in {name!r}: {e}") from None
        if arg is not None:
            raise InvalidArgumentError(f"LRP takes no parameter: {name!r}")
        return cls(kind=kind)

    @property
    def name(self) -> str:
        if self.kind is ProvisionerKind.FP:
            return f"FP({self.workers})"
        if self.kind is ProvisionerKind.ARP:
            return f"ARP({_number(self.coefficient)})"
        return "LRP"

    def build(self, q: QTable | None = None) -> ProvisioningPolicy:
        if self.kind is ProvisionerKind.FP:
            return fixed_policy(self.workers)
        if self.kind is ProvisionerKind.ARP:
            return arrival_rate_policy(self.coefficient)
        if q is None:
            raise InvalidArgumentError("LRP needs a trained Q-table")
        return greedy_policy(q)


def fixed_policy(m_fixed: int) -> FixedPolicy:
    if m_fixed < 0:
        raise InvalidArgumentError(f"FP worker count must be >= 0, got {m_fixed}")
    return FixedPolicy(m_fixed)


def arrival_rate_policy(coefficient: float) -> ArrivalRatePolicy:
    if not coefficient > 0:
        raise InvalidArgumentError(f"ARP coefficient must be positive, got {coefficient}")
    return ArrivalRatePolicy(coefficient)


def greedy_policy(q: QTable) -> GreedyPolicy:
    return GreedyPolicy(q)
