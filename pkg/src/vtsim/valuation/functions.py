"""
Revenue earned by a task as a function of its completion time.

  exponential: U(t) = alpha^(t - a) * R * D
  linear:      U(t) = w - beta * (t - a)        (negative values are delay penalties)
  step:        U(t) = w if t <= a + tau else 0

All times are in slots; alpha, R and beta are per slot.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from src.vtsim.errors import InvalidArgumentError
from src.vtsim.valuation.pricing import PricingConfig
from src.vtsim.workload.models import Task


class ValuationKind(str, enum.Enum):
    exponential = "exponential"
    linear = "linear"
    step = "step"


@dataclass(frozen=True, slots=True)
class ValuationSpec:
    """Which revenue curve applies to a task and its parameters. Build via the classmethods."""

    kind: ValuationKind
    alpha: float | None = None
    marginal_price: float | None = None
    duration: float | None = None
    initial_value: float | None = None
    slope: float | None = None
    deadline: float | None = None

    def __post_init__(self) -> None:
        fields = {
            "alpha": self.alpha,
            "marginal_price": self.marginal_price,
            "duration": self.duration,
            "initial_value": self.initial_value,
            "slope": self.slope,
            "deadline": self.deadline,
        }
        wanted = {
            ValuationKind.exponential: {"alpha", "marginal_price", "duration"},
            ValuationKind.linear: {"initial_value", "slope"},
            ValuationKind.step: {"initial_value", "deadline"},
        }[self.kind]
        set_fields = {k for k, v in fields.items() if v is not None}
        if set_fields != wanted:
            raise InvalidArgumentError(
                f"{self.kind.value} valuation takes {sorted(wanted)}, got {sorted(set_fields)}"
            )
        if self.kind is ValuationKind.exponential and not 0.0 < self.alpha < 1.0:
            raise InvalidArgumentError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.kind is ValuationKind.linear and not self.slope > 0.0:
            raise InvalidArgumentError(f"linear slope must be positive, got {self.slope}")
        if self.kind is ValuationKind.step and self.deadline < 0.0:
            raise InvalidArgumentError(f"deadline must be non-negative, got {self.deadline}")

    @classmethod
    def exponential(cls, alpha: float, marginal_price: float, duration: float) -> ValuationSpec:
        return cls(
            ValuationKind.exponential, alpha=alpha, marginal_price=marginal_price, duration=duration
        )

    @classmethod
    def linear(cls, initial_value: float, slope: float) -> ValuationSpec:
        return cls(ValuationKind.linear, initial_value=initial_value, slope=slope)

    @classmethod
    def step(cls, initial_value: float, deadline: float) -> ValuationSpec:
        return cls(ValuationKind.step, initial_value=initial_value, deadline=deadline)

    @property
    def base_value(self) -> float:
        """Value at zero delay."""
        if self.kind is ValuationKind.exponential:
            return self.marginal_price * self.duration
        return self.initial_value


def value_at(spec: ValuationSpec, arrival: float, t: float) -> float:
    """Revenue if the task arriving at `arrival` completes at `t`."""
    delay = t - arrival
    if delay < 0:
        raise InvalidArgumentError(f"completion {t} precedes arrival {arrival}")
    if spec.kind is ValuationKind.exponential:
        return math.pow(spec.alpha, delay) * spec.marginal_price * spec.duration
    if spec.kind is ValuationKind.linear:
        return spec.initial_value - spec.slope * delay
    return spec.initial_value if delay <= spec.deadline else 0.0


def pending_valuation_sum(
    tasks: Iterable[Task], specs: Mapping[int, ValuationSpec], now: float
) -> float:
    """omega: summed current value of every task not yet fully completed."""
    return math.fsum(
        value_at(specs[task.id], task.arrival_time, now) for task in tasks if not task.completed
    )


def valuation_for_task(
    task: Task,
    kind: ValuationKind,
    pricing: PricingConfig,
    slot_seconds: int = 1,
    step_deadline_factor: float = 3.0,
) -> ValuationSpec:
    """
    Build a task's curve from its level price and estimated duration D_i (slots).

    Linear and step curves start from the same base value R_i * D_i. The linear slope is
    w_i * (1 - alpha) per second, the first-order match of the exponential curve; the
    step deadline is `step_deadline_factor` * D_i.
    """
    price = pricing.price_per_slot(task.service_level, slot_seconds)
    base = price * task.estimated_duration
    if kind is ValuationKind.exponential:
        return ValuationSpec.exponential(
            pricing.alpha_per_slot(slot_seconds), price, task.estimated_duration
        )
    if kind is ValuationKind.linear:
        return ValuationSpec.linear(base, base * (1.0 - pricing.alpha_per_s) * slot_seconds)
    return ValuationSpec.step(base, step_deadline_factor * task.estimated_duration)
