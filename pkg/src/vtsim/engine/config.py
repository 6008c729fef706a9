"""Simulation configuration. Durations are given in seconds and converted to slots."""

from __future__ import annotations

import enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.vtsim.provisioner.cost import CostConfig
from src.vtsim.provisioner.policies import ProvisionerSpec
from src.vtsim.provisioner.state import CompactBins
from src.vtsim.scheduler.policies import SchedulerKind
from src.vtsim.valuation.functions import ValuationKind
from src.vtsim.valuation.pricing import PricingConfig


class ArrivalMode(str, enum.Enum):
    synthetic = "synthetic"  # Poisson counts from rates_per_min, sampled media
    trace_rates = "trace_rates"  # Poisson counts from trace rates scaled to [min, max]
    trace_replay = "trace_replay"  # trace rows are the arrivals


class ArrivalConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: ArrivalMode = ArrivalMode.synthetic
    # empty means the 24-epoch diurnal profile between rate_min and rate_max
    rates_per_min: tuple[float, ...] = ()
    rate_min_per_min: float = Field(default=0.1, ge=0.0)
    rate_max_per_min: float = Field(default=0.7, gt=0.0)
    trace_path: str | None = None
    trace_period_s: float | None = Field(default=86400.0, gt=0.0)
    level_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)

    @model_validator(mode="after")
    def check_sources(self) -> ArrivalConfig:
        if any(r < 0 for r in self.rates_per_min):
            raise ValueError("arrival rates must be >= 0")
        if self.rate_min_per_min >= self.rate_max_per_min:
            raise ValueError("rate_min_per_min must be below rate_max_per_min")
        if self.mode is not ArrivalMode.synthetic and not self.trace_path:
            raise ValueError(f"mode {self.mode.value} needs trace_path")
        if any(w < 0 for w in self.level_weights) or sum(self.level_weights) <= 0:
            raise ValueError("level_weights must be non-negative with a positive sum")
        return self


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    slot_seconds: int = Field(default=1, ge=1)
    epoch_seconds: int = Field(default=3600, ge=1)
    block_seconds: int = Field(default=180, ge=1)
    horizon_epochs: int = Field(default=24, ge=1)
    initial_workers: int = Field(default=10, ge=0)
    seed: int = Field(default=7, ge=0)

    pricing: PricingConfig = PricingConfig()
    valuation: ValuationKind = ValuationKind.exponential
    step_deadline_factor: float = Field(default=3.0, gt=0.0)
    arrival: ArrivalConfig = ArrivalConfig()
    # None: estimate with the synthetic ground-truth model
    estimator_path: str | None = None

    scheduler: SchedulerKind = SchedulerKind.VBS
    provisioner: ProvisionerSpec = ProvisionerSpec.parse("FP(10)")
    bins: CompactBins = CompactBins()

    @model_validator(mode="after")
    def check_time_base(self) -> SimConfig:
        if self.epoch_seconds % self.slot_seconds or self.block_seconds % self.slot_seconds:
            raise ValueError("epoch_seconds and block_seconds must be multiples of slot_seconds")
        if self.block_seconds > self.epoch_seconds:
            raise ValueError("block_seconds must not exceed epoch_seconds")
        return self

    @property
    def epoch_slots(self) -> int:
        return self.epoch_seconds // self.slot_seconds

    @property
    def block_slots(self) -> int:
        return self.block_seconds // self.slot_seconds

    @property
    def cost(self) -> CostConfig:
        return CostConfig.from_hourly(self.pricing.vm_price_per_hour, self.epoch_seconds)
