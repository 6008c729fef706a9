"""Pricing constants; defaults are $0.018/0.012/0.006 per minute and $0.252 per VM-hour."""

from pydantic import BaseModel, ConfigDict, Field

from src.vtsim.workload.models import ServiceLevel


class PricingConfig(BaseModel):
    """Discount factor, marginal price per service level, VM rental price."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha_per_s: float = Field(default=0.999, gt=0.0, lt=1.0)
    price_level_1_per_min: float = Field(default=0.018, ge=0.0)
    price_level_2_per_min: float = Field(default=0.012, ge=0.0)
    price_level_3_per_min: float = Field(default=0.006, ge=0.0)
    vm_price_per_hour: float = Field(default=0.252, ge=0.0)

    def price_per_min(self, level: ServiceLevel) -> float:
        return {
            ServiceLevel.I: self.price_level_1_per_min,
            ServiceLevel.II: self.price_level_2_per_min,
            ServiceLevel.III: self.price_level_3_per_min,
        }[level]

    def price_per_slot(self, level: ServiceLevel, slot_seconds: int = 1) -> float:
        return self.price_per_min(level) / 60.0 * slot_seconds

    def alpha_per_slot(self, slot_seconds: int = 1) -> float:
        # alpha is per second; raising it to the slot length keeps curves time-base invariant
        return self.alpha_per_s**slot_seconds
