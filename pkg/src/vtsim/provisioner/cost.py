"""VM rental cost per epoch."""

from pydantic import BaseModel, ConfigDict, Field

from src.vtsim.errors import InvalidArgumentError


class CostConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    vm_cost_per_epoch: float = Field(ge=0.0)

    @classmethod
    def from_hourly(cls, vm_price_per_hour: float, epoch_seconds: float) -> "CostConfig":
        return cls(vm_cost_per_epoch=vm_price_per_hour * epoch_seconds / 3600.0)


def epoch_cost(m: int, cost: CostConfig) -> float:
    """m workers rented for the whole epoch."""
    if m < 0:
        raise InvalidArgumentError(f"worker count must be >= 0, got {m}")
    return m * cost.vm_cost_per_epoch
