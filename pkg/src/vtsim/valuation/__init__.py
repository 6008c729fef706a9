"""Revenue functions and pricing constants."""

from src.vtsim.valuation.functions import (
    ValuationKind,
    ValuationSpec,
    pending_valuation_sum,
    valuation_for_task,
    value_at,
)
from src.vtsim.valuation.pricing import PricingConfig

__all__ = [
    "PricingConfig",
    "ValuationKind",
    "ValuationSpec",
    "pending_valuation_sum",
    "valuation_for_task",
    "value_at",
]
