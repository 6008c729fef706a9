import math

import pytest

from src.vtsim.errors import InvalidArgumentError
from src.vtsim.valuation.functions import (
    ValuationKind,
    ValuationSpec,
    pending_valuation_sum,
    valuation_for_task,
    value_at,
)
from src.vtsim.valuation.pricing import PricingConfig
from src.vtsim.workload.models import ServiceLevel
from tests.conftest import task

PRICING = PricingConfig()


def test_default_pricing():
    assert PRICING.alpha_per_s == 0.999
    assert PRICING.price_per_min(ServiceLevel.I) == 0.018
    assert PRICING.price_per_min(ServiceLevel.II) == 0.012
    assert PRICING.price_per_min(ServiceLevel.III) == 0.006
    assert PRICING.vm_price_per_hour == 0.252


def test_exponential_at_arrival_is_price_times_duration():
    # level I for 30 minutes
    spec = valuation_for_task(task(duration=1800.0), ValuationKind.exponential, PRICING)
    assert value_at(spec, 0, 0) == pytest.approx(0.54)


def test_exponential_delay_discount():
    spec = ValuationSpec.exponential(0.999, 0.018 / 60, 1800.0)
    assert value_at(spec, 0, 100) == pytest.approx(0.54 * 0.999**100, rel=1e-12)


def test_exponential_is_multiplicative_and_decreasing():
    spec = ValuationSpec.exponential(0.999, 0.0003, 1000.0)
    u = [value_at(spec, 10, t) for t in range(10, 60)]
    assert all(b < a for a, b in zip(u, u[1:]))
    assert value_at(spec, 10, 45) == pytest.approx(0.999**15 * value_at(spec, 10, 30), rel=1e-12)


def test_linear_drops_by_slope_and_goes_negative():
    spec = ValuationSpec.linear(1.0, 0.25)
    assert [value_at(spec, 0, t) for t in range(6)] == [1.0, 0.75, 0.5, 0.25, 0.0, -0.25]


def test_step_boundary():
    spec = ValuationSpec.step(2.0, 30.0)
    assert value_at(spec, 5, 35) == 2.0
    assert value_at(spec, 5, 36) == 0.0
    assert {value_at(spec, 5, t) for t in range(5, 100)} == {0.0, 2.0}


def test_completion_before_arrival_rejected():
    with pytest.raises(InvalidArgumentError):
        value_at(ValuationSpec.step(1.0, 1.0), 10, 9)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": ValuationKind.linear, "initial_value": 1.0, "slope": 0.0},
        {"kind": ValuationKind.step, "initial_value": 1.0, "deadline": -1.0},
        {"kind": ValuationKind.exponential, "alpha": 1.0, "marginal_price": 1.0, "duration": 1.0},
        {"kind": ValuationKind.step, "initial_value": 1.0, "slope": 1.0},
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        ValuationSpec(**kwargs)


def test_per_minute_price_round_trips_through_slots():
    per_slot = PRICING.price_per_slot(ServiceLevel.I, slot_seconds=1)
    assert math.isclose(math.fsum([per_slot] * 60), 0.018, rel_tol=1e-12)


def test_alpha_is_time_base_invariant():
    assert PRICING.alpha_per_slot(10) == pytest.approx(0.999**10)
    spec_1s = valuation_for_task(task(duration=600.0), ValuationKind.exponential, PRICING, 1)
    spec_10s = valuation_for_task(task(duration=60.0), ValuationKind.exponential, PRICING, 10)
    assert value_at(spec_1s, 0, 300) == pytest.approx(value_at(spec_10s, 0, 30), rel=1e-12)


def test_linear_and_step_curves_for_task():
    t = task(duration=600.0)
    base = 0.018 / 60 * 600
    linear = valuation_for_task(t, ValuationKind.linear, PRICING)
    assert linear.initial_value == pytest.approx(base)
    assert linear.slope == pytest.approx(base * 0.001)
    step = valuation_for_task(t, ValuationKind.step, PRICING, step_deadline_factor=3.0)
    assert step.deadline == 1800.0


def test_pending_valuation_sum():
    a, b = task(0, arrival=0), task(1, arrival=5)
    specs = {0: ValuationSpec.linear(1.0, 0.01), 1: ValuationSpec.step(2.0, 100.0)}
    assert pending_valuation_sum([], specs, 10) == 0.0
    assert pending_valuation_sum([a], specs, 0) == 1.0
    assert pending_valuation_sum([a, b], specs, 10) == pytest.approx(
        value_at(specs[0], 0, 10) + value_at(specs[1], 5, 10)
    )
    b.blocks_completed = b.block_count
    assert pending_valuation_sum([a, b], specs, 10) == pytest.approx(0.9)
