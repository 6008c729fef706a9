"""Fast-timescale policy: completion estimates, weight ordering, block dispatch."""

from src.vtsim.scheduler.completion import (
    ScheduleEntry,
    ScheduleEstimate,
    completion_times,
    expected_completion,
    model_revenue,
    monte_carlo_completion,
)
from src.vtsim.scheduler.oracle import ScheduleSizeError, brute_force_best
from src.vtsim.scheduler.policies import (
    DegenerateWeightError,
    HVFScheduler,
    SchedulerKind,
    VBSScheduler,
    hvf_order,
    log_weight,
    make_scheduler,
    reorder,
    weight,
)
from src.vtsim.scheduler.queue import NoCapacityError, QueueState, next_block

__all__ = [
    "DegenerateWeightError",
    "HVFScheduler",
    "NoCapacityError",
    "QueueState",
    "ScheduleEntry",
    "ScheduleEstimate",
    "ScheduleSizeError",
    "SchedulerKind",
    "VBSScheduler",
    "brute_force_best",
    "completion_times",
    "expected_completion",
    "hvf_order",
    "log_weight",
    "make_scheduler",
    "model_revenue",
    "monte_carlo_completion",
    "next_block",
    "reorder",
    "weight",
]
