"""
Expected completion times for a queue order.

With m workers whose block progress is unknown (residuals uniform on [0, F]), the
g-th block handed out after t0 is requested on average (F/m)(g - 1) slots after t0 and
finishes F slots later:

    E{f_i} = t0 + (F/m)(g_i - 1) + F

where g_i counts the blocks of every task up to and including task i.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from src.vtsim.scheduler.queue import NoCapacityError, QueueState
from src.vtsim.valuation.functions import ValuationSpec, value_at
from src.vtsim.workload.models import Task


@dataclass(frozen=True, slots=True)
class ScheduleEntry:
    task_id: int
    cumulative_blocks: int
    completion: float
    gap: float


@dataclass(frozen=True)
class ScheduleEstimate:
    entries: tuple[ScheduleEntry, ...]

    def completion_of(self, task_id: int) -> float:
        for e in self.entries:
            if e.task_id == task_id:
                return e.completion
        raise KeyError(task_id)


def _check_capacity(block_length: float, workers: int) -> None:
    if workers < 1:
        raise NoCapacityError("expected completion needs at least one worker")
    if block_length < 1:
        raise NoCapacityError(f"block length must be >= 1 slot, got {block_length}")


def completion_times(
    tasks: Sequence[Task], block_length: float, workers: int, t0: float
) -> list[float]:
    """E{f_i} for `tasks` processed in the given order; started tasks count remaining blocks."""
    _check_capacity(block_length, workers)
    step = block_length / workers
    out: list[float] = []
    g = 0
    for task in tasks:
        g += task.remaining_blocks
        out.append(t0 + step * (g - 1) + block_length)
    return out


def expected_completion(queue: QueueState, t0: float) -> ScheduleEstimate:
    times = completion_times(queue.pending, queue.block_length, queue.workers, t0)
    step = queue.block_length / queue.workers
    entries = []
    g = 0
    for task, f in zip(queue.pending, times):
        g += task.remaining_blocks
        entries.append(ScheduleEntry(task.id, g, f, step * task.block_count))
    return ScheduleEstimate(tuple(entries))


def model_revenue(
    order: Sequence[Task],
    specs: Mapping[int, ValuationSpec],
    block_length: float,
    workers: int,
    t0: float,
) -> float:
    """Total revenue of `order` when every task completes at its expected time."""
    times = completion_times(order, block_length, workers, t0)
    return math.fsum(value_at(specs[t.id], t.arrival_time, f) for t, f in zip(order, times))


def monte_carlo_completion(
    workers: int,
    block_length: float,
    g: int,
    draws: int,
    seed: int,
    t0: float = 0.0,
) -> np.ndarray:
    """
    Sample the completion time of the g-th dispatched block.

    Worker 1 is idle at t0; the others finish their current block after a residual drawn
    uniformly from [0, F]. Every worker then takes one block per F slots, so the g-th
    request is the g-th smallest of {y_j + cF}.
    """
    _check_capacity(block_length, workers)
    rng = np.random.default_rng(seed)
    cycles = (g - 1) // workers + 1
    residuals = rng.uniform(0.0, block_length, size=(draws, workers))
    residuals[:, 0] = 0.0
    requests = residuals[:, :, None] + block_length * np.arange(cycles)[None, None, :]
    requests = requests.reshape(draws, -1)
    dispatch = np.partition(requests, g - 1, axis=1)[:, g - 1]
    return t0 + dispatch + block_length
