"""Exhaustive search over task orders; the reference the weight ordering is checked against."""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence

from src.vtsim.errors import InvalidArgumentError
from src.vtsim.scheduler.completion import model_revenue
from src.vtsim.valuation.functions import ValuationSpec
from src.vtsim.workload.models import Task

MAX_BRUTE_FORCE_TASKS = 8


class ScheduleSizeError(InvalidArgumentError):
    """Too many tasks to enumerate."""


def brute_force_best(
    tasks: Sequence[Task],
    specs: Mapping[int, ValuationSpec],
    block_length: float,
    workers: int,
    t0: float,
) -> tuple[list[Task], float]:
    """Order maximizing the summed revenue at expected completion times; first best wins ties."""
    if len(tasks) > MAX_BRUTE_FORCE_TASKS:
        raise ScheduleSizeError(
            f"brute force is limited to {MAX_BRUTE_FORCE_TASKS} tasks, got {len(tasks)}"
        )
    best_order: list[Task] = list(tasks)
    best = model_revenue(best_order, specs, block_length, workers, t0) if tasks else 0.0
    for perm in itertools.permutations(tasks):
        revenue = model_revenue(perm, specs, block_length, workers, t0)
        if revenue > best:
            best, best_order = revenue, list(perm)
    return best_order, best
