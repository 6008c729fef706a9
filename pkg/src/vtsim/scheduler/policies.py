"""
Task ordering policies.

VBS sorts pending tasks by decreasing weight P_i with d_i = (F/m) b_i:

  exponential: P_i = alpha^(d_i - a_i) R_i D_i / (1 - alpha^d_i)
  linear:      P_i = beta_i / d_i
  step:        P_i = w_i / d_i   (a heuristic; the step problem is NP-hard)

Exponential weights do not depend on the current time, and shifting every a_i by the
same amount scales all weights by one factor, so a_i is taken relative to an origin
(the sort time) and the ranking is done on log P_i.

HVF sorts by the current value U_i(now).

Both keep a started head task at position 1 and break ties by earlier arrival, then id.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping

from src.vtsim.errors import VtsimError
from src.vtsim.scheduler.queue import QueueState
from src.vtsim.valuation.functions import ValuationKind, ValuationSpec, value_at
from src.vtsim.workload.models import Task


class DegenerateWeightError(VtsimError, ArithmeticError):
    """1 - alpha^d_i vanished in floating point."""


class SchedulerKind(str, enum.Enum):
    VBS = "VBS"
    HVF = "HVF"


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


def _gap(task: Task, block_length: float, workers: int) -> float:
    d = block_length / workers * task.block_count
    if not d > 0.0:
        raise DegenerateWeightError(f"task {task.id}: d_i must be positive, got {d}")
    return d


def _discount_complement(alpha: float, d: float, task_id: int) -> float:
    # 1 - alpha^d without cancellation
    denominator = -math.expm1(d * math.log(alpha))
    if not denominator > 0.0 or not math.isfinite(denominator):
        raise DegenerateWeightError(f"task {task_id}: 1 - alpha^d_i is {denominator}")
    return denominator


def log_weight(
    spec: ValuationSpec, task: Task, block_length: float, workers: int, origin: float = 0.0
) -> float:
    """log P_i; same ranking as weight() without overflow."""
    d = _gap(task, block_length, workers)
    if spec.kind is ValuationKind.exponential:
        denominator = _discount_complement(spec.alpha, d, task.id)
        exponent = d - (task.arrival_time - origin)
        return exponent * math.log(spec.alpha) + _log(spec.base_value) - math.log(denominator)
    if spec.kind is ValuationKind.linear:
        return _log(spec.slope) - math.log(d)
    return _log(spec.initial_value) - math.log(d)


def weight(
    spec: ValuationSpec, task: Task, block_length: float, workers: int, *, origin: float
) -> float:
    """
    P_i for the task's valuation kind, with a_i measured from `origin`.

    Exponential weights scale like alpha^-(a_i - origin), so the origin has to sit near
    the arrivals being compared; reorder() uses the sort time.
    """
    d = _gap(task, block_length, workers)
    if spec.kind is ValuationKind.linear:
        return spec.slope / d
    if spec.kind is ValuationKind.step:
        return spec.initial_value / d
    try:
        return math.exp(log_weight(spec, task, block_length, workers, origin=origin))
    except OverflowError:
        raise DegenerateWeightError(
            f"task {task.id}: P_i overflows with a_i {task.arrival_time - origin} slots "
            "after the origin"
        ) from None


def _sorted_tail(queue: QueueState, key) -> QueueState:
    head = [queue.pending[0]] if queue.started_head is not None else []
    tail = queue.pending[len(head):]
    queue.pending = head + sorted(tail, key=key)
    return queue


def reorder(queue: QueueState, specs: Mapping[int, ValuationSpec], now: float) -> QueueState:
    """Sort the unstarted tasks by decreasing P_i. A queue without workers keeps its order."""
    if queue.workers < 1:
        return queue
    F, m = queue.block_length, queue.workers

    def key(t: Task):
        return (-log_weight(specs[t.id], t, F, m, origin=now), t.arrival_time, t.id)

    return _sorted_tail(queue, key)


def hvf_order(queue: QueueState, specs: Mapping[int, ValuationSpec], now: float) -> QueueState:
    """Sort the unstarted tasks by decreasing current value."""

    def key(t: Task):
        return (-value_at(specs[t.id], t.arrival_time, now), t.arrival_time, t.id)

    return _sorted_tail(queue, key)


class VBSScheduler:
    """Value-based scheduling; re-sorts only on arrivals and worker-count changes."""

    kind = SchedulerKind.VBS
    resort_before_dispatch = False

    def order(self, queue: QueueState, specs: Mapping[int, ValuationSpec], now: float) -> None:
        reorder(queue, specs, now)


class HVFScheduler:
    """Highest value first; current values move with time, so it also re-sorts before dispatch."""

    kind = SchedulerKind.HVF
    resort_before_dispatch = True

    def order(self, queue: QueueState, specs: Mapping[int, ValuationSpec], now: float) -> None:
        hvf_order(queue, specs, now)


def make_scheduler(kind: SchedulerKind) -> VBSScheduler | HVFScheduler:
    return VBSScheduler() if kind is SchedulerKind.VBS else HVFScheduler()
