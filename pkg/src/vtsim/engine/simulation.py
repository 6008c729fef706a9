"""
Two-timescale cluster simulation.

Within a slot the order is fixed:
  1. every busy worker's residual drops by one;
  2. blocks reaching zero complete; a task's last block books U_i(now) as revenue;
  3. arrivals due this slot are estimated, split into blocks, queued, and the queue re-sorted;
  4. idle workers pull blocks from the queue head (residual = F).

A block dispatched at slot t therefore completes at t + F. At epoch boundaries the
provisioning action resizes the pool and the epoch's VM cost is charged for the new size.
Between events (arrivals, completions) nothing but residual countdown happens, so those
slots are skipped in bulk; the result is identical to stepping every slot.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from src.vtsim.engine.cluster import ClusterState
from src.vtsim.engine.config import SimConfig
from src.vtsim.engine.reports import CompletionRecord, EpochReport, RunReport
from src.vtsim.engine.sources import Arrival, ArrivalSource, PoissonSource, build_source
from src.vtsim.errors import VtsimError
from src.vtsim.estimator import Estimator
from src.vtsim.estimator.dataset import SyntheticTranscodeModel
from src.vtsim.estimator.serialization import load_model
from src.vtsim.logging_config import get_logger, run_logger
from src.vtsim.provisioner.cost import epoch_cost
from src.vtsim.provisioner.policies import ProvisioningObservation
from src.vtsim.provisioner.qlearning import (
    InfeasibleActionError,
    QLearningConfig,
    QTable,
    RewardLogEntry,
    train_policy,
)
from src.vtsim.provisioner.state import CompactState, compact
from src.vtsim.scheduler.policies import make_scheduler
from src.vtsim.scheduler.queue import QueueState, next_block
from src.vtsim.valuation.functions import (
    ValuationSpec,
    pending_valuation_sum,
    value_at,
    valuation_for_task,
)
from src.vtsim.workload.models import Task
from src.vtsim.workload.tasks import make_task

logger = get_logger(__name__)


class InvalidEpochError(VtsimError, RuntimeError):
    """Epochs must be run in order, starting where the simulation stands."""


@dataclass
class SlotEvents:
    completions: list[CompletionRecord] = field(default_factory=list)
    arrivals: int = 0
    dispatched: list[tuple[int, int]] = field(default_factory=list)


def load_estimator(config: SimConfig) -> Estimator:
    if config.estimator_path is None:
        return SyntheticTranscodeModel()
    return load_model(config.estimator_path)


class Simulation:
    def __init__(
        self,
        config: SimConfig,
        estimator: Estimator | None = None,
        source: ArrivalSource | None = None,
        *,
        fast_forward: bool = True,
    ) -> None:
        self.config = config
        self.F = config.block_slots
        self.T = config.epoch_slots
        self.estimator = estimator if estimator is not None else load_estimator(config)
        self.source = source if source is not None else build_source(config)
        self.scheduler = make_scheduler(config.scheduler)
        self.fast_forward = fast_forward

        self.cluster = ClusterState()
        self.cluster.resize(config.initial_workers)
        self.queue = QueueState(block_length=self.F, workers=self.cluster.m)
        self.tasks: dict[int, Task] = {}
        self.specs: dict[int, ValuationSpec] = {}
        self.now = 0
        self._next_id = 0

        self.completions: list[CompletionRecord] = []
        self.busy_worker_slots = 0
        self.blocks_completed = 0

    # fast timescale

    def _task_from(self, arrival: Arrival, now: int) -> tuple[Task, ValuationSpec]:
        record = arrival.record
        seconds = self.estimator.estimate(record.features)
        task = make_task(
            now,
            record.service_level,
            record.features,
            seconds / self.config.slot_seconds,
            self.F,
            task_id=self._next_id,
        )
        self._next_id += 1
        spec = valuation_for_task(
            task,
            self.config.valuation,
            self.config.pricing,
            self.config.slot_seconds,
            self.config.step_deadline_factor,
        )
        return task, spec

    def _advance(self, slots: int) -> None:
        for w in self.cluster.all_workers():
            if w.busy:
                done = min(slots, w.residual)
                w.residual -= done
                if w.task_id is not None:
                    self.busy_worker_slots += done

    def _collect_completions(self, now: int) -> list[CompletionRecord]:
        finished = []
        for w in self.cluster.all_workers():
            if w.busy or w.task_id is None:
                continue
            task = self.tasks[w.task_id]
            w.task_id = None
            task.blocks_completed += 1
            self.blocks_completed += 1
            if task.completed:
                spec = self.specs.pop(task.id)
                del self.tasks[task.id]
                record = CompletionRecord(
                    task_id=task.id,
                    service_level=task.service_level,
                    arrival_slot=task.arrival_time,
                    completion_slot=now,
                    blocks=task.block_count,
                    revenue=value_at(spec, task.arrival_time, now),
                )
                finished.append(record)
        self.cluster.drop_finished_retirees()
        self.completions.extend(finished)
        return finished

    def _dispatch(self) -> list[tuple[int, int]]:
        idle = self.cluster.idle()
        if not idle or not self.queue.pending:
            return []
        if self.scheduler.resort_before_dispatch:
            self.scheduler.order(self.queue, self.specs, self.now)
        out = []
        for w in idle:
            block = next_block(self.queue)
            if block is None:
                break
            w.residual = self.F
            w.task_id = block[0]
            out.append(block)
        return out

    def step_slot(self, now: int, arrivals: Sequence[Arrival] = ()) -> SlotEvents:
        """Process one slot; `arrivals` are the ones due at `now`."""
        self.now = now
        self._advance(1)
        events = SlotEvents(completions=self._collect_completions(now), arrivals=len(arrivals))
        if arrivals:
            for arrival in arrivals:
                task, spec = self._task_from(arrival, now)
                self.tasks[task.id] = task
                self.specs[task.id] = spec
                self.queue.push(task)
            self.scheduler.order(self.queue, self.specs, now)
        events.dispatched = self._dispatch()
        self.now = now + 1
        return events

    # slow timescale

    def pending_value(self) -> float:
        return pending_valuation_sum(self.tasks.values(), self.specs, self.now)

    def observe(self, k: int) -> ProvisioningObservation:
        rate = self.source.rate_per_minute(k)
        state = compact(self.pending_value(), self.cluster.m, rate, self.config.bins)
        return ProvisioningObservation(self.cluster.m, rate, state)

    def seed_workers(self, residuals: Sequence[int]) -> None:
        """Start from workers busy on untracked blocks with the given residual slots."""
        self.cluster.seed_residuals(residuals)
        self.queue.workers = self.cluster.m

    def resize(self, m: int) -> None:
        previous = self.cluster.m
        self.cluster.resize(m)
        self.queue.workers = m
        if m != previous:
            self.scheduler.order(self.queue, self.specs, self.now)

    def run_epoch(self, k: int, action: int) -> EpochReport:
        m = self.cluster.m + action
        if m < 0:
            raise InfeasibleActionError(f"epoch {k}: action {action} leaves {m} workers")
        start, end = k * self.T, (k + 1) * self.T
        if self.now != start:
            raise InvalidEpochError(
                f"simulation is at slot {self.now}, epoch {k} starts at {start}"
            )
        self.resize(m)

        due: dict[int, list[Arrival]] = defaultdict(list)
        for arrival in self.source.epoch_arrivals(k):
            due[arrival.slot].append(arrival)
        arrival_slots = sorted(due)
        next_arrival = 0
        first_completion = len(self.completions)

        t = start
        while t < end:
            events = due.get(t, ())
            self.step_slot(t, events)
            if events:
                next_arrival += 1
            t += 1
            if not self.fast_forward:
                continue
            target = end
            if next_arrival < len(arrival_slots):
                target = min(target, arrival_slots[next_arrival])
            residual = self.cluster.next_completion_in()
            if residual is not None:
                target = min(target, t - 1 + residual)
            if target > t:
                self._advance(target - t)
                t = target
                self.now = t

        done = self.completions[first_completion:]
        revenue = math.fsum(c.revenue for c in done)
        cost = epoch_cost(m, self.config.cost)
        delays = [(c.completion_slot - c.arrival_slot) * self.config.slot_seconds for c in done]
        report = EpochReport(
            epoch=k,
            action=action,
            workers=m,
            revenue=revenue,
            cost=cost,
            profit=revenue - cost,
            tasks_completed=len(done),
            mean_delay_s=math.fsum(delays) / len(delays) if delays else 0.0,
            arrivals=sum(len(v) for v in due.values()),
            backlog_blocks=self.queue.undispatched_blocks(),
            pending_tasks=len(self.queue),
        )
        run_logger(logger, epoch=k).debug(
            f"m={m} action={action:+d} revenue={revenue:.4f} cost={cost:.4f} "
            f"completed={len(done)} backlog={report.backlog_blocks}"
        )
        return report

    def in_flight_progress(self) -> int:
        """Slots already spent on blocks that are still running."""
        workers = self.cluster.all_workers()
        return sum(self.F - w.residual for w in workers if w.task_id is not None)


def run(
    config: SimConfig,
    q_table: QTable | None = None,
    *,
    estimator: Estimator | None = None,
    source: ArrivalSource | None = None,
    seed: int | None = None,
    gamma: float = QLearningConfig().gamma,
) -> RunReport:
    """Simulate `horizon_epochs` epochs under the configured provisioner and scheduler."""
    seed = config.seed if seed is None else seed
    policy = config.provisioner.build(q_table)
    name = f"{policy.name}-{config.scheduler.value}"
    sim = Simulation(config, estimator, source or build_source(config, seed))
    epochs = []
    for k in range(config.horizon_epochs):
        action = policy.decide(sim.observe(k))
        epochs.append(sim.run_epoch(k, action))
    report = RunReport(
        policy=name,
        seed=seed,
        gamma=gamma,
        epochs=tuple(epochs),
        completions=tuple(sim.completions),
        in_flight_tasks=len(sim.tasks),
        busy_worker_slots=sim.busy_worker_slots,
        blocks_completed=sim.blocks_completed,
        in_flight_progress=sim.in_flight_progress(),
    )
    run_logger(logger, policy=name, seed=seed).info(
        f"Run done: profit={report.undiscounted_profit:.4f} "
        f"discounted={report.discounted_profit:.4f} in_flight={report.in_flight_tasks}"
    )
    return report


class SimulationEnvironment:
    """
    Training episodes of `horizon_epochs` epochs, each from `initial_workers` and an empty
    queue. Poisson arrivals get a fresh stream per episode; a replayed trace repeats as is.
    """

    def __init__(
        self,
        config: SimConfig,
        estimator: Estimator | None = None,
        seed: int | None = None,
        source: ArrivalSource | None = None,
    ) -> None:
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.estimator = estimator if estimator is not None else load_estimator(config)
        self.base_source = source or build_source(config, self.seed)
        self.episode = -1
        self._start_episode()

    def _episode_source(self) -> ArrivalSource:
        if not isinstance(self.base_source, PoissonSource):
            return self.base_source
        stream = np.random.SeedSequence([self.seed, self.episode]).generate_state(1)[0]
        return replace(self.base_source, seed=int(stream))

    def _start_episode(self) -> None:
        self.episode += 1
        self.sim = Simulation(self.config, self.estimator, self._episode_source())
        self.epoch = 0

    def observe(self) -> CompactState:
        return self.sim.observe(self.epoch).state

    def apply(self, action: int) -> tuple[float, CompactState]:
        """Run one epoch; the returned state continues the episode even when it ends here."""
        report = self.sim.run_epoch(self.epoch, action)
        self.epoch += 1
        next_state = self.observe()
        if self.epoch >= self.config.horizon_epochs:
            self._start_episode()
        return report.profit, next_state


def train_lrp(
    config: SimConfig,
    q_config: QLearningConfig,
    loops: int,
    seed: int,
    estimator: Estimator | None = None,
) -> tuple[QTable, list[RewardLogEntry]]:
    """Learn a Q-table against the simulator under the configured scheduler."""
    if config.initial_workers > config.bins.m_max:
        raise InfeasibleActionError(
            f"initial_workers {config.initial_workers} exceeds m_max {config.bins.m_max}"
        )
    env = SimulationEnvironment(config, estimator, seed)
    q = QTable(config=q_config, m_max=config.bins.m_max)
    return train_policy(env, q, loops, seed)
