"""Per-epoch and per-run simulation reports and their CSV form."""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass, fields
from pathlib import Path

from src.vtsim.workload.models import ServiceLevel


@dataclass(frozen=True, slots=True)
class CompletionRecord:
    task_id: int
    service_level: ServiceLevel
    arrival_slot: int
    completion_slot: int
    blocks: int
    revenue: float


@dataclass(frozen=True, slots=True)
class EpochReport:
    epoch: int
    action: int
    workers: int
    revenue: float
    cost: float
    profit: float
    tasks_completed: int
    mean_delay_s: float  # 0.0 when nothing completed
    arrivals: int
    backlog_blocks: int
    pending_tasks: int


EPOCH_COLUMNS = tuple(f.name for f in fields(EpochReport))


@dataclass(frozen=True)
class RunReport:
    policy: str
    seed: int
    gamma: float
    epochs: tuple[EpochReport, ...]
    completions: tuple[CompletionRecord, ...]
    in_flight_tasks: int
    busy_worker_slots: int
    blocks_completed: int
    in_flight_progress: int

    @property
    def undiscounted_profit(self) -> float:
        return math.fsum(e.profit for e in self.epochs)

    @property
    def discounted_profit(self) -> float:
        return math.fsum(self.gamma**e.epoch * e.profit for e in self.epochs)

    @property
    def revenue(self) -> float:
        return math.fsum(e.revenue for e in self.epochs)

    @property
    def cost(self) -> float:
        return math.fsum(e.cost for e in self.epochs)

    def cumulative_profit(self) -> list[float]:
        out, total = [], 0.0
        for e in self.epochs:
            total += e.profit
            out.append(total)
        return out


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_run_report(report: RunReport, path: str | Path) -> Path:
    """One row per epoch, then a `#` summary line with the cumulative profits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(EPOCH_COLUMNS)
        for e in report.epochs:
            writer.writerow([_cell(getattr(e, c)) for c in EPOCH_COLUMNS])
        f.write(
            f"# policy={report.policy} seed={report.seed}"
            f" discounted_profit={report.discounted_profit!r}"
            f" undiscounted_profit={report.undiscounted_profit!r}"
            f" in_flight_tasks={report.in_flight_tasks}\n"
        )
    return path


def write_completions(records: Sequence[CompletionRecord], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [f.name for f in fields(CompletionRecord)]
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for r in records:
            row = [getattr(r, c) for c in columns]
            writer.writerow([v.value if isinstance(v, ServiceLevel) else _cell(v) for v in row])
    return path
