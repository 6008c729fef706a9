"""
Worker pool. Each worker holds at most one block and counts down its residual slots.

Scaling up adds idle workers at once. Scaling down retires idle workers first, then
the busy ones closest to finishing; a retiring worker completes its block and leaves.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

from src.vtsim.errors import InvalidArgumentError


@dataclass(slots=True)
class Worker:
    residual: int = 0
    task_id: int | None = None

    @property
    def busy(self) -> bool:
        return self.residual > 0


@dataclass
class ClusterState:
    active: list[Worker] = field(default_factory=list)
    retiring: list[Worker] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.active)

    @property
    def residuals(self) -> list[int]:
        return [w.residual for w in self.active]

    def all_workers(self) -> Iterator[Worker]:
        yield from self.active
        yield from self.retiring

    def idle(self) -> list[Worker]:
        return [w for w in self.active if not w.busy]

    def next_completion_in(self) -> int | None:
        """Slots until the earliest running block finishes."""
        busy = [w.residual for w in self.all_workers() if w.busy]
        return min(busy) if busy else None

    def resize(self, target: int) -> None:
        if target < 0:
            raise InvalidArgumentError(f"worker count must be >= 0, got {target}")
        while self.m < target:
            self.active.append(Worker())
        surplus = self.m - target
        if surplus <= 0:
            return
        # idle ones first, then the busy ones with the least work left
        order = sorted(range(self.m), key=lambda i: (self.active[i].busy, self.active[i].residual))
        leaving = set(order[:surplus])
        self.retiring.extend(self.active[i] for i in sorted(leaving) if self.active[i].busy)
        self.active = [w for i, w in enumerate(self.active) if i not in leaving]

    def seed_residuals(self, residuals: Sequence[int]) -> None:
        """Replace the pool with workers busy on untracked blocks (residual 0 means idle)."""
        if any(r < 0 for r in residuals):
            raise InvalidArgumentError("residuals must be >= 0")
        self.active = [Worker(residual=int(r)) for r in residuals]
        self.retiring = []

    def drop_finished_retirees(self) -> None:
        self.retiring = [w for w in self.retiring if w.busy]
