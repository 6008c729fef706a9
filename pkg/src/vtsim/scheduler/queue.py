"""
Pending-task queue with head-of-queue semantics.

Once the first block of a task is dispatched, that task stays at position 1 until all of
its blocks have been dispatched; it then leaves the queue (its blocks are in flight) and
the next request is served from the new head.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from src.vtsim.errors import VtsimError
from src.vtsim.workload.models import Task


class NoCapacityError(VtsimError, ValueError):
    """An operation needs at least one active worker."""


@dataclass
class QueueState:
    block_length: int
    workers: int
    pending: list[Task] = field(default_factory=list)

    @property
    def started_head(self) -> Task | None:
        if self.pending and self.pending[0].started:
            return self.pending[0]
        return None

    def __len__(self) -> int:
        return len(self.pending)

    def push(self, task: Task) -> None:
        self.pending.append(task)

    def undispatched_blocks(self) -> int:
        return sum(t.remaining_blocks for t in self.pending)

    def ids(self) -> list[int]:
        return [t.id for t in self.pending]


def next_block(queue: QueueState) -> tuple[int, int] | None:
    """Dispatch the next block of the head task: (task id, 1-based block index), or None."""
    if not queue.pending:
        return None
    head = queue.pending[0]
    head.blocks_dispatched += 1
    block = (head.id, head.blocks_dispatched)
    if head.fully_dispatched:
        queue.pending.pop(0)
    return block
