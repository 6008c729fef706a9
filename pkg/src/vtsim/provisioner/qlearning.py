"""
Tabular Q-learning over compact states.

Actions are worker-count deltas in {-A..A}; an action is feasible in state s when
0 <= s.m + action <= m_max. Unvisited entries read as the initial constant C while training;
the evaluation readout (learned_action) only chooses among entries training has written.
The learning rate of an entry is 1 / (1 + visits) ** exponent and exploration decays
exponentially from epsilon_start to epsilon_end over epsilon_decay_steps updates.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.vtsim.errors import InvalidArgumentError, VtsimError
from src.vtsim.logging_config import get_logger
from src.vtsim.provisioner.state import CompactState

logger = get_logger(__name__)

Q_COLUMNS = ("omega_bin", "m", "lambda_bin", "action", "q_value")
REWARD_COLUMNS = ("epoch", "omega_bin", "m", "lambda_bin", "action", "reward")


class InfeasibleActionError(VtsimError, ValueError):
    """Action would take the worker count outside [0, m_max]."""


class QLearningConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    action_radius: int = Field(default=5, ge=1)
    initial_value: float = 0.0
    gamma: float = Field(default=0.9, gt=0.0, lt=1.0)
    learning_rate_exponent: float = Field(default=0.7, gt=0.5, le=1.0)
    epsilon_start: float = Field(default=0.3, ge=0.0, le=1.0)
    epsilon_end: float = Field(default=0.01, ge=0.0, le=1.0)
    epsilon_decay_steps: int = Field(default=10_000, ge=1)

    @model_validator(mode="after")
    def epsilon_decreases(self) -> QLearningConfig:
        if self.epsilon_end > self.epsilon_start:
            raise ValueError("epsilon_end must not exceed epsilon_start")
        return self


@dataclass
class QTable:
    config: QLearningConfig
    m_max: int
    values: dict[tuple[CompactState, int], float] = field(default_factory=dict)
    visits: dict[tuple[CompactState, int], int] = field(default_factory=dict)
    steps: int = 0

    @property
    def actions(self) -> tuple[int, ...]:
        a = self.config.action_radius
        return tuple(range(-a, a + 1))

    def feasible_actions(self, state: CompactState) -> list[int]:
        return [a for a in self.actions if 0 <= state.m + a <= self.m_max]

    def value(self, state: CompactState, action: int) -> float:
        return self.values.get((state, action), self.config.initial_value)

    def learning_rate(self, state: CompactState, action: int) -> float:
        n = self.visits.get((state, action), 0)
        return 1.0 / (1.0 + n) ** self.config.learning_rate_exponent

    def epsilon(self, step: int | None = None) -> float:
        c = self.config
        k = self.steps if step is None else step
        if c.epsilon_start == 0.0:
            return 0.0
        frac = min(1.0, k / c.epsilon_decay_steps)
        if c.epsilon_end == 0.0:
            return c.epsilon_start * (1.0 - frac)
        return c.epsilon_start * (c.epsilon_end / c.epsilon_start) ** frac

    def best_value(self, state: CompactState) -> float:
        return max(self.value(state, a) for a in self.checked_feasible(state))

    def greedy_action(self, state: CompactState) -> int:
        """argmax over feasible actions; ties go to the smallest |action|, then the smaller one."""
        feasible = self.checked_feasible(state)
        best = max(self.value(state, a) for a in feasible)
        ties = [a for a in feasible if self.value(state, a) == best]
        return min(ties, key=lambda a: (abs(a), a))

    def learned_action(self, state: CompactState) -> int:
        """Greedy over the feasible actions tried in `state`; holds (0) in an unseen state."""
        tried = [a for a in self.checked_feasible(state) if (state, a) in self.values]
        if not tried:
            return 0
        best = max(self.values[(state, a)] for a in tried)
        ties = [a for a in tried if self.values[(state, a)] == best]
        return min(ties, key=lambda a: (abs(a), a))

    def checked_feasible(self, state: CompactState) -> list[int]:
        feasible = self.feasible_actions(state)
        if not feasible:
            raise InfeasibleActionError(f"no feasible action in {state} with m_max={self.m_max}")
        return feasible

    def __len__(self) -> int:
        return len(self.values)


def select_action(
    q: QTable,
    state: CompactState,
    rng: np.random.Generator,
    explore: bool = True,
    step: int | None = None,
) -> int:
    """Epsilon-greedy over feasible actions; `explore=False` is the pure greedy readout."""
    if explore and rng.random() < q.epsilon(step):
        feasible = q.checked_feasible(state)
        return feasible[int(rng.integers(len(feasible)))]
    return q.greedy_action(state)


def q_update(
    q: QTable,
    state: CompactState,
    action: int,
    reward: float,
    next_state: CompactState,
    learning_rate: float | None = None,
) -> QTable:
    """Q(s,a) += delta * (reward + gamma * max_a' Q(s',a') - Q(s,a))."""
    if action not in q.feasible_actions(state):
        raise InfeasibleActionError(f"action {action} infeasible in {state}")
    delta = q.learning_rate(state, action) if learning_rate is None else learning_rate
    if not 0.0 <= delta <= 1.0:
        raise InvalidArgumentError(f"learning rate must lie in [0, 1], got {delta}")
    key = (state, action)
    current = q.value(state, action)
    target = reward + q.config.gamma * q.best_value(next_state)
    q.values[key] = current + delta * (target - current)
    q.visits[key] = q.visits.get(key, 0) + 1
    q.steps += 1
    return q


class ProvisioningEnvironment(Protocol):
    def observe(self) -> CompactState: ...

    def apply(self, action: int) -> tuple[float, CompactState]: ...


@dataclass(frozen=True, slots=True)
class RewardLogEntry:
    epoch: int
    state: CompactState
    action: int
    reward: float


def train_policy(
    env: ProvisioningEnvironment, q: QTable, loops: int, seed: int
) -> tuple[QTable, list[RewardLogEntry]]:
    """
    Run `loops` epochs of observe, act epsilon-greedily, observe profit, update.

    Updates bootstrap from the state `apply` returns; the next decision reads `observe()`,
    which differs when the environment has just started a new episode.
    """
    if loops < 0:
        raise InvalidArgumentError(f"loops must be >= 0, got {loops}")
    rng = np.random.default_rng(seed)
    log: list[RewardLogEntry] = []
    state = env.observe()
    for k in range(loops):
        action = select_action(q, state, rng)
        reward, next_state = env.apply(action)
        q_update(q, state, action, reward, next_state)
        log.append(RewardLogEntry(k, state, action, reward))
        state = env.observe()
        if (k + 1) % 1000 == 0:
            logger.debug(
                f"Q-learning loop {k + 1}/{loops}, epsilon {q.epsilon():.4f}, |Q|={len(q)}"
            )
    if loops:
        logger.info(f"Trained Q-table over {loops} loops; {len(q)} entries")
    return q, log


def q_value_bound(q: QTable, max_abs_reward: float) -> float:
    """Upper bound on |Q| once rewards are bounded by `max_abs_reward`."""
    return max(abs(q.config.initial_value), max_abs_reward / (1.0 - q.config.gamma))


def dump_q_table(q: QTable, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(Q_COLUMNS)
        for (state, action), value in sorted(q.values.items()):
            writer.writerow([state.omega_bin, state.m, state.lambda_bin, action, repr(value)])
    return path


def load_q_table(path: str | Path, config: QLearningConfig, m_max: int) -> QTable:
    path = Path(path)
    q = QTable(config=config, m_max=m_max)
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != Q_COLUMNS:
            raise InvalidArgumentError(f"{path}: header must be {','.join(Q_COLUMNS)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                omega_bin, m, lambda_bin, action = (int(v) for v in row[:4])
                value = float(row[4])
            except (ValueError, IndexError):
                raise InvalidArgumentError(f"{path}: bad Q row at line {line_no}") from None
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{path}: non-finite Q value at line {line_no}")
            q.values[(CompactState(omega_bin, m, lambda_bin), action)] = value
    return q


def write_reward_log(entries: Sequence[RewardLogEntry], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REWARD_COLUMNS)
        for e in entries:
            s = e.state
            writer.writerow([e.epoch, s.omega_bin, s.m, s.lambda_bin, e.action, repr(e.reward)])
    return path
