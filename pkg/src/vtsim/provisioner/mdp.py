"""
Small deterministic MDPs over compact states, with a value-iteration oracle.

They implement the same observe/apply surface as the simulator, so train_policy runs
on them unchanged and its greedy policy can be compared against the exact optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.vtsim.errors import InvalidArgumentError
from src.vtsim.provisioner.state import CompactState

Transition = tuple[CompactState, float]


@dataclass
class SyntheticMDP:
    """(state, action) -> (next state, reward); the actions of a state are its keys."""

    transitions: dict[tuple[CompactState, int], Transition]
    start: CompactState
    current: CompactState = field(init=False)

    def __post_init__(self) -> None:
        if not any(s == self.start for s, _ in self.transitions):
            raise InvalidArgumentError(f"start state {self.start} has no actions")
        self.current = self.start

    @property
    def states(self) -> list[CompactState]:
        return sorted({s for s, _ in self.transitions})

    def actions(self, state: CompactState) -> list[int]:
        return sorted(a for s, a in self.transitions if s == state)

    def observe(self) -> CompactState:
        return self.current

    def apply(self, action: int) -> tuple[float, CompactState]:
        key = (self.current, action)
        if key not in self.transitions:
            raise InvalidArgumentError(f"action {action} undefined in {self.current}")
        self.current, reward = self.transitions[key]
        return reward, self.current

    def reset(self) -> None:
        self.current = self.start

    @classmethod
    def ring(
        cls, omega_bins: int = 4, lambda_bins: int = 3, m: int = 5, radius: int = 2, seed: int = 0
    ) -> SyntheticMDP:
        """
        omega_bins * lambda_bins states on a cycle at fixed m. Action index j (0 for -radius)
        advances j + 1 positions; rewards are uniform on [0, 1) drawn from `seed`.
        """
        rng = np.random.default_rng(seed)
        states = [CompactState(o, m, lam) for o in range(omega_bins) for lam in range(lambda_bins)]
        actions = range(-radius, radius + 1)
        n = len(states)
        transitions = {}
        for i, s in enumerate(states):
            for j, a in enumerate(actions):
                transitions[(s, a)] = (states[(i + j + 1) % n], float(rng.random()))
        return cls(transitions=transitions, start=states[0])

    @classmethod
    def two_state(cls, low_reward: float = 1.0, high_reward: float = 3.0) -> SyntheticMDP:
        """
        Worker count 0 or 1. Staying at 0 pays `low_reward`, staying at 1 pays `high_reward`,
        switching pays nothing; the actions are exactly the feasible deltas with m_max = 1.
        """
        low, high = CompactState(0, 0, 0), CompactState(0, 1, 0)
        return cls(
            transitions={
                (low, 0): (low, low_reward),
                (low, 1): (high, 0.0),
                (high, 0): (high, high_reward),
                (high, -1): (low, 0.0),
            },
            start=low,
        )


@dataclass(frozen=True)
class ValueIterationResult:
    values: dict[CompactState, float]
    q: dict[tuple[CompactState, int], float]
    policy: dict[CompactState, int]
    iterations: int


def value_iteration(
    mdp: SyntheticMDP, gamma: float, tol: float = 1e-12, max_iterations: int = 100_000
) -> ValueIterationResult:
    """Exact optimal values by repeated Bellman backups; ties pick the smallest |action|."""
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma}")
    states = mdp.states
    values = {s: 0.0 for s in states}
    iteration = 0

    def backup(s: CompactState) -> float:
        outcomes = (mdp.transitions[(s, a)] for a in mdp.actions(s))
        return max(r + gamma * values[nxt] for nxt, r in outcomes)

    for iteration in range(1, max_iterations + 1):
        updated = {s: backup(s) for s in states}
        change = max(abs(updated[s] - values[s]) for s in states)
        values = updated
        if change < tol:
            break

    q = {
        (s, a): mdp.transitions[(s, a)][1] + gamma * values[mdp.transitions[(s, a)][0]]
        for s in states
        for a in mdp.actions(s)
    }
    policy = {}
    for s in states:
        best = max(q[(s, a)] for a in mdp.actions(s))
        ties = [a for a in mdp.actions(s) if q[(s, a)] == best]
        policy[s] = min(ties, key=lambda a: (abs(a), a))
    return ValueIterationResult(values=values, q=q, policy=policy, iterations=iteration)
