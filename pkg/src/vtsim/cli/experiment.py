"""
Train, evaluate and compare provisioning/scheduling policies.

LRP policies are trained once per scheduler against the simulator, seeded with the
experiment seed; every policy is then evaluated on the same replication seeds
(seed + 1 + r), so policies face identical arrival sequences.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import pandas as pd

from src.vtsim.cli.config_file import ExperimentSpec, PolicyChoice, parse_policy_name
from src.vtsim.config import Settings, get_settings
from src.vtsim.engine.config import SimConfig
from src.vtsim.engine.reports import RunReport
from src.vtsim.engine.simulation import load_estimator, run, train_lrp
from src.vtsim.errors import VtsimError
from src.vtsim.estimator import Estimator
from src.vtsim.logging_config import get_logger, run_logger
from src.vtsim.provisioner.policies import ProvisionerKind
from src.vtsim.provisioner.qlearning import QTable, RewardLogEntry
from src.vtsim.scheduler.policies import SchedulerKind

logger = get_logger(__name__)

COMPARISON_COLUMNS = (
    "policy",
    "replications",
    "mean_profit",
    "std_profit",
    "stderr_profit",
    "mean_discounted_profit",
    "status",
)


@dataclass
class PolicyResult:
    choice: PolicyChoice
    runs: list[RunReport] = field(default_factory=list)
    q: QTable | None = None
    reward_log: list[RewardLogEntry] = field(default_factory=list)
    error: str | None = None

    @property
    def label(self) -> str:
        return self.choice.label

    @property
    def status(self) -> str:
        return "ok" if self.error is None else f"failed: {self.error}"


def replication_seeds(seed: int, replications: int) -> list[int]:
    return [seed + 1 + r for r in range(replications)]


def policy_config(sim: SimConfig, choice: PolicyChoice) -> SimConfig:
    update = {"provisioner": choice.provisioner, "scheduler": choice.scheduler}
    return sim.model_copy(update=update)


def _replicate(
    config: SimConfig, q: QTable | None, estimator: Estimator, seed: int, gamma: float
) -> RunReport:
    # top-level so the process pool can pickle it
    return run(config, q, estimator=estimator, seed=seed, gamma=gamma)


def _evaluate(
    config: SimConfig,
    q: QTable | None,
    estimator: Estimator,
    seeds: list[int],
    gamma: float,
    workers: int,
) -> list[RunReport]:
    if workers <= 1 or len(seeds) <= 1:
        return [_replicate(config, q, estimator, s, gamma) for s in seeds]
    n = len(seeds)
    with ProcessPoolExecutor(max_workers=min(workers, n)) as pool:
        return list(
            pool.map(_replicate, [config] * n, [q] * n, [estimator] * n, seeds, [gamma] * n)
        )


def run_experiment(
    spec: ExperimentSpec,
    settings: Settings | None = None,
    estimator: Estimator | None = None,
) -> list[PolicyResult]:
    """Evaluate every policy in `spec.policies`; failures are recorded per policy."""
    settings = settings or get_settings()
    estimator = estimator if estimator is not None else load_estimator(spec.sim)
    seeds = replication_seeds(spec.sim.seed, spec.replications)
    gamma = spec.qlearning.gamma
    trained: dict[SchedulerKind, tuple[QTable, list[RewardLogEntry]]] = {}
    results = []

    for name in spec.policies:
        choice = parse_policy_name(name)
        result = PolicyResult(choice)
        config = policy_config(spec.sim, choice)
        log = run_logger(logger, policy=choice.label)
        log.info(f"{spec.replications} replication(s) on seeds {seeds}")
        try:
            if choice.provisioner.kind is ProvisionerKind.LRP:
                if choice.scheduler not in trained:
                    trained[choice.scheduler] = train_lrp(
                        config, spec.qlearning, spec.training_loops, spec.sim.seed, estimator
                    )
                result.q, result.reward_log = trained[choice.scheduler]
            result.runs = _evaluate(
                config, result.q, estimator, seeds, gamma, settings.replication_workers
            )
        except VtsimError as e:
            log.error(f"Policy failed: {e}")
            result.error = str(e)
            result.runs = []
        results.append(result)
    return results


def comparison_table(results: list[PolicyResult]) -> pd.DataFrame:
    """One row per policy: profit mean, sample std and standard error over replications."""
    if not results:
        return pd.DataFrame(columns=list(COMPARISON_COLUMNS))
    rows = [
        {
            "policy": r.label,
            "replication": i,
            "profit": run_.undiscounted_profit,
            "discounted_profit": run_.discounted_profit,
        }
        for r in results
        for i, run_ in enumerate(r.runs)
    ]
    frame = pd.DataFrame(rows, columns=["policy", "replication", "profit", "discounted_profit"])
    frame = frame.astype({"profit": float, "discounted_profit": float})
    stats = frame.groupby("policy", sort=False).agg(
        replications=("profit", "size"),
        mean_profit=("profit", "mean"),
        std_profit=("profit", "std"),
        mean_discounted_profit=("discounted_profit", "mean"),
    )
    labels = [r.label for r in results]
    stats = stats.reindex(labels)
    stats["replications"] = stats["replications"].fillna(0).astype(int)
    stats["std_profit"] = stats["std_profit"].where(stats["replications"] > 1, 0.0)
    stats["stderr_profit"] = [
        std / math.sqrt(n) if n > 0 else float("nan")
        for std, n in zip(stats["std_profit"], stats["replications"])
    ]
    stats["status"] = [r.status for r in results]
    return stats.rename_axis("policy").reset_index()[list(COMPARISON_COLUMNS)]
