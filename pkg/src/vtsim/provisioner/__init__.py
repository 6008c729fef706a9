"""Slow-timescale provisioning: VM cost, compact states, Q-learning and baselines."""

from src.vtsim.provisioner.cost import CostConfig, epoch_cost
from src.vtsim.provisioner.mdp import SyntheticMDP, ValueIterationResult, value_iteration
from src.vtsim.provisioner.policies import (
    ArrivalRatePolicy,
    FixedPolicy,
    GreedyPolicy,
    ProvisioningObservation,
    ProvisionerKind,
    ProvisionerSpec,
    ProvisioningPolicy,
    arrival_rate_policy,
    fixed_policy,
    greedy_policy,
)
from src.vtsim.provisioner.qlearning import (
    InfeasibleActionError,
    ProvisioningEnvironment,
    QLearningConfig,
    QTable,
    RewardLogEntry,
    dump_q_table,
    load_q_table,
    q_update,
    q_value_bound,
    select_action,
    train_policy,
    write_reward_log,
)
from src.vtsim.provisioner.state import CompactBins, CompactState, compact

__all__ = [
    "ArrivalRatePolicy",
    "CompactBins",
    "CompactState",
    "CostConfig",
    "FixedPolicy",
    "GreedyPolicy",
    "InfeasibleActionError",
    "ProvisioningEnvironment",
    "ProvisionerKind",
    "ProvisionerSpec",
    "ProvisioningObservation",
    "ProvisioningPolicy",
    "QLearningConfig",
    "QTable",
    "RewardLogEntry",
    "SyntheticMDP",
    "ValueIterationResult",
    "arrival_rate_policy",
    "compact",
    "dump_q_table",
    "epoch_cost",
    "fixed_policy",
    "greedy_policy",
    "load_q_table",
    "q_update",
    "q_value_bound",
    "select_action",
    "train_policy",
    "value_iteration",
    "write_reward_log",
]
