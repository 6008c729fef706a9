"""Discrete-event simulation of the transcoding cluster over slots and epochs."""

from src.vtsim.engine.cluster import ClusterState, Worker
from src.vtsim.engine.config import ArrivalConfig, ArrivalMode, SimConfig
from src.vtsim.engine.reports import (
    CompletionRecord,
    EpochReport,
    RunReport,
    write_completions,
    write_run_report,
)
from src.vtsim.engine.simulation import (
    InvalidEpochError,
    Simulation,
    SimulationEnvironment,
    SlotEvents,
    load_estimator,
    run,
    train_lrp,
)
from src.vtsim.engine.sources import Arrival, PoissonSource, ReplaySource, build_source

__all__ = [
    "Arrival",
    "ArrivalConfig",
    "ArrivalMode",
    "ClusterState",
    "CompletionRecord",
    "EpochReport",
    "InvalidEpochError",
    "PoissonSource",
    "ReplaySource",
    "RunReport",
    "SimConfig",
    "Simulation",
    "SimulationEnvironment",
    "SlotEvents",
    "Worker",
    "build_source",
    "load_estimator",
    "run",
    "train_lrp",
    "write_completions",
    "write_run_report",
]
