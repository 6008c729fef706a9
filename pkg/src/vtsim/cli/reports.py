"""CSV emission of experiment results, for plotting elsewhere."""

from __future__ import annotations

import re
from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from src.vtsim.cli.experiment import PolicyResult, comparison_table
from src.vtsim.engine.reports import write_run_report
from src.vtsim.errors import InvalidArgumentError
from src.vtsim.logging_config import get_logger
from src.vtsim.provisioner.qlearning import dump_q_table

logger = get_logger(__name__)

CUMULATIVE_COLUMNS = ("policy", "replication", "epoch", "cumulative_profit")
INSTANCE_COLUMNS = ("policy", "replication", "epoch", "workers")


def slug(label: str) -> str:
    """File-name form of a policy label: `FP(10)-HVF` -> `fp_10_hvf`."""
    return re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_")


def _series(results: Sequence[PolicyResult]) -> tuple[pd.DataFrame, pd.DataFrame]:
    cumulative, instances = [], []
    for r in results:
        for rep, run_ in enumerate(r.runs):
            for epoch, total in zip(run_.epochs, run_.cumulative_profit()):
                cumulative.append((r.label, rep, epoch.epoch, total))
                instances.append((r.label, rep, epoch.epoch, epoch.workers))
    return (
        pd.DataFrame(cumulative, columns=list(CUMULATIVE_COLUMNS)),
        pd.DataFrame(instances, columns=list(INSTANCE_COLUMNS)),
    )


def emit_report(results: Sequence[PolicyResult], out_dir: str | Path) -> list[Path]:
    """
    Write comparison.csv, cumulative_profit.csv, instances.csv, one runs/<policy>_r<k>.csv
    per replication and qtable_<policy>.csv for learned policies. Returns the paths written.
    """
    out = Path(out_dir)
    slugs = [slug(r.label) for r in results]
    if len(set(slugs)) != len(slugs):
        raise InvalidArgumentError(f"policy labels collide as file names: {slugs}")
    out.mkdir(parents=True, exist_ok=True)

    written = []
    comparison = out / "comparison.csv"
    comparison_table(list(results)).to_csv(comparison, index=False, lineterminator="\n")
    written.append(comparison)

    cumulative, instances = _series(results)
    for frame, name in ((cumulative, "cumulative_profit.csv"), (instances, "instances.csv")):
        path = out / name
        frame.to_csv(path, index=False, lineterminator="\n")
        written.append(path)

    for r, name in zip(results, slugs):
        for rep, run_ in enumerate(r.runs):
            written.append(write_run_report(run_, out / "runs" / f"{name}_r{rep}.csv"))
        if r.q is not None:
            written.append(dump_q_table(r.q, out / f"qtable_{name}.csv"))

    logger.info(f"Wrote {len(written)} report files to {out}")
    return written
