"""
Command-line entry point.

    python main.py simulate --config exp.cfg --seed 3 --out out/
    python main.py train | compare | gen-data | estimate [--data dataset.csv]

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.vtsim.cli.config_file import (
    ConfigError,
    ExperimentSpec,
    parse_config,
    with_overrides,
)
from src.vtsim.cli.experiment import run_experiment
from src.vtsim.cli.reports import emit_report
from src.vtsim.config import Settings, get_settings
from src.vtsim.engine.reports import write_completions, write_run_report
from src.vtsim.engine.simulation import load_estimator, run, train_lrp
from src.vtsim.errors import VtsimError
from src.vtsim.estimator import (
    SyntheticTranscodeModel,
    as_samples,
    fit_linear,
    load_dataset,
    normalized_error,
    save_model,
    summarize_errors,
    synthetic_records,
    train,
    write_dataset,
)
from src.vtsim.logging_config import get_logger, setup_logging
from src.vtsim.provisioner.policies import ProvisionerKind
from src.vtsim.provisioner.qlearning import dump_q_table, load_q_table, write_reward_log

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config (section.key=value)")
    common.add_argument("--seed", type=int, help="overrides sim.seed")
    common.add_argument("--out", help="output directory, overrides experiment.output_dir")

    parser = argparse.ArgumentParser(
        prog="vtsim", description="Two-timescale video transcoding cluster simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", parents=[common], help="run one policy over the horizon")
    simulate.add_argument("--qtable", type=Path, help="Q-table CSV for LRP (trained if absent)")
    sub.add_parser("train", parents=[common], help="learn an LRP Q-table")
    sub.add_parser("compare", parents=[common], help="evaluate and compare experiment.policies")
    sub.add_parser("gen-data", parents=[common], help="write a synthetic estimator dataset")
    estimate = sub.add_parser("estimate", parents=[common], help="train and evaluate the estimator")
    estimate.add_argument("--data", type=Path, help="dataset CSV (synthetic if absent)")
    return parser


def load_spec(args: argparse.Namespace, settings: Settings) -> ExperimentSpec:
    spec = parse_config(args.config) if args.config else ExperimentSpec()
    return with_overrides(spec, settings, seed=args.seed, output_dir=args.out)


def cmd_simulate(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    config = spec.sim
    out = Path(spec.output_dir)
    estimator = load_estimator(config)
    q = None
    if config.provisioner.kind is ProvisionerKind.LRP:
        if args.qtable is not None:
            q = load_q_table(args.qtable, spec.qlearning, config.bins.m_max)
        else:
            q, _ = train_lrp(config, spec.qlearning, spec.training_loops, config.seed, estimator)
    report = run(config, q, estimator=estimator, gamma=spec.qlearning.gamma)
    write_run_report(report, out / "run.csv")
    write_completions(report.completions, out / "completions.csv")
    logger.info(
        f"{report.policy}: profit {report.undiscounted_profit:.4f}, "
        f"discounted {report.discounted_profit:.4f}, report in {out}"
    )
    return EXIT_OK


def cmd_train(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    out = Path(spec.output_dir)
    q, log = train_lrp(spec.sim, spec.qlearning, spec.training_loops, spec.sim.seed)
    dump_q_table(q, out / "qtable.csv")
    write_reward_log(log, out / "rewards.csv")
    logger.info(f"Q-table with {len(q)} entries written to {out}")
    return EXIT_OK


def cmd_compare(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    results = run_experiment(spec, get_settings())
    emit_report(results, spec.output_dir)
    if results and all(r.error is not None for r in results):
        logger.error("Every policy failed")
        return EXIT_RUNTIME
    return EXIT_OK


def _dataset_seed(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else spec.estimator.seed


def cmd_gen_data(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    e = spec.estimator
    truth = SyntheticTranscodeModel(noise=e.noise)
    rows = synthetic_records(e.samples, _dataset_seed(spec, args), truth)
    write_dataset(rows, Path(spec.output_dir) / "dataset.csv")
    return EXIT_OK


def cmd_estimate(spec: ExperimentSpec, args: argparse.Namespace) -> int:
    e = spec.estimator
    seed = _dataset_seed(spec, args)
    if args.data is not None:
        rows = load_dataset(args.data)
    else:
        rows = synthetic_records(e.samples, seed, SyntheticTranscodeModel(noise=e.noise))
    samples = as_samples(rows)
    result = train(
        samples,
        e.split,
        e.hidden,
        seed,
        learning_rate=e.learning_rate,
        max_iterations=e.max_iterations,
        patience=e.patience,
        target_scale=e.target_scale,
    )
    linear = fit_linear([samples[i] for i in result.train_indices])

    test = [samples[i] for i in result.test_indices]
    measured = np.array([s for _, s in test])
    nn_pred = np.array([result.model.estimate(f) for f, _ in test])
    lin_pred = np.array([linear.estimate(f) for f, _ in test])
    frame = pd.DataFrame(
        {
            "sample": result.test_indices,
            "measured_s": measured,
            "nn_s": nn_pred,
            "linear_s": lin_pred,
            "nn_error": [normalized_error(p, r) for p, r in zip(nn_pred, measured)],
            "linear_error": [normalized_error(p, r) for p, r in zip(lin_pred, measured)],
        }
    )

    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_model(result.model, out / "estimator.txt")
    frame.to_csv(out / "estimator_errors.csv", index=False, lineterminator="\n")

    nn = summarize_errors(frame["nn_error"])
    lin = summarize_errors(frame["linear_error"])
    logger.info(
        f"Estimator test split ({nn.count} samples): NN median |err| {nn.median_abs:.4f}, "
        f"{nn.within_band:.1%} within +/-{nn.band}; linear median |err| {lin.median_abs:.4f}, "
        f"{lin.within_band:.1%} within +/-{lin.band}"
    )
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "compare": cmd_compare,
    "gen-data": cmd_gen_data,
    "estimate": cmd_estimate,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(settings)
    try:
        spec = load_spec(args, settings)
        return COMMANDS[args.command](spec, args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except (VtsimError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_RUNTIME
