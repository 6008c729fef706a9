from collections import defaultdict

import numpy as np
import pytest

from src.vtsim.engine import (
    Arrival,
    ArrivalConfig,
    ArrivalMode,
    ClusterState,
    InvalidEpochError,
    PoissonSource,
    ReplaySource,
    SimConfig,
    Simulation,
    SimulationEnvironment,
    build_source,
    load_estimator,
    run,
    train_lrp,
    write_completions,
    write_run_report,
)
from src.vtsim.errors import InvalidArgumentError
from src.vtsim.estimator import SyntheticTranscodeModel
from src.vtsim.provisioner import InfeasibleActionError, ProvisionerSpec, QLearningConfig
from src.vtsim.scheduler.policies import SchedulerKind
from src.vtsim.workload.models import ServiceLevel
from tests.conftest import FixedEstimator, record

ALPHA = 0.999


def _small(**overrides) -> SimConfig:
    base = {"slot_seconds": 1, "epoch_seconds": 100, "block_seconds": 10, "initial_workers": 1}
    base.update(overrides)
    return SimConfig(**base)


def _busy(rate_per_min: float = 2.0, **overrides) -> SimConfig:
    return SimConfig(
        epoch_seconds=1800,
        horizon_epochs=2,
        arrival=ArrivalConfig(rates_per_min=(rate_per_min,)),
        **overrides,
    )


def _replay(config: SimConfig, *records) -> ReplaySource:
    return ReplaySource(
        tuple(records), config.epoch_slots, config.horizon_epochs, config.slot_seconds
    )


# hand traces


def test_single_block_finishes_one_block_after_dispatch():
    sim = Simulation(_small(block_seconds=3, epoch_seconds=10), FixedEstimator(3.0))
    events = sim.step_slot(0, [Arrival(0, record())])
    assert events.dispatched == [(0, 1)]
    finished = [t for t in range(1, 10) if sim.step_slot(t).completions]
    assert finished == [3]
    assert sim.completions[0].completion_slot == 3


def test_seeded_workers_free_up_one_per_slot():
    sim = Simulation(
        _small(block_seconds=3, epoch_seconds=20, initial_workers=3), FixedEstimator(3.0)
    )
    sim.seed_workers([1, 2, 3])
    sim.step_slot(0, [Arrival(0, record()) for _ in range(5)])
    for t in range(1, 12):
        sim.step_slot(t)
    assert sorted(c.completion_slot for c in sim.completions) == [3, 4, 5, 6, 7]


@pytest.mark.parametrize("g", [1, 2, 3, 5])
def test_block_completion_mean_with_random_residuals(g):
    # m = 3: one idle worker, two mid-block with uniform residuals
    config = SimConfig(block_seconds=180, epoch_seconds=1800, initial_workers=3)
    F, m = config.block_slots, 3
    rng = np.random.default_rng(g)
    done = []
    for _ in range(10_000):
        sim = Simulation(config, FixedEstimator(g * F), _replay(config, record(0.0)))
        sim.seed_workers([0, *rng.integers(1, F + 1, size=m - 1).tolist()])
        sim.run_epoch(0, 0)
        done.append(sim.completions[0].completion_slot)
    expected = (F / m) * (g - 1) + F
    assert abs(np.mean(done) - expected) / expected < 0.01


def test_two_task_epoch_revenue_and_cost():
    config = _small()
    source = _replay(config, record(0.0, ServiceLevel.I), record(5.0, ServiceLevel.II))
    sim = Simulation(config, FixedEstimator(10.0), source)
    report = sim.run_epoch(0, 0)

    assert [c.completion_slot for c in sim.completions] == [10, 20]
    expected = ALPHA**10 * (0.018 / 60) * 10 + ALPHA**15 * (0.012 / 60) * 10
    assert report.revenue == pytest.approx(expected, rel=1e-12)
    assert report.cost == pytest.approx(0.252 * 100 / 3600)
    assert report.profit == report.revenue - report.cost
    assert report.tasks_completed == 2 and report.arrivals == 2
    assert report.mean_delay_s == 12.5


def test_idle_epoch_costs_the_full_fleet():
    config = SimConfig(arrival=ArrivalConfig(rates_per_min=(0.0,)), initial_workers=10)
    report = Simulation(config, FixedEstimator(100.0)).run_epoch(0, 0)
    assert report.revenue == 0.0
    assert report.profit == pytest.approx(-2.52)
    assert report.mean_delay_s == 0.0
    assert report.tasks_completed == 0


# engine properties


def test_fast_forward_matches_slot_by_slot():
    config = _busy(initial_workers=6)
    fast = Simulation(config, fast_forward=True)
    slow = Simulation(config, fast_forward=False)
    for k, action in enumerate([0, 3]):
        assert fast.run_epoch(k, action) == slow.run_epoch(k, action)
    assert fast.completions == slow.completions
    assert fast.busy_worker_slots == slow.busy_worker_slots


def test_work_is_conserved_across_resizes():
    config = SimConfig(
        epoch_seconds=1800,
        horizon_epochs=6,
        provisioner=ProvisionerSpec.parse("ARP(30)"),
    )
    report = run(config)
    F = config.block_slots
    assert report.blocks_completed * F + report.in_flight_progress == report.busy_worker_slots
    assert len({e.workers for e in report.epochs}) > 1


def test_epoch_profit_is_revenue_minus_cost():
    report = run(_busy(provisioner=ProvisionerSpec.parse("FP(4)")))
    for e in report.epochs:
        assert e.profit == e.revenue - e.cost
    assert report.undiscounted_profit == pytest.approx(report.revenue - report.cost)
    assert report.cumulative_profit()[-1] == pytest.approx(report.undiscounted_profit)


def test_smaller_fleet_wins_at_low_load():
    base = SimConfig(horizon_epochs=4, arrival=ArrivalConfig(rates_per_min=(0.1,)))
    small = run(base.model_copy(update={"provisioner": ProvisionerSpec.parse("FP(10)")}))
    large = run(base.model_copy(update={"provisioner": ProvisionerSpec.parse("FP(15)")}))
    assert small.undiscounted_profit > large.undiscounted_profit


def test_backlog_shrinks_with_more_workers():
    config = _busy()
    source = build_source(config)
    due = defaultdict(list)
    for arrival in source.epoch_arrivals(0):
        due[arrival.slot].append(arrival)

    sims = {
        m: Simulation(config.model_copy(update={"initial_workers": m}), source=source)
        for m in (2, 4)
    }
    for t in range(config.epoch_slots):
        for sim in sims.values():
            sim.step_slot(t, due.get(t, ()))
        assert sims[4].queue.undispatched_blocks() <= sims[2].queue.undispatched_blocks()
    assert sims[2].queue.undispatched_blocks() > 0


def test_runs_are_deterministic():
    config = _busy(provisioner=ProvisionerSpec.parse("FP(5)"))
    assert run(config) == run(config)


def test_hvf_and_vbs_runs_differ_only_in_order():
    config = _busy(provisioner=ProvisionerSpec.parse("FP(3)"))
    vbs = run(config)
    hvf = run(config.model_copy(update={"scheduler": SchedulerKind.HVF}))
    assert [e.arrivals for e in vbs.epochs] == [e.arrivals for e in hvf.epochs]
    assert vbs.policy == "FP(3)-VBS" and hvf.policy == "FP(3)-HVF"


def test_epochs_must_run_in_order():
    sim = Simulation(_small(), FixedEstimator(10.0), _replay(_small()))
    with pytest.raises(InvalidEpochError):
        sim.run_epoch(1, 0)
    with pytest.raises(InfeasibleActionError):
        sim.run_epoch(0, -2)


def test_observation_uses_source_rate_and_pending_value():
    config = _small()
    sim = Simulation(config, FixedEstimator(10.0), _replay(config, record(0.0), record(1.0)))
    obs = sim.observe(0)
    assert obs.m_prev == 1
    assert obs.arrival_rate_per_min == pytest.approx(2 / (100 / 60))
    assert sim.pending_value() == 0.0


# cluster


def test_scale_down_retires_idle_then_nearest_to_finish():
    cluster = ClusterState()
    cluster.seed_residuals([0, 5, 2, 9])
    cluster.resize(2)
    assert cluster.residuals == [5, 9]
    assert [w.residual for w in cluster.retiring] == [2]
    cluster.resize(4)
    assert cluster.m == 4 and len(cluster.idle()) == 2
    with pytest.raises(InvalidArgumentError):
        cluster.resize(-1)


def test_retiring_worker_finishes_its_block():
    # three blocks on two workers: the third runs from slot 10 to 20
    config = _small(initial_workers=2, epoch_seconds=20)
    sim = Simulation(config, FixedEstimator(30.0), _replay(config, record(0.0)))
    sim.run_epoch(0, 0)
    assert sim.completions == []
    report = sim.run_epoch(1, -2)
    assert sim.cluster.m == 0 and sim.cluster.retiring == []
    assert [c.completion_slot for c in sim.completions] == [20]
    assert report.tasks_completed == 1
    assert report.cost == 0.0


# sources


def test_poisson_source_is_keyed_by_epoch():
    config = _busy()
    a = build_source(config, seed=3)
    b = build_source(config, seed=3)
    assert isinstance(a, PoissonSource)
    assert a.epoch_arrivals(1) == b.epoch_arrivals(1)
    slots = [x.slot for x in a.epoch_arrivals(1)]
    assert all(1800 <= s < 3600 for s in slots)
    assert a.epoch_arrivals(1) != build_source(config, seed=4).epoch_arrivals(1)


def test_replay_source_repeats_every_horizon():
    config = _small(horizon_epochs=2)
    source = _replay(config, record(0.0), record(50.0), record(150.0), record(250.0))
    assert [a.slot for a in source.epoch_arrivals(0)] == [0, 50]
    assert [a.slot for a in source.epoch_arrivals(1)] == [150]
    assert [a.slot for a in source.epoch_arrivals(2)] == [200, 250]
    assert source.rate_per_minute(3) == pytest.approx(1 / (100 / 60))


def test_trace_modes_build_their_sources(tmp_path):
    trace = [record(float(t)) for t in range(0, 7200, 300)]
    replay = SimConfig(
        arrival=ArrivalConfig(mode=ArrivalMode.trace_replay, trace_path="unused.csv")
    )
    assert isinstance(build_source(replay, trace=trace), ReplaySource)

    rates = SimConfig(
        arrival=ArrivalConfig(
            mode=ArrivalMode.trace_rates, trace_path="unused.csv", trace_period_s=None
        )
    )
    source = build_source(rates, trace=trace)
    assert isinstance(source, PoissonSource)
    assert source.feature_pool == tuple(trace)
    assert len(source.profile) == 2


def test_trace_mode_needs_a_path():
    with pytest.raises(ValueError):
        ArrivalConfig(mode=ArrivalMode.trace_replay)


def test_config_rejects_misaligned_time_base():
    with pytest.raises(ValueError):
        SimConfig(slot_seconds=7)
    with pytest.raises(ValueError):
        SimConfig(epoch_seconds=60, block_seconds=180)


def test_default_estimator_is_ground_truth_model():
    assert isinstance(load_estimator(SimConfig()), SyntheticTranscodeModel)


# training against the simulator


def test_environment_steps_one_epoch_per_action():
    config = _busy(initial_workers=3)
    env = SimulationEnvironment(config)
    state = env.observe()
    assert state.m == 3
    reward, nxt = env.apply(2)
    assert nxt.m == 5 and env.epoch == 1
    assert isinstance(reward, float)


def test_environment_restarts_after_the_horizon():
    config = _busy(initial_workers=3)
    env = SimulationEnvironment(config)
    first = env.sim.source
    env.apply(2)
    _, last = env.apply(1)
    assert last.m == 6
    assert (env.episode, env.epoch, env.sim.now) == (1, 0, 0)
    assert env.observe().m == 3
    assert env.sim.source.seed != first.seed
    assert env.sim.source.profile == first.profile


def test_replayed_trace_repeats_each_episode():
    config = _small(horizon_epochs=1)
    source = _replay(config, record(0.0), record(5.0))
    env = SimulationEnvironment(config, FixedEstimator(10.0), source=source)
    env.apply(0)
    assert env.episode == 1 and env.sim.source is source


def test_train_lrp_short_run():
    config = SimConfig(epoch_seconds=600, initial_workers=2)
    q, log = train_lrp(config, QLearningConfig(action_radius=2), loops=5, seed=1)
    assert len(log) == 5
    assert len(q) >= 1
    lrp = config.model_copy(update={"provisioner": ProvisionerSpec.parse("LRP")})
    assert run(lrp, q).policy == "LRP-VBS"


def test_train_lrp_requires_start_inside_table():
    config = SimConfig(initial_workers=40)
    with pytest.raises(InfeasibleActionError):
        train_lrp(config, QLearningConfig(), loops=1, seed=0)


# files


def test_run_report_files(tmp_path):
    report = run(_busy(provisioner=ProvisionerSpec.parse("FP(4)")))
    lines = write_run_report(report, tmp_path / "run.csv").read_text().splitlines()
    assert lines[0].startswith("epoch,action,workers,revenue,cost,profit")
    assert len(lines) == 2 + len(report.epochs)
    assert lines[-1].startswith("# policy=FP(4)-VBS seed=7")

    rows = write_completions(report.completions, tmp_path / "c.csv").read_text().splitlines()
    assert rows[0] == "task_id,service_level,arrival_slot,completion_slot,blocks,revenue"
    assert len(rows) == 1 + len(report.completions)
