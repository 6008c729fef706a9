"""
Where arrivals come from: Poisson counts from a rate profile, or a replayed trace.

Both sources are keyed by the absolute epoch index k and seeded with (seed, k), so an
epoch's arrivals do not depend on anything simulated before it. Profiles repeat every
len(profile) epochs; a replayed trace repeats every horizon.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from src.vtsim.engine.config import ArrivalMode, SimConfig
from src.vtsim.workload.arrivals import diurnal_profile, sample_arrivals
from src.vtsim.workload.media import sample_record
from src.vtsim.workload.models import ArrivalProfile, TraceRecord
from src.vtsim.workload.trace import load_trace, scale_trace_to_rates


@dataclass(frozen=True, slots=True)
class Arrival:
    slot: int
    record: TraceRecord


class ArrivalSource(Protocol):
    def epoch_arrivals(self, k: int) -> list[Arrival]: ...

    def rate_per_minute(self, k: int) -> float: ...


@dataclass(frozen=True)
class PoissonSource:
    profile: ArrivalProfile
    slot_seconds: int
    seed: int
    level_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    # media features are resampled from these records when given
    feature_pool: tuple[TraceRecord, ...] = ()

    def rate_per_minute(self, k: int) -> float:
        return self.profile.rate_per_minute(k % len(self.profile), self.slot_seconds)

    def epoch_arrivals(self, k: int) -> list[Arrival]:
        T = self.profile.epoch_length
        offsets = sample_arrivals(self.profile, k % len(self.profile), [self.seed, k])
        rng = np.random.default_rng([self.seed, k, 1])
        out = []
        for offset in offsets:
            slot = k * T + offset
            t_s = float(slot * self.slot_seconds)
            if self.feature_pool:
                picked = self.feature_pool[int(rng.integers(len(self.feature_pool)))]
                record = picked.model_copy(update={"arrival_time_s": t_s})
            else:
                record = sample_record(rng, arrival_time_s=t_s, level_weights=self.level_weights)
            out.append(Arrival(slot, record))
        return out


@dataclass
class ReplaySource:
    """Trace rows past the horizon are never replayed."""

    records: tuple[TraceRecord, ...]
    epoch_slots: int
    horizon_epochs: int
    slot_seconds: int
    by_epoch: dict[int, list[tuple[int, TraceRecord]]] = field(init=False)

    def __post_init__(self) -> None:
        self.by_epoch = {}
        for r in self.records:
            slot = int(r.arrival_time_s // self.slot_seconds)
            epoch = slot // self.epoch_slots
            if epoch < self.horizon_epochs:
                self.by_epoch.setdefault(epoch, []).append((slot, r))

    def rate_per_minute(self, k: int) -> float:
        minutes = self.epoch_slots * self.slot_seconds / 60.0
        return len(self.by_epoch.get(k % self.horizon_epochs, ())) / minutes

    def epoch_arrivals(self, k: int) -> list[Arrival]:
        shift = (k // self.horizon_epochs) * self.horizon_epochs * self.epoch_slots
        rows = self.by_epoch.get(k % self.horizon_epochs, ())
        return [Arrival(slot + shift, r) for slot, r in rows]


def default_profile(config: SimConfig) -> ArrivalProfile:
    a = config.arrival
    if a.rates_per_min:
        return ArrivalProfile.from_per_minute(
            list(a.rates_per_min), config.epoch_slots, config.slot_seconds
        )
    return diurnal_profile(
        a.rate_min_per_min,
        a.rate_max_per_min,
        epochs=24,
        epoch_length=config.epoch_slots,
        slot_seconds=config.slot_seconds,
    )


def build_source(
    config: SimConfig, seed: int | None = None, trace: Sequence[TraceRecord] | None = None
) -> ArrivalSource:
    """Arrival source for `config`; `trace` overrides reading `arrival.trace_path`."""
    a = config.arrival
    seed = config.seed if seed is None else seed
    if a.mode is ArrivalMode.synthetic:
        return PoissonSource(default_profile(config), config.slot_seconds, seed, a.level_weights)

    records = tuple(trace) if trace is not None else tuple(load_trace(a.trace_path))
    if a.mode is ArrivalMode.trace_replay:
        return ReplaySource(records, config.epoch_slots, config.horizon_epochs, config.slot_seconds)

    scaled = scale_trace_to_rates(
        list(records),
        (a.rate_min_per_min, a.rate_max_per_min),
        bucket_s=config.epoch_seconds,
        slot_seconds=config.slot_seconds,
        period_s=a.trace_period_s,
    )
    return PoissonSource(scaled, config.slot_seconds, seed, a.level_weights, records)
