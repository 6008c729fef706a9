"""
Non-stationary Poisson arrivals: a constant rate inside each epoch, one rate per epoch.

Counts are drawn per slot (Poisson with mean lambda_k) rather than by thinning; at slot
granularity the two are the same distribution.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from src.vtsim.errors import VtsimError
from src.vtsim.workload.models import ArrivalProfile

Seed = int | Sequence[int]


class EpochRangeError(VtsimError, IndexError):
    """Epoch index outside the profile."""


def sample_arrivals(profile: ArrivalProfile, epoch_index: int, rng_seed: Seed) -> list[int]:
    """
    Arrival slots within one epoch, as offsets 0..T-1 from the epoch start.

    A slot appears once per task arriving in it, so the list is sorted and may repeat.
    Same profile, epoch and seed always give the same list.
    """
    if epoch_index < 0 or epoch_index >= len(profile):
        raise EpochRangeError(
            f"epoch_index {epoch_index} outside profile of {len(profile)} epochs"
        )
    rate = profile.rates[epoch_index]
    if rate == 0.0:
        return []
    rng = np.random.default_rng(rng_seed)
    counts = rng.poisson(rate, size=profile.epoch_length)
    return np.repeat(np.arange(profile.epoch_length), counts).tolist()


def diurnal_profile(
    min_rate_per_min: float = 0.1,
    max_rate_per_min: float = 0.7,
    epochs: int = 24,
    epoch_length: int = 3600,
    slot_seconds: int = 1,
    trough_epoch: int = 4,
) -> ArrivalProfile:
    """
    Synthetic day: a cosine between min and max with the trough at `trough_epoch`.

    rate_h = mid - half * cos(2*pi*(h - trough_epoch) / epochs), per minute.
    """
    mid = (min_rate_per_min + max_rate_per_min) / 2.0
    half = (max_rate_per_min - min_rate_per_min) / 2.0
    rates = [
        mid - half * math.cos(2.0 * math.pi * (h - trough_epoch) / epochs) for h in range(epochs)
    ]
    # cos round-off can dip a hair outside [min, max]
    rates = [min(max_rate_per_min, max(min_rate_per_min, r)) for r in rates]
    return ArrivalProfile.from_per_minute(rates, epoch_length, slot_seconds)
