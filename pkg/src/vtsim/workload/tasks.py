"""Task construction and block decomposition."""

import math

from src.vtsim.errors import InvalidArgumentError
from src.vtsim.workload.models import MediaFeatures, ServiceLevel, Task


def block_count(estimated_duration: float, block_length: float) -> int:
    """ceil(D/F): the last block is padded to a full F."""
    return max(1, math.ceil(estimated_duration / block_length))


def make_task(
    arrival: int,
    level: ServiceLevel,
    features: MediaFeatures,
    estimated_duration: float,
    block_length: int,
    *,
    task_id: int = 0,
) -> Task:
    """Build a Task whose D_i (slots) is split into equal blocks of F slots."""
    if not estimated_duration > 0:
        raise InvalidArgumentError(f"estimated duration must be positive, got {estimated_duration}")
    if not block_length > 0:
        raise InvalidArgumentError(f"block length must be positive, got {block_length}")
    return Task(
        id=task_id,
        arrival_time=arrival,
        service_level=level,
        features=features,
        estimated_duration=float(estimated_duration),
        block_count=block_count(estimated_duration, block_length),
    )
