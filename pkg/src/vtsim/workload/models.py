"""Workload value types: media features, tasks, arrival profiles, trace records."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat, PositiveInt


class ServiceLevel(str, enum.Enum):
    """Service level; values are the trace CSV encoding."""

    I = "1"  # noqa: E741
    II = "2"
    III = "3"


class MediaFeatures(BaseModel):
    """Raw inputs of the transcoding-time estimator for one source/target pair."""

    model_config = ConfigDict(frozen=True)

    duration_s: PositiveFloat
    bitrate_kbps: PositiveFloat
    framerate_fps: PositiveFloat
    source_pixels: PositiveInt
    target_pixels: PositiveInt

    @classmethod
    def from_dimensions(
        cls,
        duration_s: float,
        bitrate_kbps: float,
        framerate_fps: float,
        src_width: int,
        src_height: int,
        dst_width: int,
        dst_height: int,
    ) -> MediaFeatures:
        return cls(
            duration_s=duration_s,
            bitrate_kbps=bitrate_kbps,
            framerate_fps=framerate_fps,
            source_pixels=src_width * src_height,
            target_pixels=dst_width * dst_height,
        )

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        """Estimator input order: duration, bitrate, framerate, source px, target px."""
        return (
            self.duration_s,
            self.bitrate_kbps,
            self.framerate_fps,
            float(self.source_pixels),
            float(self.target_pixels),
        )


@dataclass(slots=True)
class Task:
    """One transcoding request. Times are in slots."""

    id: int
    arrival_time: int
    service_level: ServiceLevel
    features: MediaFeatures
    estimated_duration: float
    block_count: int
    blocks_dispatched: int = 0
    blocks_completed: int = 0

    @property
    def started(self) -> bool:
        return self.blocks_dispatched > 0

    @property
    def fully_dispatched(self) -> bool:
        return self.blocks_dispatched >= self.block_count

    @property
    def completed(self) -> bool:
        return self.blocks_completed >= self.block_count

    @property
    def remaining_blocks(self) -> int:
        """Blocks not yet dispatched."""
        return self.block_count - self.blocks_dispatched


class ArrivalProfile(BaseModel):
    """Per-epoch arrival rates (tasks per slot) and the epoch length in slots."""

    model_config = ConfigDict(frozen=True)

    rates: tuple[NonNegativeFloat, ...] = Field(min_length=1)
    epoch_length: PositiveInt

    @classmethod
    def from_per_minute(
        cls, rates_per_min: list[float], epoch_length: int, slot_seconds: int = 1
    ) -> ArrivalProfile:
        return cls(
            rates=tuple(r * slot_seconds / 60.0 for r in rates_per_min),
            epoch_length=epoch_length,
        )

    def __len__(self) -> int:
        return len(self.rates)

    def rate_per_minute(self, epoch_index: int, slot_seconds: int = 1) -> float:
        return self.rates[epoch_index] * 60.0 / slot_seconds

    def per_minute(self, slot_seconds: int = 1) -> list[float]:
        return [r * 60.0 / slot_seconds for r in self.rates]


class TraceRecord(BaseModel):
    """One row of a request trace. Frame sizes are kept so the row can be written back."""

    model_config = ConfigDict(frozen=True)

    arrival_time_s: NonNegativeFloat
    service_level: ServiceLevel
    features: MediaFeatures
    source_size: tuple[PositiveInt, PositiveInt]
    target_size: tuple[PositiveInt, PositiveInt]

    @classmethod
    def build(
        cls,
        arrival_time_s: float,
        service_level: ServiceLevel,
        duration_s: float,
        bitrate_kbps: float,
        framerate_fps: float,
        source_size: tuple[int, int],
        target_size: tuple[int, int],
    ) -> TraceRecord:
        features = MediaFeatures.from_dimensions(
            duration_s, bitrate_kbps, framerate_fps, *source_size, *target_size
        )
        return cls(
            arrival_time_s=arrival_time_s,
            service_level=service_level,
            features=features,
            source_size=source_size,
            target_size=target_size,
        )
