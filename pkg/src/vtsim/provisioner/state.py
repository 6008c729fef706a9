"""
Compact slow-timescale state: (pending value bucket, worker count, arrival-rate bucket).

Buckets are half-open [edge_j, edge_j+1); anything below the first edge or above the
last one lands in the end bucket.
"""

from __future__ import annotations

import bisect
from typing import NamedTuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class CompactState(NamedTuple):
    omega_bin: int
    m: int
    lambda_bin: int


def geometric_edges(cap: float, buckets: int) -> tuple[float, ...]:
    """0 followed by cap/2^(buckets-1), ..., cap/2."""
    return (0.0, *(cap / 2.0**j for j in range(buckets - 1, 0, -1)))


def linear_edges(lo: float, step: float, buckets: int) -> tuple[float, ...]:
    return tuple(round(lo + j * step, 12) for j in range(buckets))


class CompactBins(BaseModel):
    """Lower bucket edges for omega ($) and lambda (tasks/min), plus the worker-count cap."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    omega_edges: tuple[float, ...] = Field(default=geometric_edges(4.0, 3), min_length=1)
    lambda_edges: tuple[float, ...] = Field(default=linear_edges(0.1, 0.1, 7), min_length=1)
    m_max: int = Field(default=30, ge=1)

    @field_validator("omega_edges", "lambda_edges")
    @classmethod
    def strictly_increasing(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("bucket edges must be strictly increasing")
        return v

    @classmethod
    def build(
        cls,
        omega_cap: float = 4.0,
        omega_buckets: int = 3,
        lambda_min: float = 0.1,
        lambda_step: float = 0.1,
        lambda_buckets: int = 7,
        m_max: int = 30,
    ) -> CompactBins:
        return cls(
            omega_edges=geometric_edges(omega_cap, omega_buckets),
            lambda_edges=linear_edges(lambda_min, lambda_step, lambda_buckets),
            m_max=m_max,
        )

    @property
    def state_count(self) -> int:
        return len(self.omega_edges) * (self.m_max + 1) * len(self.lambda_edges)


def _bucket(edges: tuple[float, ...], value: float) -> int:
    return min(max(bisect.bisect_right(edges, value) - 1, 0), len(edges) - 1)


def compact(omega: float, m: int, arrival_rate_per_min: float, bins: CompactBins) -> CompactState:
    return CompactState(
        omega_bin=_bucket(bins.omega_edges, omega),
        m=min(max(m, 0), bins.m_max),
        lambda_bin=_bucket(bins.lambda_edges, arrival_rate_per_min),
    )
