"""
Request trace CSV: parsing, writing, and scaling to an arrival-rate profile.

Header (required, in this order):
  arrival_time_s,service_level,duration_s,bitrate_kbps,framerate_fps,
  src_width,src_height,dst_width,dst_height
Row numbers in errors are file line numbers; the header is row 1 and blank lines count.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Iterator
from pathlib import Path

from pydantic import ValidationError

from src.vtsim.errors import VtsimError
from src.vtsim.logging_config import get_logger
from src.vtsim.workload.models import ArrivalProfile, ServiceLevel, TraceRecord

logger = get_logger(__name__)

TRACE_COLUMNS = (
    "arrival_time_s",
    "service_level",
    "duration_s",
    "bitrate_kbps",
    "framerate_fps",
    "src_width",
    "src_height",
    "dst_width",
    "dst_height",
)


class TraceParseError(VtsimError, ValueError):
    """Malformed trace file; `row` is the 1-based file line (header is row 1)."""

    def __init__(self, message: str, row: int | None = None) -> None:
        self.row = row
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(prefix + message)


def _dimension(raw: str, column: str, row: int) -> int:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise TraceParseError(f"{column}={raw!r} is not a number", row) from None
    if not value.is_integer() or value <= 0:
        raise TraceParseError(f"{column}={raw!r} must be a positive integer", row)
    return int(value)


def _number(raw: str, column: str, row: int) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise TraceParseError(f"{column}={raw!r} is not a number", row) from None
    if not math.isfinite(value):
        raise TraceParseError(f"{column}={raw!r} is not finite", row)
    return value


def parse_record(row: dict[str, str], row_no: int) -> TraceRecord:
    """Validate one CSV row into a TraceRecord."""
    if None in row or any(row.get(c) is None for c in TRACE_COLUMNS):
        raise TraceParseError("wrong number of fields", row_no)
    level_raw = row["service_level"].strip()
    try:
        level = ServiceLevel(level_raw)
    except ValueError:
        raise TraceParseError(f"service_level={level_raw!r} not in {{1,2,3}}", row_no) from None
    try:
        return TraceRecord.build(
            arrival_time_s=_number(row["arrival_time_s"], "arrival_time_s", row_no),
            service_level=level,
            duration_s=_number(row["duration_s"], "duration_s", row_no),
            bitrate_kbps=_number(row["bitrate_kbps"], "bitrate_kbps", row_no),
            framerate_fps=_number(row["framerate_fps"], "framerate_fps", row_no),
            source_size=(
                _dimension(row["src_width"], "src_width", row_no),
                _dimension(row["src_height"], "src_height", row_no),
            ),
            target_size=(
                _dimension(row["dst_width"], "dst_width", row_no),
                _dimension(row["dst_height"], "dst_height", row_no),
            ),
        )
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "row"
        raise TraceParseError(f"{field}: {first['msg']}", row_no) from None


def _decoded_lines(raw_lines: Iterable[bytes]) -> Iterator[str]:
    for line_no, raw in enumerate(raw_lines, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as e:
            message = f"byte {raw[e.start]:#04x} is not valid UTF-8"
            raise TraceParseError(message, line_no) from None


def read_rows(path: str | Path, extra_columns: tuple[str, ...] = ()) -> list[tuple[int, dict]]:
    """Read a CSV with the trace header (plus `extra_columns`) into (line number, row) pairs."""
    path = Path(path)
    if not path.exists():
        raise TraceParseError(f"file not found: {path}")
    with path.open("rb") as f:
        reader = csv.DictReader(_decoded_lines(f))
        header = tuple(h.strip() for h in (reader.fieldnames or ()))
        expected = TRACE_COLUMNS + extra_columns
        if header != expected:
            raise TraceParseError(f"header must be {','.join(expected)}", 1)
        reader.fieldnames = list(header)
        # line_num counts skipped blank lines too
        return [(reader.line_num, row) for row in reader]


def load_trace(path: str | Path) -> list[TraceRecord]:
    """Parse a trace CSV. Timestamps must be non-decreasing."""
    records: list[TraceRecord] = []
    last = -math.inf
    for row_no, row in read_rows(path):
        record = parse_record(row, row_no)
        if record.arrival_time_s < last:
            raise TraceParseError(
                f"arrival_time_s {record.arrival_time_s} precedes previous {last}", row_no
            )
        last = record.arrival_time_s
        records.append(record)
    logger.debug(f"Loaded {len(records)} trace records from {path}")
    return records


def record_to_row(record: TraceRecord) -> list:
    f = record.features
    return [
        record.arrival_time_s,
        record.service_level.value,
        f.duration_s,
        f.bitrate_kbps,
        f.framerate_fps,
        *record.source_size,
        *record.target_size,
    ]


def write_trace(records: list[TraceRecord], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in records:
            writer.writerow(record_to_row(record))
    return path


def scale_trace_to_rates(
    records: list[TraceRecord],
    target_range: tuple[float, float],
    bucket_s: float,
    slot_seconds: int = 1,
    period_s: float | None = None,
) -> ArrivalProfile:
    """
    Bucket a trace and map its per-bucket rates affinely onto `target_range` (per minute).

    The lowest bucket rate maps to min and the highest to max. With `period_s` set
    (86400 for a daily cycle) buckets are folded modulo the period and averaged over the
    periods the trace spans, giving e.g. 24 hour-of-day rates.
    """
    lo, hi = target_range
    if not records:
        raise TraceParseError("cannot scale an empty trace")
    if not lo < hi:
        raise TraceParseError(f"target range min {lo} must be below max {hi}")
    if bucket_s <= 0 or bucket_s % slot_seconds:
        raise TraceParseError(f"bucket {bucket_s}s must be a positive multiple of the slot")

    last = records[-1].arrival_time_s
    if period_s is None:
        n_buckets = int(last // bucket_s) + 1
        n_periods = 1
    else:
        n_buckets = max(1, math.ceil(period_s / bucket_s))
        n_periods = int(last // period_s) + 1

    counts = [0] * n_buckets
    for r in records:
        t = r.arrival_time_s if period_s is None else r.arrival_time_s % period_s
        counts[min(int(t // bucket_s), n_buckets - 1)] += 1

    per_min = [c / n_periods / bucket_s * 60.0 for c in counts]
    r_min, r_max = min(per_min), max(per_min)
    if r_max == r_min:
        logger.warning(
            f"Trace buckets all carry {r_min:.4f}/min; emitting constant profile at {(lo + hi) / 2}"
        )
        scaled = [(lo + hi) / 2.0] * n_buckets
    else:
        span = (hi - lo) / (r_max - r_min)
        scaled = [min(hi, max(lo, lo + (r - r_min) * span)) for r in per_min]
    return ArrivalProfile.from_per_minute(scaled, int(bucket_s // slot_seconds), slot_seconds)
