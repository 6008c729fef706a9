import math

import numpy as np
import pytest

from src.vtsim.errors import InvalidArgumentError
from src.vtsim.workload.arrivals import EpochRangeError, diurnal_profile, sample_arrivals
from src.vtsim.workload.media import TARGET_SIZES, sample_record
from src.vtsim.workload.models import ArrivalProfile, ServiceLevel, TraceRecord
from src.vtsim.workload.tasks import block_count, make_task
from src.vtsim.workload.trace import (
    TRACE_COLUMNS,
    TraceParseError,
    load_trace,
    scale_trace_to_rates,
    write_trace,
)
from tests.conftest import features, record

HEADER = ",".join(TRACE_COLUMNS)


def _write(tmp_path, *rows: str):
    path = tmp_path / "trace.csv"
    path.write_text("\n".join((HEADER, *rows)) + "\n", encoding="utf-8")
    return path


# arrivals


def test_zero_rate_epoch_has_no_arrivals():
    profile = ArrivalProfile(rates=(0.0, 0.1), epoch_length=100)
    assert sample_arrivals(profile, 0, 1) == []


def test_arrivals_are_deterministic_per_seed():
    profile = ArrivalProfile.from_per_minute([0.5], epoch_length=1800)
    assert sample_arrivals(profile, 0, [3, 0]) == sample_arrivals(profile, 0, [3, 0])


def test_arrival_slots_sorted_within_epoch():
    profile = ArrivalProfile.from_per_minute([30.0], epoch_length=600)
    slots = sample_arrivals(profile, 0, 5)
    assert slots == sorted(slots)
    assert all(0 <= s < 600 for s in slots)


def test_mean_arrival_count_matches_poisson_mean():
    # 0.5/min over 1800 one-second slots -> 15 tasks per epoch
    profile = ArrivalProfile.from_per_minute([0.5], epoch_length=1800)
    counts = [len(sample_arrivals(profile, 0, [11, i])) for i in range(10_000)]
    assert abs(np.mean(counts) - 15.0) / 15.0 < 0.02


def test_epoch_index_out_of_range():
    profile = ArrivalProfile(rates=(0.1,), epoch_length=10)
    with pytest.raises(EpochRangeError):
        sample_arrivals(profile, 1, 0)
    with pytest.raises(IndexError):
        sample_arrivals(profile, -1, 0)


def test_diurnal_profile_spans_range():
    profile = diurnal_profile(0.1, 0.7, epochs=24, epoch_length=3600)
    per_min = profile.per_minute()
    assert len(per_min) == 24
    assert min(per_min) == pytest.approx(0.1)
    assert max(per_min) == pytest.approx(0.7)
    assert per_min.index(min(per_min)) == 4
    assert per_min.index(max(per_min)) == 16


# tasks


@pytest.mark.parametrize(
    "duration, expected",
    [(180, 1), (181, 2), (1800, 10), (0.5, 1)],
)
def test_block_count(duration, expected):
    assert block_count(duration, 180) == expected


def test_make_task_counters_start_at_zero():
    t = make_task(5, ServiceLevel.II, features(), 181.0, 180, task_id=3)
    assert (t.id, t.arrival_time, t.block_count) == (3, 5, 2)
    assert t.blocks_dispatched == 0 and t.blocks_completed == 0
    assert t.block_count * 180 >= t.estimated_duration > (t.block_count - 1) * 180


@pytest.mark.parametrize("duration, block", [(0.0, 180), (-1.0, 180), (10.0, 0)])
def test_make_task_rejects_non_positive(duration, block):
    with pytest.raises(InvalidArgumentError):
        make_task(0, ServiceLevel.I, features(), duration, block)


# trace


def test_header_only_trace_is_empty(tmp_path):
    assert load_trace(_write(tmp_path)) == []


def test_one_row_trace(tmp_path):
    path = _write(tmp_path, "12.5,2,600,2000,30,1920,1080,854,480")
    (r,) = load_trace(path)
    assert r.arrival_time_s == 12.5
    assert r.service_level is ServiceLevel.II
    assert r.features.duration_s == 600.0
    assert r.features.bitrate_kbps == 2000.0
    assert r.features.source_pixels == 1920 * 1080
    assert r.features.target_pixels == 854 * 480
    assert r.target_size == (854, 480)


def test_negative_bitrate_names_row_two(tmp_path):
    path = _write(tmp_path, "0,1,600,-5,30,1920,1080,854,480")
    with pytest.raises(TraceParseError) as exc:
        load_trace(path)
    assert exc.value.row == 2
    assert "row 2" in str(exc.value)


def test_blank_lines_keep_file_line_numbers(tmp_path):
    good, bad = "0,1,600,2000,30,1920,1080,854,480", "0,1,600,-5,30,1920,1080,854,480"
    path = _write(tmp_path, "", good, "", bad)
    with pytest.raises(TraceParseError) as exc:
        load_trace(path)
    assert exc.value.row == 5


def test_undecodable_byte_names_its_row(tmp_path):
    path = tmp_path / "trace.csv"
    good = "0,1,600,2000,30,1920,1080,854,480"
    path.write_bytes(f"{HEADER}\n{good}\n".encode() + b"\xff,1,600,2000,30,1920,1080,854,480\n")
    with pytest.raises(TraceParseError) as exc:
        load_trace(path)
    assert exc.value.row == 3
    assert "0xff" in str(exc.value)


def test_decreasing_timestamps_rejected(tmp_path):
    path = _write(
        tmp_path,
        "10,1,600,2000,30,1920,1080,854,480",
        "5,1,600,2000,30,1920,1080,854,480",
    )
    with pytest.raises(TraceParseError) as exc:
        load_trace(path)
    assert exc.value.row == 3


def test_bad_service_level_and_missing_file(tmp_path):
    with pytest.raises(TraceParseError):
        load_trace(_write(tmp_path, "0,4,600,2000,30,1920,1080,854,480"))
    with pytest.raises(TraceParseError):
        load_trace(tmp_path / "missing.csv")


def test_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(TraceParseError) as exc:
        load_trace(path)
    assert exc.value.row == 1


def test_written_trace_loads_back(tmp_path):
    rng = np.random.default_rng(0)
    records = [sample_record(rng, arrival_time_s=float(i)) for i in range(5)]
    path = write_trace(records, tmp_path / "t.csv")
    assert load_trace(path) == records


def _records_at(times: list[float]) -> list[TraceRecord]:
    return [record(t) for t in times]


def test_scale_two_buckets_maps_onto_target_range():
    # 10 requests in the first hour, 70 in the second
    times = [i * 360.0 for i in range(10)] + [3600.0 + i * (3600.0 / 70) for i in range(70)]
    profile = scale_trace_to_rates(_records_at(times), (0.1, 0.7), bucket_s=3600)
    assert profile.per_minute() == pytest.approx([0.1, 0.7])
    assert profile.epoch_length == 3600


def test_uniform_trace_gives_constant_mid_profile(caplog):
    times = [b * 600.0 + 1.0 for b in range(6)]
    profile = scale_trace_to_rates(_records_at(times), (0.1, 0.7), bucket_s=600)
    assert profile.per_minute() == pytest.approx([0.4] * 6)
    assert "constant profile" in caplog.text


def test_monotone_trace_gives_monotone_profile():
    times = []
    for bucket in range(5):
        times += [bucket * 100.0 + k * (100.0 / (bucket + 1)) for k in range(bucket + 1)]
    per_min = scale_trace_to_rates(_records_at(times), (0.1, 0.7), bucket_s=100).per_minute()
    assert per_min == sorted(per_min)
    assert all(0.1 - 1e-12 <= r <= 0.7 + 1e-12 for r in per_min)


def test_periodic_folding_averages_days():
    # two days, busy first hour both days
    times = sorted([d * 86400.0 + i for d in range(2) for i in range(0, 3600, 600)] + [90000.0])
    profile = scale_trace_to_rates(_records_at(times), (0.1, 0.7), 3600, period_s=86400)
    assert len(profile) == 24
    assert profile.per_minute()[0] == pytest.approx(0.7)


def test_scale_rejects_empty_and_inverted_range():
    with pytest.raises(TraceParseError):
        scale_trace_to_rates([], (0.1, 0.7), 3600)
    with pytest.raises(TraceParseError):
        scale_trace_to_rates(_records_at([0.0]), (0.7, 0.1), 3600)


# media


def test_sampled_records_use_known_targets():
    rng = np.random.default_rng(1)
    for _ in range(50):
        r = sample_record(rng, level_weights=(0.0, 1.0, 0.0))
        assert r.target_size in TARGET_SIZES
        assert r.service_level is ServiceLevel.II
        assert math.isfinite(r.features.duration_s) and r.features.duration_s > 0
