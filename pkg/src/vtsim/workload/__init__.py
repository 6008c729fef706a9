"""Task arrivals (synthetic or trace-driven) and task construction."""

from src.vtsim.workload.arrivals import EpochRangeError, diurnal_profile, sample_arrivals
from src.vtsim.workload.models import (
    ArrivalProfile,
    MediaFeatures,
    ServiceLevel,
    Task,
    TraceRecord,
)
from src.vtsim.workload.tasks import make_task
from src.vtsim.workload.trace import (
    TRACE_COLUMNS,
    TraceParseError,
    load_trace,
    scale_trace_to_rates,
    write_trace,
)

__all__ = [
    "ArrivalProfile",
    "EpochRangeError",
    "MediaFeatures",
    "ServiceLevel",
    "TRACE_COLUMNS",
    "Task",
    "TraceParseError",
    "TraceRecord",
    "diurnal_profile",
    "load_trace",
    "make_task",
    "sample_arrivals",
    "scale_trace_to_rates",
    "write_trace",
]
