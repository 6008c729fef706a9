import pytest

from src.vtsim.config import get_settings
from src.vtsim.workload.models import MediaFeatures, ServiceLevel, Task, TraceRecord


@pytest.fixture(autouse=True)
def _test_env(monkeypatch):
    """
    Keep tests isolated from the developer's environment.

    Marks the process as a test run, runs replications inline and drops any cached
    Settings so each test sees its own environment variables.
    """
    monkeypatch.setenv("APP_ENV", "test")
    monkeypatch.setenv("REPLICATION_WORKERS", "1")
    monkeypatch.delenv("DEFAULT_SEED", raising=False)
    monkeypatch.delenv("OUTPUT_DIR", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


class FixedEstimator:
    """Estimator returning the same transcoding time for every request."""

    def __init__(self, seconds: float) -> None:
        self.seconds = seconds

    def estimate(self, features: MediaFeatures) -> float:
        return self.seconds


def features(duration_s: float = 600.0) -> MediaFeatures:
    return MediaFeatures.from_dimensions(duration_s, 2000.0, 30.0, 1920, 1080, 854, 480)


def record(arrival_time_s: float = 0.0, level: ServiceLevel = ServiceLevel.I) -> TraceRecord:
    return TraceRecord.build(
        arrival_time_s=arrival_time_s,
        service_level=level,
        duration_s=600.0,
        bitrate_kbps=2000.0,
        framerate_fps=30.0,
        source_size=(1920, 1080),
        target_size=(854, 480),
    )


def task(
    task_id: int = 0,
    arrival: int = 0,
    blocks: int = 1,
    level: ServiceLevel = ServiceLevel.I,
    duration: float | None = None,
) -> Task:
    return Task(
        id=task_id,
        arrival_time=arrival,
        service_level=level,
        features=features(),
        estimated_duration=float(duration if duration is not None else blocks),
        block_count=blocks,
    )


@pytest.fixture
def test_settings():
    """Provide a Settings instance configured for testing."""
    from src.vtsim.config import Settings

    return Settings(app_env="test", default_seed=7, replication_workers=1, output_dir="out")
