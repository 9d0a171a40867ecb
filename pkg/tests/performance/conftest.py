"""
Performance testing configuration and shared fixtures.

Throughput targets are loose floors meant to catch accidental
per-byte Python loops, not to benchmark hardware.
"""

import numpy as np
import pytest

from binsleuth.types import CodeSample


class PerformanceTestConfig:
    """Configuration for performance tests."""

    # Throughput floors
    MIN_FULL_FEATURIZE_MB_PER_SECOND = 20.0
    MIN_BIGRAM_MB_PER_SECOND = 5.0
    MAX_FOREST_SECONDS = 30.0

    # Workload sizes
    SAMPLE_BYTES = 4 * 1024 * 1024
    SECTION_COUNT = 8
    FRAGMENT_BYTES = 8192


@pytest.fixture(scope="session")
def perf_config():
    """Performance test configuration."""
    return PerformanceTestConfig()


@pytest.fixture(scope="session")
def large_sample(perf_config):
    """Random code spread over several sections."""
    rng = np.random.default_rng(0)
    data = rng.integers(0, 256, perf_config.SAMPLE_BYTES, dtype=np.uint8).tobytes()
    section = perf_config.SAMPLE_BYTES // perf_config.SECTION_COUNT
    return CodeSample(data=data, source_id="perf", section_lengths=(section,) * perf_config.SECTION_COUNT)


def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line(
        "markers", "performance: mark test as a performance test"
    )


def pytest_collection_modifyitems(config, items):
    """Mark every test in this directory as a performance test."""
    for item in items:
        if "performance" in str(item.fspath):
            item.add_marker(pytest.mark.performance)
