"""Shared fixtures for tailkernel tests."""

import math
import os
import tempfile

# Log files are opened at import time; keep them out of the repository
os.environ.setdefault("TAILKERNEL_LOGS_DIR", tempfile.mkdtemp(prefix="tailkernel-logs-"))

import pytest

from tailkernel.models import CensoringScheme, ParetoTypeModel, sample_censored
from tailkernel.survival import OrderedCensoredSample


@pytest.fixture(autouse=True)
def dummy_env(monkeypatch, tmp_path):
    """Point output and thread settings at harmless values."""
    monkeypatch.setenv("TAILKERNEL_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.setenv("TAILKERNEL_THREADS", "1")
    yield


@pytest.fixture
def tmp_dir(tmp_path):
    """Provide a temporary directory for file-based tests."""
    return tmp_path


@pytest.fixture
def weak_scheme():
    """Burr(1, 0.5) censored by Burr(1, 1): gamma = 1/3, p = 2/3."""
    return CensoringScheme(ParetoTypeModel.burr(1.0, 0.5), ParetoTypeModel.burr(1.0, 1.0))


@pytest.fixture
def small_sample():
    """z = (1, 2, 3), delta = (1, 0, 1)."""
    return OrderedCensoredSample.from_arrays([1.0, 2.0, 3.0], [1, 0, 1])


@pytest.fixture
def exp_sample():
    """z = (1, e, e^2), all uncensored."""
    return OrderedCensoredSample.from_arrays([1.0, math.e, math.e ** 2], [1, 1, 1])


@pytest.fixture
def random_samples(weak_scheme):
    """Twenty censored samples of size 200 with fixed seeds."""
    return [
        OrderedCensoredSample.from_sample(sample_censored(weak_scheme, 200, seed=11, replication=r))
        for r in range(20)
    ]
