import numpy as np
import pytest

from leocov import ConstellationConfig, SystemConfig, Thresholds


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def baseline():
    """Default link budget, one shell of 50 satellites at 500 km, 0 dB thresholds."""
    return SystemConfig(ConstellationConfig.single(500e3, 50))


@pytest.fixture
def baseline_low(baseline):
    return baseline.with_(thresholds=Thresholds.common(0.1))
