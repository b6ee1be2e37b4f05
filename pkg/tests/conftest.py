import numpy as np
import pytest

from propagation.grid import ComplexWaveField, Grid1D
from solutions.families import GaussianLocalized


@pytest.fixture
def gaussian():
    """Normalizable accelerating Gaussian with omega = a = 1"""
    return GaussianLocalized(1.0, 1.0)


@pytest.fixture
def wide_grid():
    return Grid1D(-16.0, 16.0, 2048)


@pytest.fixture
def packet():
    """Factory for a real Gaussian packet exp(-(x - x0)^2 / (2 w^2)) on a grid"""
    def make(grid, x0=0.0, width=1.0, t=0.0):
        return ComplexWaveField(grid, np.exp(-(grid.x - x0) ** 2 / (2.0 * width ** 2)), t)
    return make


@pytest.fixture
def settings_path(tmp_path, monkeypatch):
    """Settings file in an empty working directory with no ACCELWAVE_* variables set"""
    monkeypatch.chdir(tmp_path)
    for name in ("ACCELWAVE_OUT", "ACCELWAVE_SCHEME", "ACCELWAVE_THREADS", "ACCELWAVE_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    return str(tmp_path / "settings.json")
