"""
Shared pytest fixtures for superbunch tests.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path so we can import run_experiment and superbunch
sys.path.insert(0, str(Path(__file__).parent.parent))

from superbunch.speckle.fields import IntensityTrace, cascade_intensity_trace  # noqa: E402
from superbunch.types import CascadeSpec  # noqa: E402

TAU_C_SLOW = 2.15e-6
TAU_C_FAST = 1.08e-6


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep a developer's .env overrides out of the tests."""
    monkeypatch.delenv("SUPERBUNCH_OUTPUT_DIR", raising=False)


@pytest.fixture
def temp_output_dir(tmp_path, monkeypatch):
    """Redirect all artifact paths to a temp directory."""
    from superbunch import config, utils

    out = tmp_path / "results"
    monkeypatch.setattr(config, "OUTPUT_DIR", out)
    monkeypatch.setattr(utils, "OUTPUT_DIR", out)
    return out


@pytest.fixture
def one_stage_spec():
    """Single rotating stage with tau_c = 1.08 us."""
    return CascadeSpec.from_bandwidths([2 * math.pi / TAU_C_FAST])


@pytest.fixture
def two_stage_spec():
    """Both stages of the default cascade rotating."""
    return CascadeSpec.from_bandwidths([2 * math.pi / TAU_C_SLOW, 2 * math.pi / TAU_C_FAST])


@pytest.fixture
def unit_spec_factory():
    """Cascade of N rotating stages with tau_c = 1 us each."""
    def make(n_stages: int) -> CascadeSpec:
        return CascadeSpec.from_bandwidths([2 * math.pi / 1e-6] * n_stages)
    return make


@pytest.fixture
def constant_trace():
    """Flat intensity, 1e5 samples at 10 ns."""
    return IntensityTrace(dt=1e-8, samples=np.full(100_000, 2.5), label="constant")


@pytest.fixture
def single_stage_trace():
    """One rotating stage, tau_c = 1 us, 5000 coherence times."""
    spec = CascadeSpec.from_bandwidths([2 * math.pi / 1e-6])
    return cascade_intensity_trace(spec, duration=5e-3, dt=1e-7, modes=256, seed=11)


@pytest.fixture
def small_config_document(tmp_path):
    """
    Fast experiment config: tau_c of 1 us and 0.5 us, 20 ms of light.

    Every pipeline precondition holds (duration >= 100 tau_c, max_lag <=
    duration/100, baseline beyond 5 tau_c, rate*dt < 0.1).
    """
    return {
        "cascade": {
            "stages": [
                {"coherence_time": 1e-6, "rotating": True},
                {"coherence_time": 5e-7, "rotating": True},
            ]
        },
        "simulation": {
            "duration": 0.02,
            "dt": 5e-8,
            "modes": 64,
            "seed": 7,
            "realizations": 2000,
            "n_lags": 11,
            "lag_span": 3.0,
        },
        "detection": {
            "mean_rate": 1e6,
            "split_ratio": 0.5,
            "bin_width": 1e-7,
            "max_lag": 1.2e-5,
        },
        "fit": {
            "model": "product-2",
            "baseline_window": [8e-6, 1.2e-5],
        },
        "outputs": {
            "directory": str(tmp_path / "results"),
        },
    }


@pytest.fixture
def small_config(small_config_document):
    """Resolved ExperimentConfig for small_config_document."""
    from superbunch.pipeline.experiment import parse_config

    return parse_config(small_config_document)
