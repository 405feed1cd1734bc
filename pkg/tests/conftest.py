from types import SimpleNamespace

import numpy as np
import pytest

from plurihull.config import TOLERANCES
from plurihull.core import builtin_phi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cos_phi():
    return builtin_phi("cos", 256)


@pytest.fixture
def run_conf(tmp_path):
    """Build a finalized-looking run config without touching the filesystem checks."""

    def _build(**values):
        defaults = {
            "command": "extend",
            "input": "builtin:cos",
            "N": 64,
            "degrees": [2],
            "points": [0.5 + 0j],
            "lambdas": ["extend"],
            "w_grid": [],
            "radii": [0.3, 0.5, 0.7],
            "n_theta": 2,
            "annulus": None,
            "set": "circle",
            "output": str(tmp_path / "out"),
            "tolerances": dict(TOLERANCES),
            "threads": 1,
            "phase_count": 64,
            "seed": 0,
            "config_version": 1,
        }
        defaults.update(values)
        return SimpleNamespace(**defaults)

    return _build
