# tests/conftest.py
import json
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from icregions.config.families import Family
from icregions.core.channel import ChannelSpec, degenerate_spec

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile(
    "dev",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.getenv("ICREGIONS_HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def noiseless():
    return ChannelSpec.noiseless(2)


@pytest.fixture
def trivial_crng():
    """Uniform binary inputs, constant auxiliaries, Z_ii = X_i."""
    return degenerate_spec(Family.CRNG, 2)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write
