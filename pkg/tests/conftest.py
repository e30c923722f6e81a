import os

import numpy as np
import pytest

from app.config import SimulationSettings, load_settings
from app.schemas.geometry import ORIGIN, Direction, UpaGeometry
from app.services.geometry import direction_between
from app.services.scenario import REFERENCE_SCENARIOS

WAVELENGTH = 3e8 / 28e9


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def bs_geom() -> UpaGeometry:
    return UpaGeometry.bs(16, 16, WAVELENGTH)


@pytest.fixture
def uav_geom() -> UpaGeometry:
    return UpaGeometry.uav(16, 16, WAVELENGTH)


@pytest.fixture
def small_uav_geom() -> UpaGeometry:
    return UpaGeometry.uav(4, 4, WAVELENGTH)


@pytest.fixture(params=sorted(REFERENCE_SCENARIOS), ids=lambda key: f"scenario{key}")
def scenario_key(request: pytest.FixtureRequest) -> int:
    return request.param


@pytest.fixture
def scenario_direction(scenario_key: int) -> Direction:
    return direction_between(ORIGIN, REFERENCE_SCENARIOS[scenario_key].position)


@pytest.fixture
def isolated_env(monkeypatch: pytest.MonkeyPatch, tmp_path):
    """Working directory without a config file and no ``UAVBT_*`` variables."""
    for key in list(os.environ):
        if key.startswith("UAVBT_"):
            monkeypatch.delenv(key)
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def settings(isolated_env) -> SimulationSettings:
    return load_settings()
