import os

import pytest
from hypothesis import HealthCheck, settings

from subquantum.model import GridSpec, PhysicalParams, ScenarioConfig, SlitSpec, validate_scenario

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def double_slit(params):
    """Small symmetric double slit, cheap enough for per-test grids."""
    slits = (SlitSpec(3.0, 0.5), SlitSpec(-3.0, 0.5))
    return validate_scenario(ScenarioConfig(params, slits, GridSpec(-30.0, 30.0, 601, 2.0, 100),
                                            outputs=("density", "trajectories")))
