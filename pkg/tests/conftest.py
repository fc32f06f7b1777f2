import numpy as np
import pytest

from dfrc_tracker.config import ScenarioConfig


@pytest.fixture
def cfg() -> ScenarioConfig:
    """Reference scenario."""
    return ScenarioConfig()


@pytest.fixture
def small_cfg() -> ScenarioConfig:
    """Reference physics with a short run, for harness tests."""
    return ScenarioConfig(trials=3, epochs=25)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
