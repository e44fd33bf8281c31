import numpy as np
import pytest

from asymlift import build_lift
from asymlift.catalog import worked_channels
from asymlift.config import Config


@pytest.fixture(scope="session")
def config():
    return Config(samples=16, seed=20260810)


@pytest.fixture(scope="session")
def channels(config):
    return worked_channels(config)


@pytest.fixture(scope="session")
def lifts(channels, config):
    return {name: build_lift(ch, config) for name, ch in channels.items()}


@pytest.fixture()
def rng():
    return np.random.default_rng(991)
