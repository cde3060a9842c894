import os
import random

import pytest

from zcurv.cli import load, shipped

SEED = int(os.environ.get("ZCURV_SEED", "20261015"))


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def lw():
    return load(shipped("liouville_wave.json"))


@pytest.fixture(scope="session")
def burgers():
    return load(shipped("burgers.json"))
