"""
Shared fixtures; statistical checks that take minutes are behind --runslow
"""

import numpy as np
import pytest

from microinit.config import build_config
from microinit.models.system import LorenzParams, MackeyGlassParams
from microinit.services.dynamics import LorenzModel, MackeyGlassModel, sample_attractor


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow statistical tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical check")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def lorenz():
    return LorenzModel(LorenzParams())


@pytest.fixture(scope="session")
def mackey_glass():
    return MackeyGlassModel(MackeyGlassParams())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def lorenz_state(lorenz):
    """A point on the Lorenz attractor"""
    return sample_attractor(lorenz, np.random.default_rng(7))


@pytest.fixture
def tiny_config():
    """Lorenz ensemble small enough to run in a few seconds"""
    return build_config(
        {
            "system": {"kind": "lorenz", "burn_in": 500},
            "observation": {"T": 8, "m": 2},
            "pipeline": {"bound_budget": 400, "refine_budget": 15, "patience": 10},
            "experiment": {
                "ensemble_size": 2,
                "prediction_window": 30,
                "stats_steps": 2000,
                "seed": 11,
            },
        }
    )


TINY_CONFIG_TEXT = """\
[system]
kind = "lorenz"
burn_in = 500

[observation]
T = 8
m = 2

[pipeline]
bound_budget = 400
refine_budget = 15
patience = 10

[experiment]
ensemble_size = 2
prediction_window = 30
stats_steps = 2000
seed = 11
"""


@pytest.fixture
def tiny_config_file(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY_CONFIG_TEXT, encoding="utf-8")
    return path
