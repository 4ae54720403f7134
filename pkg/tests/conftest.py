import pathlib

import pytest

from it2fuzzy import presets

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def configs_dir() -> pathlib.Path:
    return REPO_ROOT / "configs"


@pytest.fixture(scope="session")
def t1_system():
    return presets.pendulum_t1_system()


@pytest.fixture(scope="session")
def it2_system():
    return presets.pendulum_it2_system()


@pytest.fixture(scope="session")
def it2_system_flat():
    """Zero-blur decomposed system; must behave exactly like the T1 one."""
    return presets.pendulum_it2_system(delta=0.0)
