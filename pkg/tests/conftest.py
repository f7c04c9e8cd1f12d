import os

import numpy as np
import pytest

from orbicli.packages.group import preset_group
from orbicli.packages.space import circle, preset_action, sector_chart, torus
from orbicli.packages.spectral import build_mode_basis


@pytest.fixture(scope="session", autouse=True)
def temp_config(tmpdir_factory):
    # this function runs on start of test session.
    # use temporary directory for config home so user config will not be used
    os.environ["XDG_CONFIG_HOME"] = str(tmpdir_factory.mktemp("data"))


@pytest.fixture
def rng():
    return np.random.RandomState(1234)


@pytest.fixture(scope="session")
def z2_chart():
    group = preset_group("Z2")
    space = circle(8)
    return sector_chart(space, preset_action("reflection", space, group), group)


@pytest.fixture(scope="session")
def z2_modes(z2_chart):
    return build_mode_basis(z2_chart)


@pytest.fixture(scope="session")
def trivial_chart():
    group = preset_group("trivial")
    space = circle(8)
    return sector_chart(space, preset_action("identity", space, group), group)


@pytest.fixture(scope="session")
def trivial_modes(trivial_chart):
    return build_mode_basis(trivial_chart)


@pytest.fixture(scope="session")
def klein_chart():
    group = preset_group("Z2xZ2")
    space = torus(4)
    return sector_chart(space, preset_action("negate_swap", space, group), group)


@pytest.fixture(scope="session")
def klein_modes(klein_chart):
    return build_mode_basis(klein_chart)
