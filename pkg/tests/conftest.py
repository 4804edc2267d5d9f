import numpy as np
import pytest
from hypothesis import settings

from pfperiods import CurveSpec
from pfperiods.verify import sorted_pair_cycles

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=25)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def fixture_curve():
    """a = (4, 5, 6), h = (-7, 6); branch points -3, 1, 2, 4, 5, 6."""
    return CurveSpec((4, 5, 6), -7, 6)


@pytest.fixture(scope="session")
def fixture_e(fixture_curve):
    return fixture_curve.branch_set().points


@pytest.fixture(scope="session")
def fixture_cycles(fixture_e):
    return sorted_pair_cycles(fixture_e)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
