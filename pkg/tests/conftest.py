import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ilsq.problems import gen_example1

settings.register_profile(
    "ilsq",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ilsq")


@pytest.fixture(scope="session")
def example1():
    """The small dense benchmark problem (immutable, shared)."""
    return gen_example1()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
