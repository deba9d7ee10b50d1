import math

import pytest

from app.io.writer import ResultStore
from app.schema import DomainSpec
from app.spectral.initial import builtin_initial_condition
from app.stochastic.rng import RngStream


SEED = 20240611


@pytest.fixture
def interval():
    """(0, π): λ_n = n², φ_n = √(2/π) sin(nx)."""
    return DomainSpec.interval(math.pi)


@pytest.fixture
def sine(interval):
    return builtin_initial_condition("sine", interval)


@pytest.fixture
def square():
    return DomainSpec.box(math.pi, math.pi)


@pytest.fixture
def rng():
    return RngStream(seed=SEED).generator()


@pytest.fixture
def store(tmp_path):
    return ResultStore(tmp_path, "test")
