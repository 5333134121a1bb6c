import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from daseinizer.contexts import basis_context, diagonal_context, generate_poset
from daseinizer.operators import Projector

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

S2 = 1 / np.sqrt(2)


@pytest.fixture
def d3():
    """D3 with its three two-block coarsenings."""
    return generate_poset([diagonal_context(3)])


@pytest.fixture
def p110():
    return Projector.onto([1, 1, 0])


@pytest.fixture
def tilted():
    """D3 together with a context that shares only e2 with it."""
    w = basis_context([[1, 0, 1], [1, 0, -1], [0, 1, 0]], "W")
    return generate_poset([diagonal_context(3), w])
