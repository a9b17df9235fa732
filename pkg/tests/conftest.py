import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hecke_sep.local_arith import make_ring

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

RING_PARAMS = [(2, 1, 1, 8), (3, 1, 1, 8), (3, 2, 1, 8), (2, 1, 2, 8)]


@pytest.fixture(params=RING_PARAMS, ids=lambda r: "ring{}-{}-{}-{}".format(*r))
def ring(request):
    return make_ring(*request.param)


@pytest.fixture
def rng():
    return random.Random(20240611)


@st.composite
def elems(draw, ring):
    return ring.elem(draw(st.lists(st.integers(0, ring.modulus - 1), min_size=ring.dim, max_size=ring.dim)))


rings_st = st.sampled_from(RING_PARAMS).map(lambda r: make_ring(*r))
