import numpy as np
import pytest
from hypothesis import HealthCheck, settings
import hypothesis.strategies as st

from finpack.fp_core import PointSet, field_new
from finpack.groups import SL2, MatrixSet, sl2_from_index, sl2_order

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_PRIMES = [3, 5, 7, 11, 13]
primes = st.sampled_from(SMALL_PRIMES)


@st.composite
def point_sets(draw, p=None, dim=2, max_size=20, min_size=0):
    p = draw(primes) if p is None else p
    pts = draw(st.lists(st.tuples(*[st.integers(0, p - 1)] * dim), min_size=min_size, max_size=max_size))
    return PointSet(field_new(p), np.array(pts, dtype=np.int64).reshape(-1, dim), dim)


@st.composite
def sl2_sets(draw, p, max_size=30, min_size=0):
    idx = draw(st.lists(st.integers(0, sl2_order(p) - 1), min_size=min_size, max_size=max_size, unique=True))
    return MatrixSet(field_new(p), SL2, sl2_from_index(p, idx))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
