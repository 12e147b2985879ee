from __future__ import annotations

import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from equitensor.functor import GroupSpec
from equitensor.setpartition import (
    Kind,
    enumerate_brauer_diagrams,
    enumerate_partition_diagrams,
)
from equitensor.weightmatrix import spanning_set

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GROUP_NS = {"sn": (2, 3, 4), "o": (2, 3, 4), "so": (2, 3, 4), "sp": (2, 4)}


@functools.lru_cache(maxsize=None)
def all_partitions(k: int, l: int):
    return tuple(enumerate_partition_diagrams(k, l, k + l))


@functools.lru_cache(maxsize=None)
def all_brauer(k: int, l: int):
    return tuple(enumerate_brauer_diagrams(k, l))


@functools.lru_cache(maxsize=None)
def spanning(family: str, n: int, k: int, l: int):
    return tuple(spanning_set(GroupSpec(family, n), k, l))


def spanning_up_to(family: str, n: int, max_total: int):
    for total in range(max_total + 1):
        for k in range(total + 1):
            yield from spanning(family, n, k, total - k)


@st.composite
def partition_diagrams(draw, max_k: int = 3, max_l: int = 3, k=None, l=None):
    k = draw(st.integers(0, max_k)) if k is None else k
    l = draw(st.integers(0, max_l)) if l is None else l
    return draw(st.sampled_from(all_partitions(k, l)))


@st.composite
def brauer_diagrams(draw, max_k: int = 3, max_l: int = 3, k=None, l=None):
    if k is None and l is None:
        k = draw(st.integers(0, max_k))
        l = draw(st.integers(0, max_l).filter(lambda x: (x + k) % 2 == 0))
    elif k is None:
        k = draw(st.integers(0, max_k).filter(lambda x: (x + l) % 2 == 0))
    elif l is None:
        l = draw(st.integers(0, max_l).filter(lambda x: (x + k) % 2 == 0))
    return draw(st.sampled_from(all_brauer(k, l)))


def diagrams_of(kind: Kind):
    return partition_diagrams if kind is Kind.PARTITION else brauer_diagrams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
