from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from equitensor.category import identity_diagram
from equitensor.errors import OddDimensionError, ShapeError
from equitensor.fastmult import apply_weight_matrix
from equitensor.functor import GroupSpec, equivariance_residual, sample_group_element
from equitensor.setpartition import Kind, make_partition
from equitensor.weightmatrix import WeightMatrix, init_weights, materialize, spanning_set, spanning_set_size

from conftest import GROUP_NS


def test_spanning_set_examples():
    assert len(spanning_set(GroupSpec("sn", 2), 1, 1)) == 2
    assert len(spanning_set(GroupSpec("o", 3), 2, 2)) == 3
    so = spanning_set(GroupSpec("so", 2), 1, 1)
    assert [d.kind for d in so] == [Kind.BRAUER, Kind.BRAUER_GROOD]
    with pytest.raises(OddDimensionError):
        spanning_set(GroupSpec("sp", 3), 1, 1)


def test_spanning_set_sizes():
    for family, ns in GROUP_NS.items():
        for n in ns:
            group = GroupSpec(family, n)
            for k in range(4):
                for l in range(4):
                    assert len(spanning_set(group, k, l)) == spanning_set_size(group, k, l)


def test_init_schemes():
    group = GroupSpec("sn", 2)
    ds = spanning_set(group, 1, 1)
    assert np.array_equal(init_weights(ds, group, "zeros").lambdas, [0.0, 0.0])
    w = init_weights(ds, group, "constant", constant=1.0)
    assert np.array_equal(materialize(w).entries, np.eye(2) + np.ones((2, 2)))
    a = init_weights(ds, group, "uniform", seed=3, low=-2, high=2).lambdas
    b = init_weights(ds, group, "uniform", seed=3, low=-2, high=2).lambdas
    assert np.array_equal(a, b) and np.all((a >= -2) & (a < 2))
    with pytest.raises(ValueError):
        init_weights(ds, group, "gaussian")


def test_materialize_examples():
    group = GroupSpec("sn", 3)
    w = WeightMatrix(group, 1, 1, [(2.0, make_partition(1, 1, [[1, 2]]))])
    assert np.array_equal(materialize(w).entries, 2 * np.eye(3))
    full = init_weights(spanning_set(GroupSpec("sn", 2), 1, 1), GroupSpec("sn", 2), "constant")
    assert np.array_equal(materialize(full).entries, [[2, 1], [1, 2]])
    empty = WeightMatrix(GroupSpec("o", 2), 2, 1, [])
    assert np.array_equal(materialize(empty).entries, np.zeros((2, 4)))


def test_weight_matrix_validation():
    group = GroupSpec("o", 2)
    with pytest.raises(ShapeError):
        WeightMatrix(group, 2, 2, [(1.0, identity_diagram(1))])
    with pytest.raises(ValueError):
        WeightMatrix(group, 1, 1, [(1.0, identity_diagram(1)), (2.0, identity_diagram(1))])


@pytest.mark.parametrize("family", ["sn", "o", "so", "sp"])
@given(seed=st.integers(0, 10**6), k=st.integers(0, 3), l=st.integers(0, 3))
def test_fast_equals_dense(family, seed, k, l):
    n = 2 if family == "sp" else 3
    group = GroupSpec(family, n)
    w = init_weights(spanning_set(group, k, l), group, "uniform", seed=seed, k=k, l=l)
    v = np.random.default_rng(seed).standard_normal((n,) * k)
    fast = apply_weight_matrix(w, v).flat
    dense = materialize(w).entries @ v.reshape(-1)
    assert np.max(np.abs(fast - dense), initial=0.0) <= 1e-10


@pytest.mark.parametrize("family,n", [("sn", 3), ("o", 3), ("so", 3), ("sp", 4)])
def test_assembled_layer_equivariant(family, n):
    group = GroupSpec(family, n)
    for k, l in [(1, 1), (2, 1), (2, 2), (1, 3)]:
        w = init_weights(spanning_set(group, k, l), group, "uniform", seed=k + 10 * l, k=k, l=l)
        m = materialize(w).entries
        for s in range(5):
            g = sample_group_element(group, s)
            assert equivariance_residual(m, g, k, l) <= 1e-12


@pytest.mark.parametrize("family,n", [("sn", 3), ("so", 3), ("sp", 4)])
def test_serialization_round_trip(family, n):
    group = GroupSpec(family, n)
    w = init_weights(spanning_set(group, 2, 2), group, "uniform", seed=1)
    text = w.to_json()
    assert json.loads(text)["format"] == 1
    back = WeightMatrix.from_json(text)
    assert back == w
