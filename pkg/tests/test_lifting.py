import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from neurochan import (
    ChannelSet,
    Plant,
    invariant_family_dim,
    lift_invariant,
    lift_nullspace_basis,
    lift_particular,
)
from neurochan.errors import DimensionError, DomainError, InfeasibleError, RankError
from conftest import random_plant


def test_particular_lift_of_zero_drift():
    plant = Plant(np.zeros((2, 2)), [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0]])
    assert np.array_equal(lift_particular(plant), np.zeros((3, 2)))


def test_particular_lift_reproduces_drift(three_channel_plant):
    Ahat = lift_particular(three_channel_plant)
    assert np.linalg.norm(three_channel_plant.B @ Ahat - three_channel_plant.A) < 1e-12


def test_particular_lift_of_padded_identity():
    rng = np.random.default_rng(1)
    A = rng.uniform(-1.0, 1.0, (2, 2))
    plant = Plant(A, np.hstack([np.eye(2), np.zeros((2, 1))]))
    Ahat = lift_particular(plant)
    assert np.allclose(Ahat[:2], A, atol=1e-12)
    assert np.allclose(Ahat[2], 0.0, atol=1e-12)


def test_plant_rejects_narrow_or_deficient_input_matrices():
    with pytest.raises(DomainError):
        Plant(np.zeros((2, 2)), np.eye(2))
    with pytest.raises(RankError):
        Plant(np.zeros((2, 2)), [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]])


def test_nullspace_family_dimension(three_channel_plant):
    family = lift_nullspace_basis(three_channel_plant)
    assert family.dim == 2
    assert len(family.basis) == 2
    direction = np.array([1.0, 1.0, -1.0]) / math.sqrt(3.0)
    for col, E in enumerate(family.basis):
        assert np.linalg.norm(three_channel_plant.B @ E) < 1e-12
        assert abs(abs(E[:, col] @ direction) - 1.0) < 1e-12


def test_nullspace_family_dimension_formula():
    rng = np.random.default_rng(7)
    for n, m in ((2, 3), (2, 5), (3, 5)):
        family = lift_nullspace_basis(random_plant(rng, n, m))
        assert family.dim == n * (m - n)
        # Frobenius Gram matrix of the basis must be far from singular
        flat = np.array([E.ravel() for E in family.basis])
        G = flat @ flat.T
        assert np.linalg.eigvalsh(G).min() > 1e-9


def test_affine_family_members_all_solve():
    rng = np.random.default_rng(13)
    plant = random_plant(rng, 2, 5)
    family = lift_nullspace_basis(plant)
    for _ in range(100):
        F = family.element(rng.uniform(-5.0, 5.0, family.dim))
        assert np.linalg.norm(plant.B @ F - plant.A) < 1e-8


def test_family_element_checks_coefficient_count(three_channel_plant):
    family = lift_nullspace_basis(three_channel_plant)
    with pytest.raises(DimensionError):
        family.element([1.0])


def test_family_json_roundtrip(three_channel_plant):
    family = lift_nullspace_basis(three_channel_plant)
    doc = family.to_json_dict()
    assert doc["dim"] == 2
    assert np.allclose(doc["particular"], family.particular)
    assert len(doc["basis"]) == 2


def test_invariant_lift_rows_and_residual(three_channel_plant):
    channels = ChannelSet(3, (2, 3))
    Ahat = lift_invariant(three_channel_plant, channels)
    assert np.array_equal(Ahat[0], np.zeros(2))  # dropped row exactly zero
    assert np.array_equal(channels.projection() @ Ahat, Ahat)
    assert np.linalg.norm(three_channel_plant.B @ Ahat - three_channel_plant.A) < 1e-12


def test_invariant_lift_full_set_equals_particular(three_channel_plant):
    full = lift_invariant(three_channel_plant, ChannelSet.full(3))
    assert np.allclose(full, lift_particular(three_channel_plant), atol=1e-12)


def test_invariant_lift_infeasible_single_channel(three_channel_plant):
    # the middle column alone cannot span the state space
    with pytest.raises(InfeasibleError):
        lift_invariant(three_channel_plant, ChannelSet(3, (2,)))


def test_invariant_lift_checks_channel_universe(three_channel_plant):
    with pytest.raises(DimensionError):
        lift_invariant(three_channel_plant, ChannelSet(4, (1, 2)))


def test_invariant_family_dims(three_channel_plant):
    assert invariant_family_dim(three_channel_plant, 0) == 2
    assert invariant_family_dim(three_channel_plant, 1) == 0
    rng = np.random.default_rng(2)
    assert invariant_family_dim(random_plant(rng, 3, 6), 2) == 3
    with pytest.raises(DomainError):
        invariant_family_dim(three_channel_plant, 2)


@given(n=st.integers(1, 4), extra=st.integers(1, 5), k=st.integers(0, 5))
def test_invariant_family_dim_formula(n, extra, k):
    m = n + extra

    class Dims:
        pass

    dims = Dims()
    dims.n, dims.m = n, m
    if k <= m - n:
        assert invariant_family_dim(dims, k) == n * (m - n - k)
    else:
        with pytest.raises(DomainError):
            invariant_family_dim(dims, k)
