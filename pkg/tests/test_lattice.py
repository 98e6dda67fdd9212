import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neurochan import (
    ChannelSet,
    classify_controllability,
    enumerate_subsets,
    enumerate_supersets,
    projection_matrix,
)
from neurochan.errors import CapacityError, DomainError


# --- channel sets and projections ---------------------------------------------

def test_projection_matrix_examples():
    assert np.array_equal(projection_matrix(ChannelSet(3, (1, 2))), np.diag([1.0, 1.0, 0.0]))
    assert np.array_equal(projection_matrix(ChannelSet.full(4)), np.eye(4))
    assert np.array_equal(projection_matrix(ChannelSet.empty(3)), np.zeros((3, 3)))


def test_channel_set_rejects_bad_indices():
    with pytest.raises(DomainError):
        ChannelSet(3, (0, 1))
    with pytest.raises(DomainError):
        ChannelSet(3, (1, 4))
    with pytest.raises(DomainError):
        ChannelSet(3, (2, 2))


def test_channel_set_sorts_indices():
    assert ChannelSet(5, (4, 1, 3)).indices == (1, 3, 4)


@given(m=st.integers(1, 10), data=st.data())
def test_projection_is_idempotent(m, data):
    k = data.draw(st.integers(0, m))
    indices = tuple(data.draw(st.permutations(range(1, m + 1)))[:k])
    P = projection_matrix(ChannelSet(m, indices))
    assert np.array_equal(P @ P, P)
    assert np.trace(P) == len(indices)


def test_mask_roundtrip():
    original = ChannelSet(6, (2, 5))
    assert ChannelSet.from_mask(original.mask()) == original


# --- enumeration -----------------------------------------------------------------

def test_enumerate_pairs_of_three():
    subsets = enumerate_subsets(3, 2, 2)
    assert [s.indices for s in subsets] == [(1, 2), (1, 3), (2, 3)]


def test_enumerate_full_lattice_size():
    assert len(enumerate_subsets(3)) == 8


def test_enumerate_band_count():
    assert len(enumerate_subsets(5, 2, 3)) == math.comb(5, 2) + math.comb(5, 3)


@settings(max_examples=40)
@given(m=st.integers(0, 9), data=st.data())
def test_enumeration_order_and_count(m, data):
    k_min = data.draw(st.integers(0, m))
    k_max = data.draw(st.integers(k_min, m))
    subsets = enumerate_subsets(m, k_min, k_max)
    assert len(subsets) == sum(math.comb(m, k) for k in range(k_min, k_max + 1))
    keys = [(s.cardinality, s.indices) for s in subsets]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_enumeration_guard():
    with pytest.raises(CapacityError):
        enumerate_subsets(25)


def test_enumeration_rejects_bad_bounds():
    with pytest.raises(DomainError):
        enumerate_subsets(3, 2, 1)


def test_enumerate_supersets_of_root():
    supersets = enumerate_supersets(ChannelSet(3, (2,)))
    assert [s.indices for s in supersets] == [(2,), (1, 2), (2, 3), (1, 2, 3)]
    root = ChannelSet(3, (2,))
    assert all(root.issubset(s) for s in supersets)


# --- classification ---------------------------------------------------------------

def test_three_channel_classification_table(three_channel_plant):
    report = classify_controllability(three_channel_plant, T=1.0)
    expected = {
        (): False,
        (1,): True,
        (2,): False,
        (3,): True,
        (1, 2): True,
        (1, 3): True,
        (2, 3): True,
        (1, 2, 3): True,
    }
    assert len(report) == len(expected)
    for rec in report.records:
        assert rec.controllable == expected[rec.channels.indices], rec.channels.label()


def test_classification_of_square_identity_inputs():
    # bare (A, B) pairs are accepted; with B = I only the full set is controllable
    report = classify_controllability((np.zeros((2, 2)), np.eye(2)), T=1.0)
    for rec in report.records:
        assert rec.controllable == (rec.cardinality == 2), rec.channels.label()


def test_empty_set_never_controllable(three_channel_plant):
    report = classify_controllability(three_channel_plant, T=1.0, k_min=0, k_max=0)
    assert report.records[0].controllable is False
    assert report.records[0].gramian_min_singular_value == 0.0


def test_classification_monotone_in_channels():
    rng = np.random.default_rng(23)
    for n, m in ((2, 4), (3, 5)):
        A = rng.uniform(-1.0, 1.0, (n, n))
        B = rng.uniform(-1.0, 1.0, (n, m))
        report = classify_controllability((A, B), T=1.0)
        status = {rec.channels.indices: rec.controllable for rec in report.records}
        for small, flag in status.items():
            if not flag:
                continue
            for big in status:
                if set(small) <= set(big):
                    assert status[big], f"{small} controllable but {big} not"


def test_classification_independent_of_horizon(three_channel_plant):
    tables = []
    for T in (0.5, 1.0, 2.0):
        report = classify_controllability(three_channel_plant, T=T)
        tables.append(tuple(rec.controllable for rec in report.records))
    assert tables[0] == tables[1] == tables[2]


def test_classification_rejects_bad_horizon(three_channel_plant):
    with pytest.raises(DomainError):
        classify_controllability(three_channel_plant, T=-1.0)


def test_report_csv_columns(three_channel_plant):
    report = classify_controllability(three_channel_plant, T=1.0)
    header, rows = report.to_csv_rows()
    assert header == ["indices", "cardinality", "controllable", "gramian_min_singular_value"]
    assert len(rows) == len(report)
    assert rows[0][0] == "{}"


def test_counts_by_cardinality(three_channel_plant):
    report = classify_controllability(three_channel_plant, T=1.0)
    assert report.counts_by_cardinality() == {0: (0, 1), 1: (2, 3), 2: (3, 3), 3: (1, 1)}
