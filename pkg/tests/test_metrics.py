import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wic1.errors import EmptyTable
from wic1.metrics import (
    ConfusionTable,
    ber,
    bit_errors,
    encoding_capacity,
    entropy,
    mutual_information,
    shannon_capacity,
)


@pytest.mark.parametrize(
    "counts,expected",
    [
        (np.diag([50, 50]), 1.0),
        (np.diag([25, 25, 25, 25]), 2.0),
        (np.full((2, 2), 25), 0.0),
        (np.array([[50, 0], [50, 0]]), 0.0),
    ],
)
def test_mutual_information_cases(counts, expected):
    assert mutual_information(ConfusionTable(counts)) == pytest.approx(expected, abs=1e-12)


def test_small_table_rejected():
    with pytest.raises(EmptyTable):
        mutual_information(ConfusionTable(np.diag([10, 10])))


def test_from_pairs():
    t = ConfusionTable.from_pairs([0, 1, 1, 2], [0, 1, 2, 2], 3)
    assert t.counts.tolist() == [[1, 0, 0], [0, 1, 1], [0, 0, 1]]
    assert t.total == 4


@settings(max_examples=100)
@given(arrays(np.int64, (4, 4), elements=st.integers(0, 60)).filter(lambda c: c.sum() >= 100))
def test_mi_bounded_by_marginal_entropies(counts):
    t = ConfusionTable(counts)
    p = counts / counts.sum()
    mi = mutual_information(t)
    assert -1e-12 <= mi <= min(entropy(p.sum(1)), entropy(p.sum(0))) + 1e-12


@pytest.mark.parametrize("snr,expected", [(0.0, 0.5), (40.0, 0.5 * math.log2(10_001))])
def test_shannon_capacity(snr, expected):
    assert shannon_capacity(snr) == pytest.approx(expected, rel=1e-12)


def test_capacity_40db_value():
    assert shannon_capacity(40.0) == pytest.approx(6.644, abs=5e-4)


def test_capacity_monotone():
    c = [shannon_capacity(s) for s in np.arange(-10, 60, 0.5)]
    assert np.all(np.diff(c) > 0)


def test_encoding_capacity_two_users():
    users = [(1.0, math.log(2)), (2.0, math.log(2))]
    assert encoding_capacity(users, "bits") == pytest.approx(3.0, abs=1e-14)
    assert encoding_capacity(users) == pytest.approx(3 * math.log(2))
    with pytest.raises(ValueError):
        encoding_capacity(users, "bogus")


def test_ber():
    assert ber([0, 0, 1, 1]) == 0.5
    assert ber(np.zeros(10)) == 0.0
    with pytest.raises(EmptyTable):
        ber([])


def test_bit_errors_per_bit():
    # 3 -> 0 flips both bits, 2 -> 3 flips the low bit
    assert bit_errors([3, 2, 1], [0, 3, 1], 2).tolist() == [True, True, False, True, False, False]
