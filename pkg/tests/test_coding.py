import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wic1.coding import bits_to_symbols, offset_bands, plan_gains, symbols_to_bits
from wic1.errors import DomainError, LengthError, Unsupported


@pytest.mark.parametrize(
    "n,zeta1,expected",
    [(2, 0.2, (0.2, 0.8)), (1, 0.2, (1.0,)), (2, 0.1, (0.2, 0.8))],
)
def test_plan_gains(n, zeta1, expected):
    plan = plan_gains(n, zeta1=zeta1)
    assert plan.gains == pytest.approx(expected, abs=1e-15)
    assert sum(plan.gains) == pytest.approx(1.0, abs=1e-15)


def test_zeta_recursion_three_users():
    plan = plan_gains(3, zeta1=1.0)
    # 1, 2^2 * 1, 2^3 * 4
    assert plan.zeta == (1.0, 4.0, 32.0)
    assert plan.gains == pytest.approx((1 / 37, 4 / 37, 32 / 37))


def test_other_ladders_rejected():
    with pytest.raises(Unsupported):
        plan_gains(2, freq_multipliers=(1, 3))
    with pytest.raises(DomainError):
        plan_gains(2, zeta1=0.0)


@pytest.mark.parametrize("bits,k,expected", [((1, 0), 2, [2]), ((0,), 1, [0]), ((1, 1, 0, 1), 2, [3, 1])])
def test_bits_to_symbols(bits, k, expected):
    assert bits_to_symbols(bits, k).tolist() == expected


@pytest.mark.parametrize("sym,k,expected", [([3], 2, [1, 1]), ([0], 1, [0]), ([2, 1], 2, [1, 0, 0, 1])])
def test_symbols_to_bits(sym, k, expected):
    assert symbols_to_bits(sym, k).tolist() == expected


def test_length_must_divide():
    with pytest.raises(LengthError):
        bits_to_symbols([1, 0, 1], 2)


def test_round_trip_random(rng):
    bits = rng.integers(0, 2, 10_000)
    for k in (1, 2, 4):
        assert np.array_equal(symbols_to_bits(bits_to_symbols(bits, k), k), bits)


@given(st.lists(st.integers(0, 1), min_size=0, max_size=64).filter(lambda b: len(b) % 2 == 0))
def test_round_trip_property(bits):
    assert symbols_to_bits(bits_to_symbols(bits, 2), 2).tolist() == bits


def test_bands_for_default_gains():
    bands = offset_bands((0.2, 0.8))
    assert [lo for lo, _ in bands] == pytest.approx([0.4 * j for j in range(8)])
    assert all(hi - lo == pytest.approx(0.2) for lo, hi in bands)
