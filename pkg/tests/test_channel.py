import math

import numpy as np
import pytest

from wic1.channel import (
    NoiseStream,
    UserPlan,
    add_noise,
    apply_dispersion,
    awgn,
    delayed,
    downlink_compose,
    measured_snr_db,
    multipath_signal,
    snr_to_sigma,
    uplink_compose,
)
from wic1.errors import CoverageError, DomainError, Unsupported
from wic1.maps import TapSet
from wic1.oscillator import HybridState, integrate_hybrid


@pytest.fixture(scope="module")
def two_trajs():
    from wic1.oscillator import OscParams

    p1, p2 = OscParams(math.log(2), 1.0), OscParams(math.log(2), 2.0)
    a = integrate_hybrid(p1, None, HybridState(0.31, 0.0, 1.0), 12.0)
    b = integrate_hybrid(p2, None, HybridState(-0.47, 0.0, -1.0), 12.0, dt=a.dt)
    return a, b


def test_direct_path_passes_through(two_trajs):
    a, _ = two_trajs
    t = a.t[::100]
    assert np.array_equal(multipath_signal(a, TapSet.direct(), t), a.x[::100])


def test_uplink_is_weighted_sum(two_trajs):
    a, b = two_trajs
    t = a.t[:: 50]
    users = [(a, UserPlan(1, 1, 1.0, 0.2), TapSet.direct()), (b, UserPlan(2, 2, 1.0, 0.8), TapSet.direct())]
    out = uplink_compose(users, None, t)
    assert np.allclose(out, 0.2 * a.x[::50] + 0.8 * b.x[::50], atol=1e-15)


def test_uplink_is_linear(two_trajs):
    a, b = two_trajs
    t = a.t[1000:5000:7]
    taps = TapSet((1.0, 0.4), (0.0, 0.5))
    ua = uplink_compose([(a, UserPlan(1), taps)], None, t)
    ub = uplink_compose([(b, UserPlan(2), taps)], None, t)
    both = uplink_compose([(a, UserPlan(1), taps), (b, UserPlan(2), taps)], None, t)
    assert np.allclose(both, ua + ub, atol=1e-14)


def test_equalizer_cancels_direct_gain(two_trajs):
    a, _ = two_trajs
    taps = TapSet.direct(0.25)
    plan = UserPlan.equalized(1, taps)
    t = a.t[::10]
    assert np.allclose(uplink_compose([(a, plan, taps)], None, t), a.x[::10], atol=1e-15)


def test_delay_outside_signal():
    from wic1.oscillator import OscParams

    a = integrate_hybrid(OscParams(), None, HybridState(0.2, 0.0, 1.0), 2.0)
    with pytest.raises(CoverageError):
        delayed(a, a.t, 0.5)


class TestNoise:
    def test_variance(self):
        x = awgn(NoiseStream(5, 0.3), 200_000)
        assert np.var(x) == pytest.approx(0.09, rel=0.05)
        # the sample mean is within a few standard errors of zero
        assert abs(np.mean(x)) < 5 * 0.3 / math.sqrt(x.size)

    def test_zero_sigma(self):
        assert np.array_equal(awgn(NoiseStream(1, 0.0), 10), np.zeros(10))

    def test_negative_sigma(self):
        with pytest.raises(DomainError):
            NoiseStream(1, -1.0)

    def test_seed_determinism(self):
        assert np.array_equal(awgn(NoiseStream(9, 1.0), 50), awgn(NoiseStream(9, 1.0), 50))
        assert not np.array_equal(awgn(NoiseStream(9, 1.0), 50), awgn(NoiseStream(10, 1.0), 50))

    @pytest.mark.parametrize("snr", [0.0, 10.0, 25.0, 40.0])
    def test_measured_snr(self, snr, rng):
        clean = rng.uniform(-1, 1, 400_000)
        noisy = add_noise(clean, snr, seed=3)
        assert measured_snr_db(clean, noisy) == pytest.approx(snr, abs=0.1)

    def test_sigma_formula(self):
        assert snr_to_sigma(20.0, 4.0) == pytest.approx(0.2)
        with pytest.raises(DomainError):
            snr_to_sigma(10.0, 0.0)

    def test_none_means_clean(self):
        x = np.arange(5.0)
        assert np.array_equal(add_noise(x, None, 1), x)


class TestDownlink:
    def test_weakest_user_matches_uplink(self):
        s1, s2 = np.linspace(-1, 1, 11), np.cos(np.arange(11.0))
        out = downlink_compose([s1, s2], (0.2, 0.8), (0.5, 0.25))
        assert np.allclose(out[1], 0.2 * s1 + 0.8 * s2, atol=1e-15)
        assert np.allclose(out[0], 2 * (0.2 * s1 + 0.8 * s2), atol=1e-15)

    def test_receivers_get_independent_noise(self):
        s = np.zeros(1000)
        out = downlink_compose([s], (1.0,), (1.0, 1.0), [NoiseStream(1, 0.1), NoiseStream(2, 0.1)])
        assert abs(np.corrcoef(out[0], out[1])[0, 1]) < 0.1

    def test_gain_count(self):
        with pytest.raises(DomainError):
            downlink_compose([np.zeros(3)], (0.5, 0.5), (1.0,))


class TestDispersion:
    def test_zero_is_identity(self, params):
        taps = TapSet((1.0, 0.3), (0.0, 1.0))
        assert apply_dispersion(taps, 0.0, params) is taps

    def test_shifts_direct_path_only(self, params):
        taps = TapSet((1.0, 0.3), (0.0, 1.0))
        assert apply_dispersion(taps, 0.125, params).taus == (0.125, 1.0)

    @pytest.mark.parametrize("extra", [1.0, 2.5])
    def test_full_period_unsupported(self, params, extra):
        with pytest.raises(Unsupported):
            apply_dispersion(TapSet.direct(), extra, params)
