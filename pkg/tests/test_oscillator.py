import math

import numpy as np
import pytest
from fractions import Fraction

from wic1.errors import DomainError, InsufficientSymbols, NonFiniteState
from wic1.oscillator import (
    HybridState,
    OscParams,
    SymbolStream,
    Trajectory,
    analytic_solution,
    discrete_solution,
    integrate_hybrid,
    message_targets,
    sample_at_periods,
    to_unit,
    warmup_state,
)

LN2 = math.log(2.0)


class TestParams:
    @pytest.mark.parametrize("beta_base,freq", [(LN2, 1.0), (0.5, 2.0), (0.1, 0.25)])
    def test_derived_constants(self, beta_base, freq):
        p = OscParams(beta_base, freq)
        assert p.omega == 2 * math.pi * freq
        assert p.beta == beta_base * freq
        assert p.period * p.freq == pytest.approx(1.0, abs=1e-15)
        assert p.theta == pytest.approx(beta_base, rel=1e-15)

    @pytest.mark.parametrize("beta_base", [0.0, -0.1, 0.7, math.inf])
    def test_rejects_growth_outside_range(self, beta_base):
        with pytest.raises(DomainError):
            OscParams(beta_base, 1.0)

    def test_rejects_bad_frequency(self):
        with pytest.raises(DomainError):
            OscParams(LN2, 0.0)


def test_symbol_stream_signs_follow_bits():
    m = SymbolStream([0, 1, 1, 0])
    assert m.signs.tolist() == [-1.0, 1.0, 1.0, -1.0]
    assert SymbolStream.from_signs(m.signs).bits.tolist() == [0, 1, 1, 0]
    with pytest.raises(DomainError):
        SymbolStream([0, 2])


def test_hybrid_state_requires_unit_symbol():
    with pytest.raises(DomainError):
        HybridState(0.1, 0.0, 0.5)


class TestFreeRunning:
    def test_one_decision_per_period(self, params):
        init = warmup_state(params)
        traj = integrate_hybrid(params, None, init, 50.0)
        # every period has a period-end event and a half-period one
        assert traj.n_events in (99, 100)
        xn, sn = sample_at_periods(traj, params)
        assert xn.size == 50

    def test_symbol_is_sign_at_decision(self, params):
        traj = integrate_hybrid(params, None, warmup_state(params), 80.0)
        xn, sn = sample_at_periods(traj, params)
        assert np.all(np.sign(xn) == sn)

    def test_samples_follow_doubling_map(self, params):
        traj = integrate_hybrid(params, None, warmup_state(params), 100.0)
        u = to_unit(sample_at_periods(traj, params)[0])
        assert np.max(np.abs(u[1:] - np.mod(2 * u[:-1], 1.0))) < 1e-3

    def test_no_switch_outside_unit_band(self, params):
        # start beyond |x| = 1: events occur but s never changes
        traj = integrate_hybrid(params, None, HybridState(2.5, 0.0, 1.0), 5.0)
        assert np.all(traj.s == 1.0)
        assert traj.n_events > 0

    def test_rescaling_gives_same_symbols(self):
        slow, fast = OscParams(LN2, 1.0), OscParams(LN2, 3.0)
        init = HybridState(0.2345, 0.0, 1.0)
        a = integrate_hybrid(slow, None, init, 30.0)
        b = integrate_hybrid(fast, None, init, 10.0)
        xa, sa = sample_at_periods(a, slow)
        xb, sb = sample_at_periods(b, fast)
        assert np.array_equal(sa, sb)
        assert np.max(np.abs(to_unit(xa) - to_unit(xb))) < 1e-6

    def test_divergent_start_raises(self, params):
        with pytest.raises(NonFiniteState):
            integrate_hybrid(params, None, HybridState(1e300, 0.0, 1.0), 40.0)

    def test_dt_must_resolve_period(self, params):
        with pytest.raises(DomainError):
            integrate_hybrid(params, None, HybridState(0.1, 0.0, 1.0), 1.0, dt=0.01)


class TestMessageMode:
    def test_all_ones_never_switches(self, params):
        msg = SymbolStream(np.ones(20, dtype=int))
        traj = integrate_hybrid(params, msg, HybridState(1.0, 0.0, 1.0), 20.0)
        assert np.all(traj.s == 1.0)
        assert np.allclose(traj.x, 1.0, atol=1e-12)

    def test_sampled_symbols_equal_message(self, params, rng):
        msg = SymbolStream.random(60, rng)
        tg = message_targets(params, msg.signs)
        traj = integrate_hybrid(params, msg, HybridState(tg[0], 0.0, msg.signs[0]), 50.0)
        _, sn = sample_at_periods(traj, params)
        assert np.array_equal(sn, msg.signs[:50])
        # control nudges stay at rounding level once on the orbit
        assert traj.max_perturbation < 1e-9

    def test_short_message_rejected(self, params):
        with pytest.raises(InsufficientSymbols):
            integrate_hybrid(params, SymbolStream([1, 0]), HybridState(0.0, 0.0, 1.0), 5.0)

    def test_targets_obey_period_map(self, params, rng):
        s = 2.0 * rng.integers(0, 2, 100) - 1.0
        x = message_targets(params, s)
        assert np.allclose(x[1:], 2 * x[:-1] - s[:-1], atol=1e-12)


class TestAnalytic:
    def test_constant_symbols_fixed_point(self, params):
        msg = SymbolStream(np.ones(200, dtype=int))
        t = np.linspace(0, 50, 777)
        assert np.allclose(analytic_solution(params, msg, t), 1.0, atol=1e-15)

    def test_period_samples_match_discrete_form(self, params, rng):
        msg = SymbolStream.random(200, rng)
        x0 = analytic_solution(params, msg, 0.0)
        for n in range(21):
            assert analytic_solution(params, msg, float(n)) == pytest.approx(
                discrete_solution(params, msg, x0, n), abs=1e-10)

    def test_discrete_form_with_exact_arithmetic(self, params):
        # theta = ln 2 makes the period map x' = 2x - s exactly, so fractions give the oracle
        bits = [1, 0, 0, 1, 1, 0, 1, 0, 1, 1]
        msg = SymbolStream(bits)
        x = Fraction(3, 10)
        for n in range(len(bits)):
            x = 2 * x - (2 * bits[n] - 1)
            assert discrete_solution(params, msg, 0.3, n + 1) == pytest.approx(float(x), abs=1e-12)

    def test_agrees_with_integration(self, params, rng):
        msg = SymbolStream.random(200, rng)
        tg = message_targets(params, msg.signs)
        traj = integrate_hybrid(params, msg, HybridState(tg[0], 0.0, msg.signs[0]), 50.0, dt=1e-4)
        idx = slice(None, None, 37)
        xa = analytic_solution(params, msg, traj.t[idx])
        assert np.max(np.abs(xa - traj.x[idx])) < 1e-4

    def test_needs_enough_symbols(self, params):
        with pytest.raises(InsufficientSymbols):
            analytic_solution(params, SymbolStream(np.ones(30, dtype=int)), 1.0)


class TestSampling:
    def test_single_period_gives_one_sample(self, params):
        traj = integrate_hybrid(params, None, HybridState(0.3, 0.0, 1.0), 1.0)
        xn, sn = sample_at_periods(traj, params)
        assert xn.size == 1 and xn[0] == pytest.approx(0.3)

    def test_second_user_every_other_cycle(self):
        p2 = OscParams(LN2, 2.0)
        traj = integrate_hybrid(p2, None, warmup_state(p2), 60.0)
        u = to_unit(sample_at_periods(traj, p2, period=1.0)[0])
        assert np.max(np.abs(u[1:] - np.mod(4 * u[:-1], 1.0))) < 1e-3

    def test_empty_trajectory_rejected(self, params):
        empty = Trajectory(np.array([]), np.array([]), np.array([]), np.array([]), 0.001)
        with pytest.raises(DomainError):
            sample_at_periods(empty, params)


def test_trajectory_csv_round_trip(params, tmp_path):
    traj = integrate_hybrid(params, None, HybridState(0.3, 0.0, 1.0), 0.05)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    assert path.read_text().splitlines()[0] == "t,x,xdot,s"
    assert np.array_equal(back[:, 1], traj.x)


def test_integration_is_bit_reproducible(params):
    a = integrate_hybrid(params, None, HybridState(0.123, 0.0, 1.0), 10.0)
    b = integrate_hybrid(params, None, HybridState(0.123, 0.0, 1.0), 10.0)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.s, b.s)
