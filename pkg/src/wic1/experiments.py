"""Reusable experiment runners shared by the CLI, demos and acceptance tests."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import add_noise
from .coding import plan_gains
from .decoder import PartitionSpec, decode_stream, dispersion_bootstrap_decode, matched_filter_run
from .lyapunov import le_map_1d
from .maps import interference_map, k_factor, shift_orbit_from_digits
from .metrics import ConfusionTable, RateReport, ber, bit_errors, encoding_capacity, mutual_information, shannon_capacity
from .oscillator import (
    HybridState,
    OscParams,
    SymbolStream,
    integrate_hybrid,
    message_targets,
    sample_at_periods,
    to_unit,
    warmup_state,
)

DEFAULT_GAINS = plan_gains(2).gains


def message_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & ((1 << 64) - 1), 0x5EED])


# ---------------------------------------------------------------- discrete two-user link


@dataclass
class TwoUserStream:
    b1: np.ndarray  # user-1 bit per period
    b2: np.ndarray  # user-2 2-bit symbol per period
    u1: np.ndarray
    u2: np.ndarray
    O: np.ndarray
    gains: tuple


def two_user_stream(n_periods: int, seed: int, gains: tuple = DEFAULT_GAINS) -> TwoUserStream:
    """Exact composed samples O_n = g1 u1_n + g2 u2_n for random messages.

    Orbits are built from the digit streams directly, so the result has
    n_periods + 1 samples carrying n_periods decodable symbol pairs.
    """
    rng = message_rng(seed)
    m = n_periods + 1
    bits1 = rng.integers(0, 2, size=m + 52, dtype=np.int64)
    sym2 = rng.integers(0, 4, size=m + 25, dtype=np.int64)
    u1 = shift_orbit_from_digits(bits1, 1)[:m]
    u2 = shift_orbit_from_digits(sym2, 2)[:m]
    O = gains[0] * u1 + gains[1] * u2
    return TwoUserStream(bits1[:n_periods], sym2[:n_periods], u1, u2, O, tuple(gains))


def rate_point(snr_db: Optional[float], n_periods: int, seed: int, gains: tuple = DEFAULT_GAINS) -> RateReport:
    link = two_user_stream(n_periods, seed, gains)
    rx = add_noise(link.O, snr_db, seed)
    res = decode_stream(rx, PartitionSpec(gains)).score(link.b1, link.b2)
    i1 = mutual_information(ConfusionTable.from_pairs(link.b1, res.b1, 2))
    i2 = mutual_information(ConfusionTable.from_pairs(link.b2, res.b2, 4))
    ce = encoding_capacity([(1.0, math.log(2.0)), (2.0, math.log(2.0))], unit="bits")
    return RateReport(
        snr_db=float("inf") if snr_db is None else float(snr_db),
        info=(i1, i2),
        capacity=float("inf") if snr_db is None else shannon_capacity(snr_db),
        encoding_capacity_bits=ce,
        ber=(ber(res.err1), ber(bit_errors(link.b2, res.b2, 2))),
        extras={"symbol_errors": (int(res.err1.sum()), int(res.err2.sum())), "n_periods": n_periods},
    )


def sweep_snr(grid: Sequence[float], n_periods: int, seed: int, gains: tuple = DEFAULT_GAINS, workers: int = 4) -> list[RateReport]:
    """Rate reports over an SNR grid; point i uses seed ^ i, results in grid order."""
    jobs = [(float(snr), n_periods, int(seed) ^ i, gains) for i, snr in enumerate(grid)]
    if workers <= 1:
        return [rate_point(*j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda j: rate_point(*j), jobs))


# ---------------------------------------------------------------- continuous flows


def flow_return_map(k: int, n_periods: int, dt_divisor: int = 2000, beta_base: float = math.log(2.0)):
    """Flow samples u_n at the base clock T = 1 for a user running at f = k.

    Returns n_periods pairs (u_n, u_{n+1}) from a free-running warmed-up
    trajectory.
    """
    p = OscParams(beta_base, float(k))
    dt = p.period / dt_divisor
    init = warmup_state(p, dt=dt)
    traj = integrate_hybrid(p, None, init, float(n_periods + 1), dt)
    xn, _ = sample_at_periods(traj, p, period=1.0)
    u = to_unit(xn)[: n_periods + 1]
    return u[:-1], u[1:]


def message_trajectory(params: OscParams, signs: np.ndarray, n_periods: int, dt: Optional[float] = None):
    """Trajectory that carries ``signs`` starting on its orbit at t = 0."""
    msg = SymbolStream.from_signs(signs)
    tg = message_targets(params, msg.signs)
    return integrate_hybrid(params, msg, HybridState(tg[0], 0.0, float(msg.signs[0])), n_periods * params.period, dt)


@dataclass
class FilterRun:
    signs: np.ndarray
    clean_rate: float
    noisy_rate: float
    snr_db: float
    clean: object
    noisy: object
    traj: object


def matched_filter_experiment(n_periods: int, seed: int, snr_db: float = 20.0, warmup_periods: int = 10,
                              params: Optional[OscParams] = None) -> FilterRun:
    p = params or OscParams()
    signs = 2.0 * message_rng(seed).integers(0, 2, size=n_periods + 2) - 1.0
    traj = message_trajectory(p, signs, n_periods + 1)
    clean = matched_filter_run(traj.x, p, traj.dt, warmup_periods)
    noisy_x = add_noise(traj.x, snr_db, seed)
    noisy = matched_filter_run(noisy_x, p, traj.dt, warmup_periods)
    return FilterRun(signs, clean.match_rate(signs, warmup_periods), noisy.match_rate(signs, warmup_periods),
                     snr_db, clean, noisy, traj)


@dataclass
class DispersionRun:
    extra_delay: float
    K0: float
    sent: np.ndarray
    decoded: np.ndarray
    ambiguous: np.ndarray

    @property
    def errors(self) -> int:
        return int(np.sum(self.sent != self.decoded))


def dispersion_experiment(n_symbols: int, seed: int, extra_delay: float = 0.125, snr_db: Optional[float] = None,
                          dummy: float = 1.0, params: Optional[OscParams] = None) -> DispersionRun:
    """Send a message led by a known dummy symbol through a late direct path and decode it."""
    p = params or OscParams()
    body = 2.0 * message_rng(seed).integers(0, 2, size=n_symbols + 2) - 1.0
    signs = np.concatenate([[dummy], body])
    traj = message_trajectory(p, signs, n_symbols + 2)
    ts = p.period * np.arange(1, n_symbols + 2) - extra_delay
    r = np.interp(ts, traj.t, traj.x)
    if snr_db is not None:
        r = add_noise(r, snr_db, seed)
    K0 = k_factor(extra_delay, p)
    res = dispersion_bootstrap_decode(r, K0, dummy, p)
    sent = signs[: res.signs.size]
    return DispersionRun(extra_delay, K0, sent, res.signs, res.ambiguous)


@dataclass
class InterferenceRun:
    c: float
    le: float
    # measured intercept shift per branch, (s = -1, s = +1)
    offsets: tuple
    expected_offset: float


def interference_experiment(A: float, phi0: float, n_periods: int = 400, n_le: int = 100_000, alpha0: float = 1.0,
                            seed: int = 0, params: Optional[OscParams] = None) -> InterferenceRun:
    """Received waveform plus a same-rate sinusoidal interferer.

    The branch offset is measured from flow samples with and without the
    interferer; the map exponent is the mean log-slope along an exact
    received orbit (iterating an expanding map from one point would blow up).
    """
    p = params or OscParams()
    c = A * math.sin(phi0)
    e = math.exp(p.theta)
    signs = 2.0 * message_rng(seed).integers(0, 2, size=n_periods + 2) - 1.0
    traj = message_trajectory(p, signs, n_periods + 1)
    tn = p.period * np.arange(n_periods + 1)
    r0 = alpha0 * np.interp(tn, traj.t, traj.x)
    r1 = r0 + A * np.sin(2.0 * math.pi * p.freq * tn + phi0)
    # vertical position of each branch: r_{n+1} - e r_n
    h0 = r0[1:] - e * r0[:-1]
    h1 = r1[1:] - e * r1[:-1]
    sn = signs[:n_periods]
    offsets = tuple(float(np.mean(h1[sn == v] - h0[sn == v])) for v in (-1.0, 1.0))

    bits = message_rng(seed + 1).integers(0, 2, size=n_le + 53)
    x = 2.0 * shift_orbit_from_digits(bits, 1)[: n_le + 1] - 1.0
    sym = 2.0 * bits[: n_le + 1] - 1.0
    orbit = alpha0 * x + c
    idx = iter(range(n_le + 1))

    def map_with_slope(_r):
        i = next(idx)
        h = 1e-7
        a = interference_map(orbit[i], sym[i], c, alpha0, p)
        b = interference_map(orbit[i] + h, sym[i], c, alpha0, p)
        return a, (b - a) / h

    le = le_map_1d(map_with_slope, orbit[0], n_le).exponents[0]
    return InterferenceRun(c, le, offsets, -(e - 1.0) * c)
