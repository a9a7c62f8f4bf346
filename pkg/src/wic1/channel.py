"""Channel models: multipath superposition, AWGN, dispersion delay, uplink/downlink."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CoverageError, DomainError, Unsupported
from .maps import TapSet
from .oscillator import OscParams, Trajectory


@dataclass(frozen=True)
class UserPlan:
    user_id: int
    freq_multiplier: int = 1
    equalizer_gain: float = 1.0
    superposition_gain: float = 1.0

    @classmethod
    def equalized(cls, user_id: int, taps: TapSet, freq_multiplier: int = 1, superposition_gain: float = 1.0):
        """Plan with gamma = 1/alpha_0 so the direct path arrives at unit gain."""
        return cls(user_id, freq_multiplier, 1.0 / taps.alphas[0], superposition_gain)


@dataclass(frozen=True)
class ChannelSpec:
    taps: tuple = field(default_factory=lambda: (TapSet.direct(),))
    snr_db: Optional[float] = None
    dispersion_extra_delay: tuple = ()
    # (amplitude, frequency, phase) of a periodic interferer
    interference: Optional[tuple] = None

    def __post_init__(self):
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise DomainError("snr_db must be finite")
        if self.interference is not None and self.interference[0] < 0:
            raise DomainError("interference amplitude must be >= 0")


@dataclass(frozen=True)
class NoiseStream:
    """Seeded Gaussian noise from a counter-based (Philox) generator."""

    seed: int
    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError("sigma must be >= 0")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=int(self.seed) & ((1 << 64) - 1)))


def awgn(noise: NoiseStream, n: int) -> np.ndarray:
    if noise.sigma == 0:
        return np.zeros(n)
    return noise.sigma * noise.generator().standard_normal(n)


def snr_to_sigma(snr_db: float, signal_power: float) -> float:
    if not signal_power > 0:
        raise DomainError("signal power must be positive")
    return math.sqrt(signal_power * 10.0 ** (-snr_db / 10.0))


def signal_power(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.mean(x * x))


def measured_snr_db(clean, noisy) -> float:
    clean = np.asarray(clean)
    return 10.0 * math.log10(signal_power(clean) / signal_power(np.asarray(noisy) - clean))


def add_noise(clean, snr_db: Optional[float], seed: int) -> np.ndarray:
    """Add AWGN scaled to ``snr_db`` relative to the empirical power of ``clean``."""
    clean = np.asarray(clean, dtype=np.float64)
    if snr_db is None:
        return clean.copy()
    sigma = snr_to_sigma(snr_db, signal_power(clean))
    return clean + awgn(NoiseStream(seed, sigma), clean.size)


def delayed(traj: Trajectory, t, tau: float) -> np.ndarray:
    """x(t - tau) by linear interpolation on the trajectory grid."""
    tq = np.asarray(t, dtype=np.float64) - tau
    slack = 1e-9 * traj.dt
    if tq.min() < traj.t[0] - slack or tq.max() > traj.t[-1] + slack:
        raise CoverageError(f"delay {tau} reaches outside the stored signal")
    return np.interp(tq, traj.t, traj.x)


def multipath_signal(traj: Trajectory, taps: TapSet, t) -> np.ndarray:
    """sum_l alpha_l x(t - tau_l)."""
    out = np.zeros(np.shape(t))
    for a, tau in zip(taps.alphas, taps.taus):
        out += a * delayed(traj, t, tau)
    return out


def uplink_compose(
    users: Sequence[tuple[Trajectory, UserPlan, TapSet]],
    noise: Optional[NoiseStream],
    t_grid,
) -> np.ndarray:
    """Signal at the base station: every user through its own paths, plus noise."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    out = np.zeros(t_grid.shape)
    for traj, plan, taps in users:
        out += plan.equalizer_gain * plan.superposition_gain * multipath_signal(traj, taps, t_grid)
    if noise is not None:
        out += awgn(noise, out.size).reshape(out.shape)
    return out


def downlink_gain(alpha0_per_user: Sequence[float]) -> float:
    """Common amplification sized for the weakest link."""
    return 1.0 / min(alpha0_per_user)


def downlink_compose(
    signals: Sequence[np.ndarray],
    gains: Sequence[float],
    alpha0_per_user: Sequence[float],
    per_user_noise: Optional[Sequence[NoiseStream]] = None,
) -> list[np.ndarray]:
    """Per-user received copies of the broadcast superposition.

    ``signals`` are the users' waveforms on a common grid; the base station
    itself is noiseless and each receiver adds its own independent noise.
    """
    if len(signals) != len(gains):
        raise DomainError("one gain per user signal")
    g_star = downlink_gain(alpha0_per_user)
    broadcast = sum(g * np.asarray(x, dtype=np.float64) for g, x in zip(gains, signals))
    out = []
    for m, a0 in enumerate(alpha0_per_user):
        rx = a0 * g_star * broadcast
        if per_user_noise is not None:
            rx = rx + awgn(per_user_noise[m], rx.size).reshape(rx.shape)
        out.append(rx)
    return out


def apply_dispersion(taps: TapSet, extra_delay: float, params: OscParams) -> TapSet:
    """Delay the direct path by ``extra_delay`` (< T) so it no longer lands on the symbol clock."""
    if extra_delay < 0:
        raise DomainError("extra delay must be non-negative")
    if extra_delay >= params.period:
        raise Unsupported("extra delays of a full period or more are not modelled")
    if extra_delay == 0:
        return taps
    return TapSet(taps.alphas, (taps.taus[0] + extra_delay,) + taps.taus[1:])
