"""Hybrid chaotic oscillator: continuous waveform, symbol control, closed form.

The flow is

    x'' - 2 beta x' + (omega**2 + beta**2) (x - s) = 0

with the discrete state s in {-1, +1} updated whenever x' = 0 and |x| < 1.
Sampled once per period the waveform obeys an expanding affine map, which
is what the rest of the package builds on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DomainError, EventMiss, InsufficientSymbols, NonFiniteState

LN2 = math.log(2.0)


@dataclass(frozen=True)
class OscParams:
    """Oscillator constants.

    ``beta_base`` is the growth per period (nepits), ``freq`` the symbol
    rate; everything else is derived.
    """

    beta_base: float = LN2
    freq: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.beta_base <= LN2 * (1 + 1e-15)):
            raise DomainError(f"beta_base must lie in (0, ln 2], got {self.beta_base}")
        if not (self.freq > 0.0 and math.isfinite(self.freq)):
            raise DomainError(f"freq must be positive, got {self.freq}")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.freq

    @property
    def beta(self) -> float:
        return self.beta_base * self.freq

    @property
    def period(self) -> float:
        return 1.0 / self.freq

    @property
    def stiffness(self) -> float:
        """omega**2 + beta**2, the restoring constant."""
        return self.omega**2 + self.beta**2

    @property
    def theta(self) -> float:
        """Log-slope of the return map, beta / f."""
        return self.beta / self.freq

    @property
    def default_dt(self) -> float:
        return self.period / 2000


@dataclass(frozen=True)
class SymbolStream:
    """Binary message b_n with its antipodal form s_n = 2 b_n - 1."""

    bits: np.ndarray
    period_index_offset: int = 0

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.int8).ravel()
        if b.size and not np.all((b == 0) | (b == 1)):
            raise DomainError("bits must be 0 or 1")
        object.__setattr__(self, "bits", b)

    @classmethod
    def from_signs(cls, signs, period_index_offset: int = 0) -> "SymbolStream":
        s = np.asarray(signs).ravel()
        if s.size and not np.all(np.abs(s) == 1):
            raise DomainError("signs must be -1 or +1")
        return cls(((s + 1) // 2).astype(np.int8), period_index_offset)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "SymbolStream":
        return cls(rng.integers(0, 2, size=n, dtype=np.int8))

    @property
    def signs(self) -> np.ndarray:
        return 2.0 * self.bits.astype(np.float64) - 1.0

    def __len__(self) -> int:
        return self.bits.size


@dataclass(frozen=True)
class HybridState:
    x: float
    xdot: float
    s: float
    t: float = 0.0

    def __post_init__(self):
        if self.s not in (-1.0, 1.0):
            raise DomainError(f"s must be -1 or +1, got {self.s}")


@dataclass
class Trajectory:
    """Dense uniformly sampled solution."""

    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    s: np.ndarray
    dt: float
    # largest control nudge applied at a guard event (message mode only)
    max_perturbation: float = 0.0
    n_events: int = 0
    extras: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.t.size

    @property
    def final_state(self) -> HybridState:
        return HybridState(float(self.x[-1]), float(self.xdot[-1]), float(self.s[-1]), float(self.t[-1]))

    def to_csv(self, path) -> None:
        data = np.column_stack([self.t, self.x, self.xdot, self.s])
        np.savetxt(path, data, delimiter=",", fmt="%.17g", header="t,x,xdot,s", comments="")


def message_targets(params: OscParams, signs: np.ndarray) -> np.ndarray:
    """Period-start values x_n of the orbit that carries ``signs``.

    x_n = (1 - q) sum_i s_{n+i} q**i with q = exp(-beta/f); the stream is
    treated as followed by zeros.
    """
    q = math.exp(-params.theta)
    s = np.asarray(signs, dtype=np.float64)
    out = np.empty(s.size)
    acc = 0.0
    for n in range(s.size - 1, -1, -1):
        acc = (1.0 - q) * s[n] + q * acc
        out[n] = acc
    return out


def integrate_hybrid(
    params: OscParams,
    msg: Optional[SymbolStream],
    init: HybridState,
    duration: float,
    dt: Optional[float] = None,
) -> Trajectory:
    """Integrate the hybrid flow with RK4 and bisection-refined guard events.

    Free-running when ``msg`` is None. Otherwise each guard event falling in
    period n sets s to the n-th message sign and nudges x onto the orbit
    point that carries the message (control by small perturbation); without
    the nudge rounding errors would double every period.
    """
    if dt is None:
        dt = params.default_dt
    if not duration > 0:
        raise DomainError("duration must be positive")
    if dt > params.period / 200 * (1 + 1e-12):
        raise DomainError(f"dt={dt} exceeds T/200")
    n_steps = int(round(duration / dt))
    if msg is not None:
        need = math.ceil(duration / params.period - 1e-9)
        if len(msg) < need:
            raise InsufficientSymbols(f"message has {len(msg)} symbols, {need} needed")
        syms = msg.signs
        targets = message_targets(params, syms)
        # message time origin is the trajectory start
        freq_t0 = init.t
    else:
        syms = np.empty(0)
        targets = np.empty(0)
        freq_t0 = init.t
    xs, vs, ss, status, at, max_pert, n_ev = _kernels.hybrid_integrate(
        float(init.x), float(init.xdot), float(init.s), params.beta, params.stiffness,
        params.freq, float(dt), n_steps, syms, targets,
    )
    if status == _kernels.STATUS_NONFINITE:
        raise NonFiniteState(f"state overflowed at step {at}")
    if status == _kernels.STATUS_EVENT_MISS:
        raise EventMiss(f"guard events crowded into step {at}; reduce dt")
    t = freq_t0 + dt * np.arange(n_steps + 1)
    return Trajectory(t, xs, vs, ss, float(dt), max_perturbation=max_pert, n_events=n_ev)


def warmup_state(params: OscParams, periods: int = 500, dt: Optional[float] = None) -> HybridState:
    """Free-run from (0.1, 0, +1) and return a period-start state at t = 0."""
    traj = integrate_hybrid(params, None, HybridState(0.1, 0.0, 1.0), periods * params.period, dt)
    x = float(traj.x[-1])
    return HybridState(x, 0.0, 1.0 if x >= 0 else -1.0, 0.0)


def analytic_solution(params: OscParams, symbols: SymbolStream, t, truncation: Optional[int] = None):
    """Closed-form x(t) of the orbit carrying ``symbols`` (from t = 0).

    The neglected tail of the symbol series is bounded by
    exp(-truncation * beta / f).
    """
    if truncation is None:
        truncation = max(60, math.ceil(40.0 / params.beta_base))
    t = np.asarray(t, dtype=np.float64)
    n = np.floor(params.freq * t + 1e-12).astype(np.int64)
    if np.any(n < 0):
        raise DomainError("t must be non-negative")
    s = symbols.signs
    if n.max(initial=0) + truncation >= s.size:
        raise InsufficientSymbols(
            f"need {int(n.max(initial=0)) + truncation + 1} symbols, stream has {s.size}"
        )
    q = math.exp(-params.theta)
    weights = q ** np.arange(truncation + 1)
    windows = np.lib.stride_tricks.sliding_window_view(s, truncation + 1)
    xn = (1.0 - q) * (windows[n] @ weights)
    sn = s[n]
    tau = t - n * params.period
    b, w = params.beta, params.omega
    out = sn + (xn - sn) * np.exp(b * tau) * (np.cos(w * tau) - (b / w) * np.sin(w * tau))
    return out if out.ndim else float(out)


def discrete_solution(params: OscParams, symbols: SymbolStream, x0: float, n: int) -> float:
    """x_n = e^{n theta} (x_0 - (1 - e^{-theta}) sum_{i<n} s_i e^{-i theta})."""
    s = symbols.signs
    if n > s.size:
        raise InsufficientSymbols(f"need {n} symbols")
    q = math.exp(-params.theta)
    acc = np.sum(s[:n] * q ** np.arange(n))
    return math.exp(n * params.theta) * (x0 - (1.0 - q) * acc)


def sample_at_periods(traj: Trajectory, params: OscParams, period: Optional[float] = None):
    """Values x(nT) and the symbol active on each sampled period.

    ``period`` defaults to the oscillator's own T; pass another user's
    period to sample at that clock. The returned symbol is read half an
    own-period after each sampling instant.
    """
    if len(traj) == 0:
        raise DomainError("empty trajectory")
    T = params.period if period is None else float(period)
    t0, t1 = traj.t[0], traj.t[-1]
    eps = 1e-9 * T
    n_first = math.ceil(t0 / T - 1e-9)
    n_last = math.floor((t1 + eps) / T) - 1
    if n_last < n_first:
        raise DomainError("trajectory shorter than one period")
    ts = T * np.arange(n_first, n_last + 1)
    xn = np.interp(ts, traj.t, traj.x)
    idx = np.clip(np.rint((ts + 0.5 * params.period - t0) / traj.dt).astype(np.int64), 0, len(traj) - 1)
    return xn, traj.s[idx].copy()


def to_unit(x):
    """Rescale from [-1, 1] to [0, 1]."""
    return (np.asarray(x) + 1.0) / 2.0
