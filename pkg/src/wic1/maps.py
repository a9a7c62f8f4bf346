"""Exact once-per-period return maps and their inverses."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CoverageError, DomainError
from .oscillator import OscParams


@dataclass(frozen=True)
class MapState:
    value: float
    coordinate: str = "unit"

    def __post_init__(self):
        lo = 0.0 if self.coordinate == "unit" else -1.0
        if self.coordinate not in ("unit", "signed") or not lo <= self.value <= 1.0:
            raise DomainError(f"{self.value} outside the {self.coordinate} interval")


@dataclass(frozen=True)
class TapSet:
    """Propagation paths as (gain, delay) pairs, direct path first."""

    alphas: tuple
    taus: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.alphas)
        t = tuple(float(v) for v in self.taus)
        if len(a) != len(t) or not a:
            raise DomainError("need one delay per gain and at least one tap")
        if any(v <= 0 for v in a):
            raise DomainError("tap gains must be positive")
        if t[0] < 0 or any(t1 <= t0 for t0, t1 in zip(t, t[1:])):
            raise DomainError("delays must be non-negative and strictly increasing")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "taus", t)

    @classmethod
    def direct(cls, alpha: float = 1.0) -> "TapSet":
        return cls((alpha,), (0.0,))

    def __len__(self) -> int:
        return len(self.alphas)


def shift_map(u: float, k: int = 1) -> tuple[float, int]:
    if not 0.0 <= u < 1.0:
        raise DomainError(f"u={u} outside [0, 1)")
    if k < 1:
        raise DomainError("k must be >= 1")
    v = (1 << k) * u
    b = math.floor(v)
    return v - b, b


def direct_path_map(r: float, s: float, params: OscParams) -> float:
    e = math.exp(params.theta)
    return e * (r - (1.0 - 1.0 / e) * s)


def k_factor(tau: float, params: OscParams) -> float:
    """Symbol weight of a path delayed by ``tau``; exactly 1 on whole periods."""
    if tau < 0:
        raise DomainError("tau must be non-negative")
    m = params.freq * tau
    if m == math.floor(m):
        return 1.0
    T = params.period
    phase = 2.0 * math.pi * tau / T
    lag = tau - math.ceil(tau / T) * T
    return math.exp(-params.beta * lag) * (math.cos(phase) + params.beta / params.omega * math.sin(phase))


def tap_shift(tau: float, params: OscParams) -> int:
    """Integer lag ceil(f tau) between a delayed path and the direct clock."""
    return math.ceil(params.freq * tau - 1e-12)


def multipath_map(r: float, taps: TapSet, symbol_pairs: Sequence[tuple[float, float]], params: OscParams) -> float:
    """One step of the received-signal map with several propagation paths.

    ``symbol_pairs[l]`` is (s_{n'}, s_{n'+1}) with n' = n - ceil(f tau_l).
    """
    if len(symbol_pairs) != len(taps):
        raise DomainError("one symbol pair per tap required")
    e = math.exp(params.theta)
    acc = e * r
    for a, tau, (s0, s1) in zip(taps.alphas, taps.taus, symbol_pairs):
        K = k_factor(tau, params)
        acc -= a * (e * s0 - K * s0 - s1 + K * s1)
    return acc


def multipath_orbit(r0: float, taps: TapSet, signs: np.ndarray, params: OscParams, n_start: int, n_steps: int) -> np.ndarray:
    """Iterate multipath_map from period ``n_start``; returns n_steps + 1 values."""
    shifts = [tap_shift(tau, params) for tau in taps.taus]
    first = n_start - max(shifts)
    last = n_start + n_steps - 1 - min(shifts) + 1
    if first < 0 or last >= len(signs):
        raise CoverageError("symbol stream does not cover the tap delays")
    out = np.empty(n_steps + 1)
    out[0] = r0
    for i in range(n_steps):
        n = n_start + i
        pairs = [(signs[n - d], signs[n - d + 1]) for d in shifts]
        out[i + 1] = multipath_map(out[i], taps, pairs, params)
    return out


def composed_map(O: float, u1: float, b1: int, b2: int, gains: tuple[float, float], f2: int = 2) -> tuple[float, float]:
    g1, g2 = gains
    if not (0 < g1 < 1 and 0 < g2 < 1):
        raise DomainError("gains must lie in (0, 1)")
    if f2 not in (1, 2):
        raise DomainError("second-user multiplier must be 1 or 2")
    m = 1 << f2
    return m * O - (m - 2) * g1 * u1 - g1 * b1 - g2 * b2, 2.0 * u1 - b1


def interference_map(r: float, s: float, c: float, alpha0: float, params: OscParams) -> float:
    e = math.exp(params.theta)
    return e * r - (e - 1.0) * (c + alpha0 * s)


def interference_offset(A: float, phi0: float) -> float:
    """Constant c = A sin(2 pi n + phi0) when the interferer shares the symbol rate."""
    return A * math.sin(phi0)


def baker_inverse(z: float, b: int, k: int = 1) -> float:
    if not 0 <= b < (1 << k):
        raise DomainError(f"symbol {b} out of range for k={k}")
    v = z + b
    if v >= b + 1 and z < 1.0:
        # z just below 1 can round up onto the next branch
        v = math.nextafter(b + 1.0, 0.0)
    return v / (1 << k)


def unfolded_baker_step(u: float, z: float, k: int = 1) -> tuple[float, float]:
    u_next, b = shift_map(u, k)
    return u_next, baker_inverse(z, b, k)


def shift_orbit_from_digits(digits: np.ndarray, k: int = 1, n_terms: int | None = None) -> np.ndarray:
    """Shift-map orbit written as base-2^k expansions of a digit stream.

    u_n = sum_j digits[n+j] 2^{-k(j+1)}. Generating orbits this way avoids
    the collapse to 0 that iterating the doubling map in floats suffers.
    The returned orbit has len(digits) - n_terms + 1 points.
    """
    if n_terms is None:
        n_terms = 53 // k
    d = np.asarray(digits, dtype=np.float64)
    if d.size < n_terms:
        raise DomainError("digit stream shorter than the expansion length")
    w = (2.0 ** -k) ** np.arange(1, n_terms + 1)
    return np.lib.stride_tricks.sliding_window_view(d, n_terms) @ w


def baker_orbit(z0: float, digits: np.ndarray, k: int = 1) -> np.ndarray:
    """Iterate baker_inverse driven by ``digits``; returns len(digits) + 1 values."""
    out = np.empty(len(digits) + 1)
    out[0] = z0
    scale = float(1 << k)
    for i, b in enumerate(digits):
        out[i + 1] = (out[i] + b) / scale
    return out
