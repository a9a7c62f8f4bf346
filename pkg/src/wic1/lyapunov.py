"""Lyapunov exponent estimators for the maps, the hybrid flow and Rossler blocks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import DomainError, SingularJacobian
from .oscillator import HybridState, OscParams, integrate_hybrid

UNITS = ("nepits_per_period", "nepits_per_time", "bits_per_period", "bits_per_time")
LN2 = math.log(2.0)


@dataclass(frozen=True)
class LESpectrum:
    exponents: tuple
    unit: str
    n_steps: int
    label: str = ""
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.unit not in UNITS:
            raise DomainError(f"unknown unit {self.unit!r}")
        ordered = tuple(sorted((float(v) for v in self.exponents), reverse=True))
        object.__setattr__(self, "exponents", ordered)

    def _replace(self, exponents, unit) -> "LESpectrum":
        return LESpectrum(tuple(exponents), unit, self.n_steps, self.label, dict(self.extras))

    def to_bits(self) -> "LESpectrum":
        if self.unit.startswith("bits"):
            return self
        return self._replace([v / LN2 for v in self.exponents], self.unit.replace("nepits", "bits"))

    def to_nepits(self) -> "LESpectrum":
        if self.unit.startswith("nepits"):
            return self
        return self._replace([v * LN2 for v in self.exponents], self.unit.replace("bits", "nepits"))

    def per_time(self, freq: float) -> "LESpectrum":
        if self.unit.endswith("per_time"):
            return self
        return self._replace([v * freq for v in self.exponents], self.unit.replace("per_period", "per_time"))

    def per_period(self, freq: float) -> "LESpectrum":
        if self.unit.endswith("per_period"):
            return self
        return self._replace([v / freq for v in self.exponents], self.unit.replace("per_time", "per_period"))

    def as_dict(self) -> dict:
        return {"label": self.label, "unit": self.unit, "exponents": list(self.exponents), "n_steps": self.n_steps}


def le_map_1d(
    step: Callable[[float], tuple[float, float]],
    x0: float,
    n: int = 10_000,
    label: str = "",
) -> LESpectrum:
    """Mean log-slope along an orbit of a 1-D map.

    ``step(x)`` returns (x_next, slope); a NaN slope marks a branch
    boundary, which is skipped and counted in ``extras['skipped']``.
    """
    if n < 10_000:
        raise DomainError("at least 10^4 iterations are required")
    x = x0
    logs = []
    for _ in range(n):
        x, slope = step(x)
        if not math.isnan(slope):
            logs.append(math.log(abs(slope)))
    if not logs:
        raise DomainError("every orbit point sat on a branch boundary")
    return LESpectrum((math.fsum(logs) / len(logs),), "nepits_per_period", n, label, {"skipped": n - len(logs)})


def le_qr(jacobians, step_time: float = 1.0, unit: str = "nepits_per_period", label: str = "") -> LESpectrum:
    """QR (Benettin) spectrum of a product of per-step Jacobians.

    ``jacobians`` has shape (n, d, d); exponents are per ``step_time``.
    """
    J = np.ascontiguousarray(jacobians, dtype=np.float64)
    if J.ndim != 3 or J.shape[1] != J.shape[2]:
        raise DomainError("jacobians must have shape (n, d, d)")
    if J.shape[0] < 1000:
        raise DomainError("at least 10^3 steps are required")
    if not np.all(np.isfinite(J)):
        raise DomainError("non-finite Jacobian entries")
    sums, status = _kernels.qr_log_growth(J)
    if status:
        raise SingularJacobian("a Jacobian in the sequence is singular")
    return LESpectrum(tuple(sums / (J.shape[0] * step_time)), unit, J.shape[0], label)


def tangent_matrix(params: OscParams, inverse: bool = False) -> np.ndarray:
    """Constant Jacobian of the hybrid flow in the (x, x') plane."""
    damping = -2.0 * params.beta if inverse else 2.0 * params.beta
    return np.array([[0.0, 1.0], [-params.stiffness, damping]])


def le_continuous_hybrid(
    params: OscParams,
    duration: Optional[float] = None,
    inverse: bool = False,
    dt: Optional[float] = None,
    reortho: int = 10,
) -> LESpectrum:
    """Variational exponents of the hybrid oscillator (or its time-reversed filter).

    Perturbations pass straight through the switching events, so the
    tangent dynamics are linear with a constant matrix; the flow orbit is
    integrated alongside only to report its event count.
    """
    if duration is None:
        duration = 500 * params.period
    if duration < 500 * params.period * (1 - 1e-12):
        raise DomainError("duration must cover at least 500 periods")
    if dt is None:
        dt = params.default_dt
    n_steps = int(round(duration / dt))
    J = tangent_matrix(params, inverse)
    sums = _kernels.linear_tangent_growth(J, float(dt), n_steps, int(reortho))
    orbit = integrate_hybrid(params, None, HybridState(0.1, 0.0, 1.0), duration, dt) if not inverse else None
    extras = {"events": orbit.n_events} if orbit is not None else {}
    label = "inverse hybrid" if inverse else "hybrid"
    return LESpectrum(tuple(sums / (n_steps * dt)), "nepits_per_time", n_steps, label, extras)


# ---------------------------------------------------------------- Rossler


def rossler_jacobian(state, a: float, c: float, q: float = 1.0) -> np.ndarray:
    x, _, z = state
    return q * np.array([[0.0, -1.0, -1.0], [1.0, a, 0.0], [z, 0.0, x - c]])


def le_rossler(
    a: float = 0.2,
    b: float = 0.2,
    c: float = 5.7,
    q: float = 1.0,
    dt: float = 0.01,
    n_steps: int = 1_000_000,
    n_transient: int = 10_000,
    reortho: int = 10,
    x0=(1.0, 1.0, 1.0),
) -> LESpectrum:
    """Spectrum of one Rossler system running ``q`` times faster than its base clock."""
    if q <= 0:
        raise DomainError("q must be positive")
    sums, mean_trace, _ = _kernels.rossler_spectrum(
        np.asarray(x0, dtype=np.float64), a, b, c, q, dt, n_transient, n_steps, reortho
    )
    total = n_steps * dt
    return LESpectrum(tuple(sums / total), "nepits_per_time", n_steps, f"rossler q={q:g}",
                      {"mean_trace": float(mean_trace)})


def le_rossler_pair(a: float = 0.2, b: float = 0.2, c: float = 5.7, Q: float = 2.0, **kw) -> tuple[LESpectrum, LESpectrum]:
    """Spectra of the base-rate and the Q-times-faster diagonal blocks."""
    return le_rossler(a, b, c, 1.0, **kw), le_rossler(a, b, c, Q, **kw)


def q_scaling_errors(base: LESpectrum, fast: LESpectrum, Q: float) -> np.ndarray:
    """|fast - Q base| per exponent, relative to |Q base| (or to |Q lambda_1| for near-zero ones)."""
    lb = Q * np.asarray(base.exponents)
    lf = np.asarray(fast.exponents)
    scale = np.where(np.abs(lb) < 0.1 * abs(lb[0]), abs(lb[0]), np.abs(lb))
    return np.abs(lf - lb) / scale


def delay_embedded_jacobian(state1, state2, a: float, c: float, Q: float, alphas, dt: float, N: int) -> np.ndarray:
    """Jacobian of the delay-embedded two-user Rossler receiver.

    Variable order: user-1 (x, y, z); delayed copies w_1..w_N of user-1 x;
    user-2 x copies w_0..w_N; user-2 (y, z); received O. Size 2N + 7.
    Only the two Rossler blocks are dynamically meaningful; the shift
    rows carry the +-1/(Q dt), +-1/dt entries of the finite-difference delay.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    a1, a2 = alphas
    d = 2 * N + 7
    J = np.zeros((d, d))
    J[0:3, 0:3] = rossler_jacobian(state1, a, c)
    inv_q = 1.0 / (Q * dt)
    # user-1 delay line w_1..w_N at indices 3..N+2
    for n in range(1, N + 1):
        i = 2 + n
        J[i, i] = inv_q
        if n < N:
            J[i, i + 1] = -inv_q
    # user-2 x copies w_0..w_N at indices N+3..2N+3
    w2 = N + 3
    J[w2, 0] = 1.0 / dt
    J[w2, 3] = -1.0 / dt
    for n in range(1, N):
        J[w2 + n, w2 + n - 1] = 1.0 / dt
        J[w2 + n, w2 + n] = -1.0 / dt
    blk = [w2 + N, w2 + N + 1, w2 + N + 2]
    J[np.ix_(blk, blk)] = rossler_jacobian(state2, a, c, Q)
    # received signal row: derivative of a1 x1 + a2 x2
    o = d - 1
    J[o, 1] = J[o, 2] = -a1
    J[o, blk[1]] = J[o, blk[2]] = -Q * a2
    return J


def jacobian_blocks(J: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """The user-1 and user-2 Rossler blocks of ``delay_embedded_jacobian``."""
    blk = [2 * N + 3, 2 * N + 4, 2 * N + 5]
    return J[0:3, 0:3].copy(), J[np.ix_(blk, blk)].copy()
