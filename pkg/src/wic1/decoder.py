"""Symbol recovery: threshold partition, inverse map, matched filter, dispersion bootstrap."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import CoverageError, DomainError, NonFiniteState
from .maps import baker_inverse
from .oscillator import OscParams, SymbolStream


@dataclass(frozen=True)
class PartitionSpec:
    """Seven decision lines for the two-user received map."""

    gains: tuple
    slope: float = 4.0

    @property
    def thresholds(self) -> np.ndarray:
        g1, g2 = self.gains
        j = np.arange(1, 8)
        return 0.5 * (3.0 * g1 + (j - 1) * g2)


@dataclass
class DecodeResult:
    b1: np.ndarray
    b2: np.ndarray
    j: np.ndarray
    err1: Optional[np.ndarray] = None
    err2: Optional[np.ndarray] = None

    def score(self, b1_true, b2_true) -> "DecodeResult":
        self.err1 = self.b1 != np.asarray(b1_true)
        self.err2 = self.b2 != np.asarray(b2_true)
        return self

    def to_csv(self, path, b1_true, b2_true) -> None:
        n = np.arange(self.j.size)
        data = np.column_stack([n, b1_true, self.b1, b2_true, self.b2, self.j])
        np.savetxt(path, data, delimiter=",", fmt="%d", header="n,b1,b1_hat,b2,b2_hat,j", comments="")


def threshold_decode(O_n, O_next, spec: PartitionSpec):
    """Branch index from the residual R = 4 O_n - O_{n+1}; vectorized.

    Returns (j, b1, b2) with b1 = j mod 2 and b2 = j // 2.
    """
    R = spec.slope * np.asarray(O_n, dtype=np.float64) - np.asarray(O_next, dtype=np.float64)
    j = np.searchsorted(spec.thresholds, R, side="left")
    if j.ndim == 0:
        j = int(j)
    return j, j % 2, j // 2


def decode_stream(O, spec: PartitionSpec) -> DecodeResult:
    """Decode every consecutive pair of a received sample stream."""
    O = np.asarray(O, dtype=np.float64)
    j, b1, b2 = threshold_decode(O[:-1], O[1:], spec)
    return DecodeResult(b1, b2, j)


def inverse_map_decode(z: float, b_hat: int, k: int = 1) -> tuple[float, int]:
    z_next = baker_inverse(z, b_hat, k)
    return z_next, math.floor((1 << k) * z_next)


# ---------------------------------------------------------------- matched filter


@dataclass
class MatchedFilterResult:
    t: np.ndarray
    eta: np.ndarray
    y: np.ndarray
    ydot: np.ndarray
    S: np.ndarray
    # symbols[n] estimates the sign sent during period n (read at (n+1)T)
    symbols: np.ndarray
    first_period: int

    def match_rate(self, signs, warmup_periods: int = 10) -> float:
        signs = np.asarray(signs)
        n = np.arange(self.symbols.size)
        keep = (n >= max(warmup_periods, self.first_period)) & (n < signs.size)
        if not keep.any():
            raise DomainError("no post-warm-up periods to compare")
        return float(np.mean(self.symbols[keep] == signs[n[keep]]))


def _steps_per_period(params: OscParams, dt: float) -> int:
    ratio = params.period / dt
    ns = int(round(ratio))
    if ns < 1 or abs(ratio - ns) > 1e-9 * ratio:
        raise DomainError(f"dt={dt} does not divide the period {params.period}")
    return ns


def _run_filter(eta_l, eta_m, eta_r, params: OscParams, dt: float, y0: float, ydot0: float):
    ys, vs, bad = _kernels.filter_integrate(
        float(y0), float(ydot0), np.ascontiguousarray(eta_l), np.ascontiguousarray(eta_m),
        np.ascontiguousarray(eta_r), params.beta, params.stiffness, float(dt),
    )
    if bad >= 0:
        raise NonFiniteState(f"filter state overflowed at step {bad}")
    return ys, vs


def matched_filter_run(
    received,
    params: OscParams,
    dt: float,
    warmup_periods: int = 10,
    y0: float = 0.0,
    ydot0: float = 0.0,
    eta0: Optional[float] = None,
) -> MatchedFilterResult:
    """Drive the time-reversed oscillator with a received waveform.

    ``received`` is sampled on a grid of step ``dt`` starting at t = 0, and
    dt must divide T. The shifted integrator eta' = x(t) - x(t - T) starts
    once a full period is buffered; by default it starts at the running
    mean of the last period, so eta(t) equals that running mean. ``eta0``
    overrides the starting value. The output S is latched from sign(y) at
    the symbol-clock instants nT, so S on [(n+1)T, (n+2)T) estimates s_n.
    """
    x = np.asarray(received, dtype=np.float64)
    ns = _steps_per_period(params, dt)
    if x.size < (warmup_periods + 2) * ns + 1:
        raise CoverageError("received signal shorter than warm-up plus one period")
    # cumulative trapezoid integral of x
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (x[1:] + x[:-1]) * dt)])
    # half-step values of x for the RK4 midpoints (linear interpolation)
    xm = 0.5 * (x[1:] + x[:-1])
    cum_m = cum[:-1] + 0.5 * dt * 0.5 * (x[:-1] + xm)
    T = params.period
    run = (cum[ns:] - cum[:-ns]) / T
    # same running mean at the step midpoints
    run_m = (cum_m[ns:] - cum_m[:-ns]) / T
    eta = run.copy()
    eta_mid = run_m.copy()
    if eta0 is not None:
        shift = eta0 - run[0]
        eta += shift
        eta_mid += shift
    ys, vs = _run_filter(eta[:-1], eta_mid, eta[1:], params, dt, y0, ydot0)
    t = dt * np.arange(ns, x.size)
    # sign(y) at clock instants (n+1)T, n = 0, 1, ...; the filter starts at T
    clock = np.arange(0, ys.size, ns)
    symbols = np.where(ys[clock] >= 0.0, 1.0, -1.0)
    S = np.repeat(symbols, ns)[: ys.size]
    return MatchedFilterResult(t, eta, ys, vs, S, symbols, first_period=0)


def reverse_time_map_check(params: OscParams, symbols: SymbolStream, dt: Optional[float] = None, y0: float = 0.0):
    """Run the filter with eta forced to the piecewise-constant s(t).

    Returns (z_n, z_{n+1}) with z = (y(nT) + 1)/2; these sit on the
    contracting branches z_{n+1} = (z_n + b_n)/2.
    """
    if dt is None:
        dt = params.default_dt
    ns = _steps_per_period(params, dt)
    s = symbols.signs
    eta_cells = np.repeat(s, ns)
    ys, _ = _run_filter(eta_cells, eta_cells, eta_cells, params, dt, y0, 0.0)
    z = (ys[::ns] + 1.0) / 2.0
    return z[:-1], z[1:]


# ---------------------------------------------------------------- dispersion


@dataclass
class BootstrapResult:
    signs: np.ndarray
    ambiguous: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))


def dispersion_bootstrap_decode(
    received,
    K0: float,
    dummy_symbol: float,
    params: OscParams,
    alpha0: float = 1.0,
) -> BootstrapResult:
    """Recover symbols from a delayed direct path, starting from a known symbol.

    ``received[i]`` are period samples arranged so that the step
    received[i] -> received[i+1] involves the pair (s_i, s_{i+1}) and
    s_0 is the agreed dummy. Each step is solved for s_{i+1} given the
    previously decoded s_i. A step is flagged ambiguous when the nearest of
    the four (s_i, s_{i+1}) branches disagrees with the chained s_i.

    With K0 = 1 (samples on the clock) each step carries s_{i+1} alone.
    """
    r = np.asarray(received, dtype=np.float64)
    e = math.exp(params.theta)
    resid = -(r[1:] - e * r[:-1]) / alpha0
    if K0 == 1.0:
        # on-clock samples carry s_{i+1} directly
        out = np.concatenate([[dummy_symbol], np.where(resid >= 0.0, 1.0, -1.0)])
        return BootstrapResult(out, np.zeros(resid.size, dtype=bool))
    branches = np.array([(a, b) for a in (-1.0, 1.0) for b in (-1.0, 1.0)])
    levels = (e - K0) * branches[:, 0] + (K0 - 1.0) * branches[:, 1]
    out = np.empty(r.size)
    amb = np.zeros(r.size - 1, dtype=bool)
    out[0] = dummy_symbol
    for i, rho in enumerate(resid):
        est = (rho - (e - K0) * out[i]) / (K0 - 1.0)
        out[i + 1] = 1.0 if est >= 0.0 else -1.0
        nearest = branches[np.argmin(np.abs(levels - rho))]
        amb[i] = nearest[0] != out[i]
    return BootstrapResult(out, amb)
