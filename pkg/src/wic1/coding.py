"""Superposition gain planning and bit packing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, LengthError, Unsupported


@dataclass(frozen=True)
class GainPlan:
    zeta: tuple
    gains: tuple

    @property
    def n_users(self) -> int:
        return len(self.gains)


def plan_gains(n_users: int, freq_multipliers: Sequence[int] | None = None, zeta1: float = 0.2) -> GainPlan:
    """Branch lengths grow as zeta_i = 2^{f_i} zeta_{i-1}; gains are their normalization.

    Only the ladder f_i = i is supported.
    """
    if n_users < 1:
        raise DomainError("need at least one user")
    if not zeta1 > 0:
        raise DomainError("zeta1 must be positive")
    if freq_multipliers is None:
        freq_multipliers = range(1, n_users + 1)
    f = [int(v) for v in freq_multipliers]
    if f != list(range(1, n_users + 1)):
        raise Unsupported(f"frequency ladder {f} is not 1, 2, ..., N")
    zeta = [float(zeta1)]
    for fi in f[1:]:
        zeta.append(2.0**fi * zeta[-1])
    total = sum(zeta)
    return GainPlan(tuple(zeta), tuple(z / total for z in zeta))


def bits_to_symbols(bits, k: int) -> np.ndarray:
    """Pack groups of k bits, most significant first, into one integer per base period."""
    b = np.asarray(bits, dtype=np.int64).ravel()
    if k < 1:
        raise DomainError("k must be >= 1")
    if b.size % k:
        raise LengthError(f"{b.size} bits do not split into groups of {k}")
    weights = 1 << np.arange(k - 1, -1, -1)
    return b.reshape(-1, k) @ weights


def symbols_to_bits(symbols, k: int) -> np.ndarray:
    sym = np.asarray(symbols, dtype=np.int64).ravel()
    if k < 1:
        raise DomainError("k must be >= 1")
    if np.any((sym < 0) | (sym >= (1 << k))):
        raise DomainError(f"symbols out of range for k={k}")
    shifts = np.arange(k - 1, -1, -1)
    return ((sym[:, None] >> shifts) & 1).ravel().astype(np.int8)


def offset_bands(gains: tuple[float, float]) -> list[tuple[float, float]]:
    """Intervals covered by the residual 4 O_n - O_{n+1} for each branch index j = b1 + 2 b2.

    The residual equals 2 g1 u1 + g1 b1 + g2 b2, and b1 = floor(2 u1) confines
    2 g1 u1 to [g1 b1, g1 (b1 + 1)).
    """
    g1, g2 = gains
    bands = []
    for j in range(8):
        b1, b2 = j % 2, j // 2
        lo = 2 * g1 * b1 + g2 * b2
        bands.append((lo, lo + g1))
    return bands
