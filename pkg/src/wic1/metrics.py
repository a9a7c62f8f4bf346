"""Information and error metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyTable

MIN_COUNT = 100


@dataclass
class ConfusionTable:
    """counts[b, b_hat] over an alphabet of ``counts.shape[0]`` symbols."""

    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 2 or np.any(self.counts < 0):
            raise ValueError("counts must be a non-negative matrix")

    @classmethod
    def from_pairs(cls, sent, received, alphabet: int) -> "ConfusionTable":
        sent = np.asarray(sent, dtype=np.int64)
        received = np.asarray(received, dtype=np.int64)
        counts = np.bincount(sent * alphabet + received, minlength=alphabet * alphabet)
        return cls(counts.reshape(alphabet, alphabet))

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def entropy(p) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.float64).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mutual_information(table: ConfusionTable) -> float:
    """Plug-in estimate I = H(b) - H(b | b_hat) in bits per symbol."""
    n = table.total
    if n < MIN_COUNT:
        raise EmptyTable(f"table holds {n} counts, at least {MIN_COUNT} needed")
    joint = table.counts / n
    h_b = entropy(joint.sum(axis=1))
    h_bhat = entropy(joint.sum(axis=0))
    # H(b | b_hat) = H(b, b_hat) - H(b_hat)
    mi = h_b - (entropy(joint) - h_bhat)
    return max(mi, 0.0)


def shannon_capacity(snr_db: float) -> float:
    return 0.5 * math.log2(1.0 + 10.0 ** (snr_db / 10.0))


def encoding_capacity(users: Sequence[tuple[float, float]], unit: str = "nepits") -> float:
    """sum_k f_k beta_base_k, in nepits (or bits) per unit time."""
    c = sum(f * b for f, b in users)
    if unit == "bits":
        return c / math.log(2.0)
    if unit != "nepits":
        raise ValueError(f"unknown unit {unit!r}")
    return c


def ber(errors) -> float:
    e = np.asarray(errors, dtype=bool)
    if e.size == 0:
        raise EmptyTable("no decisions to score")
    return float(e.mean())


def bit_errors(sent_symbols, decoded_symbols, k: int) -> np.ndarray:
    """Per-bit error mask for k-bit symbols."""
    diff = np.asarray(sent_symbols, dtype=np.int64) ^ np.asarray(decoded_symbols, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1)
    return ((diff[:, None] >> shifts) & 1).ravel().astype(bool)


@dataclass
class RateReport:
    snr_db: float
    info: tuple
    capacity: float
    encoding_capacity_bits: float
    ber: tuple
    extras: dict = field(default_factory=dict)

    @property
    def sum_info(self) -> float:
        return float(sum(self.info))

    def row(self) -> list[float]:
        return [self.snr_db, *self.info, self.sum_info, self.capacity, self.encoding_capacity_bits, *self.ber]
