"""Gray-coded square QAM and pseudorandom bit sources."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erfc

__all__ = [
    "SUPPORTED_ORDERS", "QamConstellation", "constellation", "modulate",
    "demodulate_hard", "Prbs11", "prbs11_bits", "random_bits",
    "theoretical_ber_awgn", "bits_per_symbol",
]

SUPPORTED_ORDERS = (4, 16, 64, 256)


def bits_per_symbol(order: int) -> int:
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {order}; use one of {SUPPORTED_ORDERS}")
    return int(math.log2(order))


def _gray(n):
    return n ^ (n >> 1)


@dataclass(frozen=True, eq=False)
class QamConstellation:
    """Square QAM with unit mean energy.

    ``points[label]`` is the symbol for integer ``label``; the upper half of
    the label bits is the Gray index of the in-phase level, the lower half
    that of the quadrature level.  Level index 0 is the most negative.
    """

    order: int
    points: np.ndarray = field(repr=False)
    levels: np.ndarray = field(repr=False)       # per-axis amplitudes, ascending
    level_gray: np.ndarray = field(repr=False)   # Gray code of each level index

    @property
    def k(self) -> int:
        return bits_per_symbol(self.order)

    @property
    def scale(self) -> float:
        return float(self.levels[-1] / (len(self.levels) - 1))

    @property
    def labels(self) -> list[str]:
        return [format(i, f"0{self.k}b") for i in range(self.order)]


@lru_cache(maxsize=None)
def constellation(order: int) -> QamConstellation:
    k = bits_per_symbol(order)
    L = 1 << (k // 2)
    scale = 1 / math.sqrt(2 * (order - 1) / 3)
    idx = np.arange(L)
    levels = (2 * idx - (L - 1)) * scale
    gray = _gray(idx)
    points = np.empty(order, dtype=complex)
    for i in range(L):
        for q in range(L):
            points[(gray[i] << (k // 2)) | gray[q]] = levels[i] + 1j * levels[q]
    for a in (points, levels, gray):
        a.setflags(write=False)
    return QamConstellation(order, points, levels, gray)


def _bits_to_labels(bits, k):
    b = np.asarray(bits, dtype=np.uint8).reshape(-1, k)
    weights = 1 << np.arange(k - 1, -1, -1)
    return b.astype(np.int64) @ weights


def _labels_to_bits(labels, k):
    shifts = np.arange(k - 1, -1, -1)
    return ((np.asarray(labels)[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def modulate(bits, order: int) -> np.ndarray:
    """Map MSB-first groups of log2(order) bits to symbols."""
    c = constellation(order)
    bits = np.asarray(bits)
    if bits.size % c.k:
        raise ValueError(f"{bits.size} bits is not a multiple of {c.k}")
    return c.points[_bits_to_labels(bits, c.k)]


def _slice_axis(v, c: QamConstellation):
    # nearest level; exact ties go to the smaller Gray code, which is the
    # smaller overall label on a square lattice
    d = np.abs(v[:, None] - c.levels[None, :])
    dmin = d.min(axis=1, keepdims=True)
    tied = d <= dmin + 1e-12 * c.scale
    key = np.where(tied, c.level_gray[None, :], np.iinfo(np.int64).max)
    return np.argmin(key, axis=1)


def demodulate_labels(points, order: int) -> np.ndarray:
    c = constellation(order)
    z = np.asarray(points, dtype=complex).ravel()
    gi = c.level_gray[_slice_axis(z.real, c)]
    gq = c.level_gray[_slice_axis(z.imag, c)]
    return (gi.astype(np.int64) << (c.k // 2)) | gq


def demodulate_hard(points, order: int) -> np.ndarray:
    """Minimum-distance hard decisions, returned as a flat bit array."""
    return _labels_to_bits(demodulate_labels(points, order), constellation(order).k)


class Prbs11:
    """Fibonacci LFSR for x^11 + x^9 + 1 (period 2047).

    Each step outputs the oldest stage and shifts in the XOR of stages
    11 and 9.
    """

    period = 2047

    def __init__(self, seed_register: int = 0x7FF):
        seed_register = int(seed_register)
        if not 0 < seed_register < 2048:
            raise ValueError(f"PRBS-11 seed must be in [1, 2047], got {seed_register}")
        self.register = seed_register

    def copy(self) -> "Prbs11":
        return Prbs11(self.register)

    def _step(self):
        r = self.register
        self.register = ((r << 1) | (((r >> 10) ^ (r >> 8)) & 1)) & 0x7FF
        return (r >> 10) & 1

    def bits(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be non-negative")
        head = min(n, self.period)
        out = np.fromiter((self._step() for _ in range(head)), dtype=np.uint8, count=head)
        if n > self.period:
            out = np.resize(out, n)
            # register ends where n steps would leave it
            for _ in range((n - self.period) % self.period):
                self._step()
        return out


def prbs11_bits(seed_register: int, n: int) -> np.ndarray:
    return Prbs11(seed_register).bits(n)


def random_bits(seed, n: int) -> np.ndarray:
    """``n`` fair bits from numpy's PCG64 seeded with ``seed``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return np.random.default_rng(seed).integers(0, 2, size=n, dtype=np.uint8)


def _qfunc(x):
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2))


def theoretical_ber_awgn(order: int, esn0_linear: float) -> float:
    """Exact bit error probability of Gray square QAM in complex AWGN.

    Enumerates every (sent level, decided level) pair on one axis and
    weights it by the Hamming distance of their Gray codes.
    """
    if not esn0_linear > 0:
        raise ValueError("Es/N0 must be positive")
    c = constellation(order)
    L = len(c.levels)
    sigma = math.sqrt(1 / (2 * esn0_linear))
    bounds = np.concatenate([[-np.inf], (c.levels[:-1] + c.levels[1:]) / 2, [np.inf]])
    ham = np.array([[bin(int(a ^ b)).count("1") for b in c.level_gray] for a in c.level_gray])
    total = 0.0
    for i, s in enumerate(c.levels):
        # P(decide j | sent i) = Q((lo_j - s)/sigma) - Q((hi_j - s)/sigma)
        p = _qfunc((bounds[:-1] - s) / sigma) - _qfunc((bounds[1:] - s) / sigma)
        total += float(p @ ham[i])
    return total / (L * math.log2(L))
